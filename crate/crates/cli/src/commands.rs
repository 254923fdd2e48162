//! Subcommand implementations.

use anyhow::{bail, Context, Result};
use collab_walk::experiments::suite::{run_small_suite, small_odd_scan, SuiteCase};
use collab_walk::experiments::{
    dominance_scan, exact_dominance, fit_exponential, format_lifespans, measure_gap_decay,
    torus_star_vs_single, verify_one_vs_many, verify_star_vs_iid, GapDecayConfig, InequalityReport,
    Method, MethodChoice, TorusConfig,
};
use collab_walk::simulate::{estimate, WalkJob};
use collab_walk::survival::{expected_union, ORACLE_MAX_TOTAL_TIME};
use collab_walk::{Network, TransitionKernel, Variant};

use crate::output::{num, Csv};
use crate::spec::{parse_graph, parse_lifespans, parse_reals, parse_scheme};
use crate::{Command, DominanceArgs, GapDecayArgs, GenArgs, JobArgs, SimulateArgs, TorusArgs, VerifyArgs};

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Gen(args) => gen(args),
        Command::Exact(args) => exact(args),
        Command::Simulate(args) => simulate(args),
        Command::Verify(args) => verify(args),
        Command::GapDecay(args) => gap_decay(args),
        Command::Torus(args) => torus(args),
        Command::Dominance(args) => dominance(args),
    }
}

fn variant(flag: &str) -> Result<Variant> {
    flag.parse().with_context(|| format!("--variant: unknown variant `{flag}`"))
}

fn method(flag: &str) -> Result<MethodChoice> {
    flag.parse().with_context(|| format!("--method: unknown method `{flag}`"))
}

fn graph(flag: &str) -> Result<Network> {
    parse_graph(flag).with_context(|| format!("--graph `{flag}`"))
}

fn gen(args: GenArgs) -> Result<()> {
    let s = &args.source;
    let spec = if let Some(n) = s.cycle {
        format!("cycle:{n}")
    } else if let Some(n) = s.complete {
        format!("complete:{n}")
    } else if let Some(n) = s.path {
        format!("path:{n}")
    } else if let Some(t) = &s.torus {
        format!("torus:{t}")
    } else if let Some(g) = &s.gnp {
        format!("gnp:{g}")
    } else {
        s.graph.clone().unwrap_or_default()
    };
    let net = graph(&spec)?;
    let text = format!(
        "# collab-walk {} graph={spec} vertices={} edges={}\n{}",
        env!("CARGO_PKG_VERSION"),
        net.vertex_count(),
        net.edge_count(),
        net.to_edge_list()
    );
    match &args.output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write `{}`", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

struct Resolved {
    kernel: TransitionKernel,
    lifespans: Vec<f64>,
}

fn resolve(job: &JobArgs) -> Result<Resolved> {
    let net = graph(&job.graph)?;
    let kernel = TransitionKernel::with_variant(&net, variant(&job.variant)?);
    let lifespans = parse_lifespans(&job.t, job.k).context("--t")?;
    Ok(Resolved { kernel, lifespans })
}

fn job_config(job: &JobArgs, lifespans: &[f64]) -> Vec<(&'static str, String)> {
    vec![
        ("graph", job.graph.clone()),
        ("variant", job.variant.clone()),
        ("scheme", job.scheme.clone()),
        ("k", lifespans.len().to_string()),
        ("t", format_lifespans(lifespans)),
    ]
}

const JOB_HEADER: [&str; 8] = ["scheme", "k", "t_list", "variant", "method", "value", "std_error", "seed"];

fn exact(args: JobArgs) -> Result<()> {
    let r = resolve(&args)?;
    let k = r.lifespans.len();
    let scheme = parse_scheme(&args.scheme, &r.kernel, k).context("--scheme")?;
    let value = expected_union(&r.kernel, &scheme, &r.lifespans)?;
    let mut csv = Csv::new("exact", &job_config(&args, &r.lifespans), None, "exact");
    csv.row(&JOB_HEADER);
    csv.row(&[
        args.scheme.clone(),
        k.to_string(),
        format_lifespans(&r.lifespans),
        r.kernel.variant().name().to_string(),
        "exact".to_string(),
        num(value),
        num(0.0),
        "NA".to_string(),
    ]);
    csv.finish(args.output.as_deref())
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let job = &args.job;
    let r = resolve(job)?;
    let k = r.lifespans.len();
    let scheme = parse_scheme(&job.scheme, &r.kernel, k).context("--scheme")?;
    let est = estimate(&WalkJob::new(&r.kernel, scheme, r.lifespans.clone(), args.replicas, args.seed)?)?;
    let mut config = job_config(job, &r.lifespans);
    config.push(("replicas", args.replicas.to_string()));
    let mut csv = Csv::new("simulate", &config, Some(args.seed), "monte-carlo");
    csv.row(&JOB_HEADER);
    csv.row(&[
        job.scheme.clone(),
        k.to_string(),
        format_lifespans(&r.lifespans),
        r.kernel.variant().name().to_string(),
        "monte-carlo".to_string(),
        num(est.mean),
        num(est.std_error),
        args.seed.to_string(),
    ]);
    csv.finish(job.output.as_deref())
}

const VERIFY_HEADER: [&str; 10] = ["name", "graph", "variant", "k", "t_list", "lhs", "rhs", "gap", "method", "seed"];

fn report_row(r: &InequalityReport) -> Vec<String> {
    vec![
        r.name.name().to_string(),
        r.graph.clone(),
        r.variant.name().to_string(),
        r.k.to_string(),
        format_lifespans(&r.lifespans),
        num(r.lhs),
        num(r.rhs),
        num(r.gap),
        r.method.name().to_string(),
        r.seed.map_or("NA".to_string(), |s| s.to_string()),
    ]
}

fn verify(args: VerifyArgs) -> Result<()> {
    let (reports, config, asserted) = match (&args.suite, &args.graph) {
        (Some(suite), _) if suite == "small" => {
            let case: SuiteCase = args
                .case
                .parse()
                .with_context(|| format!("--case: unknown case `{}`", args.case))?;
            let config = vec![("suite", suite.clone()), ("case", case.name().to_string())];
            (run_small_suite(case)?, config, true)
        }
        (Some(suite), _) if suite == "odd-scan" => {
            let config = vec![
                ("suite", suite.clone()),
                ("graphs", "connected-n<=5".to_string()),
                ("k", "2".to_string()),
                ("max_total", "7".to_string()),
            ];
            (small_odd_scan()?, config, false)
        }
        (Some(suite), _) => bail!("--suite: unknown suite `{suite}` (expected small or odd-scan)"),
        (None, Some(g)) => {
            let net = graph(g)?;
            let kernel = TransitionKernel::with_variant(&net, variant(&args.variant)?);
            let t = args.t.as_deref().context("--t is required with --graph")?;
            let lifespans = parse_lifespans(t, args.k).context("--t")?;
            let report = match args.inequality.as_str() {
                "one-vs-many" => verify_one_vs_many(&kernel, &lifespans)?,
                "star-vs-iid" => {
                    if lifespans.iter().any(|&x| x != lifespans[0]) {
                        bail!("--t: star-vs-iid needs equal lifespans");
                    }
                    verify_star_vs_iid(&kernel, lifespans.len(), lifespans[0], kernel.pi())?
                }
                other => bail!("--inequality: unknown inequality `{other}`"),
            };
            let config = vec![
                ("graph", g.clone()),
                ("inequality", args.inequality.clone()),
                ("variant", args.variant.clone()),
                ("t", format_lifespans(&lifespans)),
            ];
            (vec![report.on_graph(g.clone())], config, true)
        }
        (None, None) => bail!("verify needs --suite or --graph"),
    };
    let mut csv = Csv::new("verify", &config, None, "exact");
    csv.row(&VERIFY_HEADER);
    for r in &reports {
        csv.row(&report_row(r));
    }
    let min_gap = reports.iter().map(|r| r.gap).fold(f64::INFINITY, f64::min);
    csv.comment("reports", reports.len());
    if !reports.is_empty() {
        csv.comment("min_gap", num(min_gap));
    }
    let failures = reports.iter().filter(|r| !r.holds()).count();
    csv.comment("failures", if asserted { failures.to_string() } else { "not-asserted".to_string() });
    csv.finish(args.output.as_deref())?;
    if asserted && failures > 0 {
        return Err(VerifyFailure(failures).into());
    }
    Ok(())
}

/// Raised when a verified inequality is violated; mapped to exit code 2.
#[derive(Debug)]
pub struct VerifyFailure(pub usize);

impl std::fmt::Display for VerifyFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} report(s) below tolerance", self.0)
    }
}

impl std::error::Error for VerifyFailure {}

fn gap_decay(args: GapDecayArgs) -> Result<()> {
    let cfg = GapDecayConfig {
        n: args.n,
        p: args.p,
        k: args.k,
        c_grid: parse_reals(&args.c).context("--c")?,
        replicas: args.replicas,
        seed: args.seed,
        graph_seed: args.graph_seed.unwrap_or(args.seed),
        variant: variant(&args.variant)?,
        method: method(&args.method)?,
    };
    let curve = measure_gap_decay(&cfg)?;
    let config = vec![
        ("n", cfg.n.to_string()),
        ("p", cfg.p.to_string()),
        ("k", cfg.k.to_string()),
        ("c", args.c.clone()),
        ("replicas", cfg.replicas.to_string()),
        ("graph_seed", cfg.graph_seed.to_string()),
        ("variant", cfg.variant.name().to_string()),
        ("single_start", "uniform".to_string()),
    ];
    let mut csv = Csv::new("gap-decay", &config, Some(cfg.seed), curve.method);
    csv.row(&["c", "T", "multi_mean", "multi_se", "single_mean", "single_se", "gap", "gap_se"]);
    for p in &curve.points {
        csv.row(&[
            num(p.c),
            p.total.to_string(),
            num(p.multi_mean),
            num(p.multi_se),
            num(p.single_mean),
            num(p.single_se),
            num(p.gap),
            num(p.gap_se),
        ]);
    }
    match fit_exponential(&curve.points) {
        Ok(fit) => {
            csv.comment("fit_a", num(fit.a));
            csv.comment("fit_b", num(fit.b));
            csv.comment("fit_residual", num(fit.residual));
            csv.comment("fit_points", fit.points_used);
        }
        Err(e) => {
            csv.comment("fit_a", "NA");
            csv.comment("fit_b", "NA");
            csv.comment("fit_residual", "NA");
            csv.comment("fit_error", e);
        }
    }
    csv.finish(args.output.as_deref())
}

fn torus(args: TorusArgs) -> Result<()> {
    let mut cfg = TorusConfig::new(args.dim, args.side, args.replicas, args.seed);
    cfg.t1 = args.t1;
    cfg.t2 = args.t2.unwrap_or(cfg.t2);
    cfg.t3 = args.t3.unwrap_or(cfg.t3);
    cfg.c0 = args.c0;
    cfg.variant = variant(&args.variant)?;
    let report = torus_star_vs_single(&cfg)?;
    let config = vec![
        ("dim", cfg.dim.to_string()),
        ("side", cfg.side.to_string()),
        ("t", format_lifespans(&report.lifespans)),
        ("c0", cfg.c0.to_string()),
        ("replicas", cfg.replicas.to_string()),
        ("variant", cfg.variant.name().to_string()),
    ];
    let mut csv = Csv::new("torus", &config, Some(cfg.seed), "monte-carlo");
    csv.row(&VERIFY_HEADER);
    csv.row(&report_row(&report));
    if let Method::MonteCarlo { lhs_se, rhs_se, .. } = report.method {
        csv.comment("lhs_se", num(lhs_se));
        csv.comment("rhs_se", num(rhs_se));
    }
    csv.comment("gap_se", num(report.gap_se()));
    for (key, value) in &report.metadata {
        match value.parse::<f64>() {
            Ok(x) if value.contains('.') => csv.comment(key, num(x)),
            _ => csv.comment(key, value),
        }
    }
    csv.finish(args.output.as_deref())
}

fn dominance(args: DominanceArgs) -> Result<()> {
    let net = graph(&args.graph)?;
    let kernel = TransitionKernel::with_variant(&net, variant(&args.variant)?);
    let lifespans = parse_lifespans(&args.t, args.k).context("--t")?;
    let choice = method(&args.method)?;
    let integral = lifespans.iter().all(|t| t.fract() == 0.0);
    let total: f64 = lifespans.iter().sum();
    let enumerable = kernel.variant().is_discrete()
        && integral
        && net.vertex_count() <= 6
        && lifespans.len() <= 3
        && total <= ORACLE_MAX_TOTAL_TIME as f64;
    let use_exact = match choice {
        MethodChoice::Exact => true,
        MethodChoice::MonteCarlo => false,
        MethodChoice::Auto => enumerable,
    };
    let (report, method_name, seed) = if use_exact {
        let steps: Vec<u64> = lifespans.iter().map(|&t| t as u64).collect();
        (exact_dominance(&kernel, &steps)?, "exact", None)
    } else {
        (dominance_scan(&kernel, &lifespans, args.replicas, args.seed)?, "monte-carlo", Some(args.seed))
    };
    let mut config = vec![
        ("graph", args.graph.clone()),
        ("variant", kernel.variant().name().to_string()),
        ("k", lifespans.len().to_string()),
        ("t", format_lifespans(&lifespans)),
    ];
    if !use_exact {
        config.push(("replicas", args.replicas.to_string()));
    }
    let mut csv = Csv::new("dominance", &config, seed, method_name);
    csv.row(&["side", "value", "cdf"]);
    for (side, cdf) in [("multi", &report.multi), ("single", &report.single)] {
        for &(value, p) in cdf {
            csv.row(&[side.to_string(), value.to_string(), num(p)]);
        }
    }
    csv.comment("max_crossing", num(report.max_crossing));
    csv.finish(args.output.as_deref())
}

pub fn is_verify_failure(e: &anyhow::Error) -> Option<usize> {
    e.downcast_ref::<VerifyFailure>().map(|f| f.0)
}
