//! Decay of the one-vs-many gap with lifespan on an Erdős–Rényi graph.
//!
//! At scale factor `c` every one of `k` walkers lives `t = ⌈c n²⌉` steps
//! and the single walker lives `T = k t`; all starts are uniform. The gap
//! series is then fitted by `gap ≈ a · exp(−b c)`.

use super::MethodChoice;
use crate::chain::{TransitionKernel, Variant};
use crate::error::{Error, Result};
use crate::network::Network;
use crate::rng::derive_seed;
use crate::scheme::{uniform, StartScheme};
use crate::simulate::{estimate, WalkJob};
use crate::survival::{expected_range_single, expected_union_product};

#[derive(Debug, Clone, PartialEq)]
pub struct GapDecayConfig {
    pub n: usize,
    pub p: f64,
    pub k: usize,
    pub c_grid: Vec<f64>,
    pub replicas: u64,
    pub seed: u64,
    pub graph_seed: u64,
    pub variant: Variant,
    pub method: MethodChoice,
}

impl GapDecayConfig {
    /// Full-scale setup: G(100, 0.1) with `c` from 0.0005 to 0.01.
    pub fn full_scale(k: usize, replicas: u64, seed: u64) -> Self {
        GapDecayConfig {
            n: 100,
            p: 0.1,
            k,
            c_grid: (1..=20).map(|i| 0.0005 * i as f64).collect(),
            replicas,
            seed,
            graph_seed: seed,
            variant: Variant::Plain,
            method: MethodChoice::MonteCarlo,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapPoint {
    pub c: f64,
    /// Per-walker lifespans of the multi-walker side (the last may carry a
    /// parity adjustment for exact plain evaluation).
    pub walker_lifespan: u64,
    pub total: u64,
    pub multi_mean: f64,
    pub multi_se: f64,
    pub single_mean: f64,
    pub single_se: f64,
    pub gap: f64,
    pub gap_se: f64,
}

/// `gap ≈ a · exp(−b c)` fitted by least squares on `(c, ln gap)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpFit {
    pub a: f64,
    pub b: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    pub points_used: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapDecayCurve {
    pub points: Vec<GapPoint>,
    pub fit: Option<ExpFit>,
    pub method: &'static str,
    pub graph_edges: usize,
}

fn lifespans_for(cfg: &GapDecayConfig, c: f64, exact: bool) -> (Vec<f64>, u64) {
    let t = (c * (cfg.n * cfg.n) as f64).ceil() as u64;
    let mut lifespans = vec![t as f64; cfg.k];
    let mut total = t * cfg.k as u64;
    if exact && cfg.variant == Variant::Plain && total % 2 == 1 {
        if let Some(last) = lifespans.last_mut() {
            *last += 1.0;
        }
        total += 1;
    }
    (lifespans, total)
}

fn measure_point(cfg: &GapDecayConfig, kernel: &TransitionKernel, c: f64, exact: bool) -> Result<GapPoint> {
    let n = kernel.vertex_count();
    let (lifespans, total) = lifespans_for(cfg, c, exact);
    let start = uniform(n);
    let (multi_mean, multi_se, single_mean, single_se) = if exact {
        let multi = expected_union_product(kernel, &vec![start.clone(); cfg.k], &lifespans)?;
        let single = expected_range_single(kernel, &start, total as f64)?;
        (multi, 0.0, single, 0.0)
    } else {
        let point_seed = derive_seed(cfg.seed, c.to_bits());
        let multi = estimate(&WalkJob::new(
            kernel,
            StartScheme::iid(start.clone(), cfg.k),
            lifespans.clone(),
            cfg.replicas,
            derive_seed(point_seed, 0),
        )?)?;
        let single = estimate(&WalkJob::new(
            kernel,
            StartScheme::iid(start, 1),
            vec![total as f64],
            cfg.replicas,
            derive_seed(point_seed, 1),
        )?)?;
        (multi.mean, multi.std_error, single.mean, single.std_error)
    };
    Ok(GapPoint {
        c,
        walker_lifespan: lifespans[0] as u64,
        total,
        multi_mean,
        multi_se,
        single_mean,
        single_se,
        gap: multi_mean - single_mean,
        gap_se: multi_se.hypot(single_se),
    })
}

/// Gap series without the fit. Each point depends only on `(config, c)`, so
/// re-running one grid point alone reproduces it.
pub fn measure_gap_decay(cfg: &GapDecayConfig) -> Result<GapDecayCurve> {
    if cfg.k == 0 || cfg.replicas == 0 {
        return Err(Error::InvalidJob("gap decay needs k >= 1 and replicas >= 1".into()));
    }
    if cfg.c_grid.iter().any(|&c| !c.is_finite() || c < 0.0) {
        return Err(Error::InvalidJob("scale factors must be finite and nonnegative".into()));
    }
    let net = Network::gnp(cfg.n, cfg.p, cfg.graph_seed)?;
    let kernel = TransitionKernel::with_variant(&net, cfg.variant);
    let mut grid = cfg.c_grid.clone();
    grid.sort_by(f64::total_cmp);
    let max_total = grid.last().map_or(0.0, |&c| lifespans_for(cfg, c, false).1 as f64);
    let exact = cfg.method.use_exact(cfg.n, max_total);
    let points = grid
        .iter()
        .map(|&c| measure_point(cfg, &kernel, c, exact))
        .collect::<Result<Vec<_>>>()?;
    Ok(GapDecayCurve {
        points,
        fit: None,
        method: if exact { "exact" } else { "monte-carlo" },
        graph_edges: net.edge_count(),
    })
}

/// Gap series plus its exponential fit.
pub fn gap_decay_experiment(cfg: &GapDecayConfig) -> Result<GapDecayCurve> {
    let mut curve = measure_gap_decay(cfg)?;
    curve.fit = Some(fit_exponential(&curve.points)?);
    Ok(curve)
}

/// Ordinary least squares of `ln gap` on `c` over points with
/// `gap > 2·SE` (`gap > 0` for exact points).
pub fn fit_exponential(points: &[GapPoint]) -> Result<ExpFit> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.gap > 0.0 && p.gap > 2.0 * p.gap_se)
        .map(|p| (p.c, p.gap.ln()))
        .collect();
    if usable.len() < 3 {
        return Err(Error::DegenerateFit { usable: usable.len() });
    }
    let m = usable.len() as f64;
    let mean_c = usable.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = usable.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mean_c).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mean_c) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit { usable: 1 });
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_c;
    let rss: f64 = usable
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    Ok(ExpFit {
        a: intercept.exp(),
        b: -slope,
        residual: (rss / m).sqrt(),
        points_used: usable.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(c: f64, gap: f64, gap_se: f64) -> GapPoint {
        GapPoint {
            c,
            walker_lifespan: 0,
            total: 0,
            multi_mean: 0.0,
            multi_se: 0.0,
            single_mean: 0.0,
            single_se: 0.0,
            gap,
            gap_se,
        }
    }

    #[test]
    fn fit_recovers_exact_exponential() {
        let pts: Vec<GapPoint> = (0..6)
            .map(|i| {
                let c = 0.1 * i as f64;
                point(c, 3.0 * (-2.5 * c).exp(), 0.0)
            })
            .collect();
        let fit = fit_exponential(&pts).unwrap();
        assert!((fit.a - 3.0).abs() < 1e-12);
        assert!((fit.b - 2.5).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
        assert_eq!(fit.points_used, 6);
    }

    #[test]
    fn fit_skips_noisy_points() {
        let pts = vec![
            point(0.0, 1.0, 0.01),
            point(1.0, 0.5, 0.01),
            point(2.0, 0.25, 0.01),
            point(3.0, 0.01, 0.01),
            point(4.0, -0.02, 0.01),
        ];
        let fit = fit_exponential(&pts).unwrap();
        assert_eq!(fit.points_used, 3);
        assert!((fit.b - std::f64::consts::LN_2).abs() < 1e-12);
        assert!(matches!(
            fit_exponential(&pts[2..]),
            Err(Error::DegenerateFit { usable: 1 })
        ));
    }

    #[test]
    fn single_point_is_reproducible() {
        let cfg = GapDecayConfig {
            n: 20,
            p: 0.3,
            k: 2,
            c_grid: vec![0.01],
            replicas: 1,
            seed: 5,
            graph_seed: 5,
            variant: Variant::Plain,
            method: MethodChoice::MonteCarlo,
        };
        let a = measure_gap_decay(&cfg).unwrap();
        let b = measure_gap_decay(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.points[0].walker_lifespan, 4);
        assert_eq!(a.points[0].total, 8);
    }

    #[test]
    fn grid_points_are_independent_of_the_grid() {
        let mut cfg = GapDecayConfig {
            n: 15,
            p: 0.4,
            k: 3,
            c_grid: vec![0.02, 0.01, 0.05],
            replicas: 200,
            seed: 8,
            graph_seed: 1,
            variant: Variant::Lazy,
            method: MethodChoice::MonteCarlo,
        };
        let full = measure_gap_decay(&cfg).unwrap();
        assert_eq!(full.points.iter().map(|p| p.c).collect::<Vec<_>>(), vec![0.01, 0.02, 0.05]);
        cfg.c_grid = vec![0.02];
        let alone = measure_gap_decay(&cfg).unwrap();
        assert_eq!(alone.points[0], full.points[1]);
    }

    #[test]
    fn exact_method_adjusts_parity() {
        let cfg = GapDecayConfig {
            n: 10,
            p: 0.5,
            k: 3,
            c_grid: vec![0.01, 0.03],
            replicas: 1,
            seed: 0,
            graph_seed: 2,
            variant: Variant::Plain,
            method: MethodChoice::Exact,
        };
        let curve = measure_gap_decay(&cfg).unwrap();
        assert_eq!(curve.method, "exact");
        // c = 0.01: t = 1 per walker, total 3 is odd and becomes 4.
        assert_eq!(curve.points[0].total, 4);
        assert_eq!(curve.points[1].total, 9 + 1);
        assert!(curve.points.iter().all(|p| p.gap >= -1e-9 && p.gap_se == 0.0));
    }
}
