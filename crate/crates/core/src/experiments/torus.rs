//! Three walkers from the origin of a `d`-dimensional torus against one
//! walker of the combined lifespan.

use super::{InequalityKind, InequalityReport, Method};
use crate::chain::{TransitionKernel, Variant};
use crate::error::{Error, Result};
use crate::network::Network;
use crate::simulate::{estimate, WalkJob};
use crate::scheme::StartScheme;

#[derive(Debug, Clone, PartialEq)]
pub struct TorusConfig {
    pub dim: usize,
    pub side: usize,
    /// Lifespan of the first walker; `⌈c0 · n² · ln n⌉` when unset.
    pub t1: Option<u64>,
    pub t2: u64,
    pub t3: u64,
    pub c0: f64,
    pub replicas: u64,
    pub seed: u64,
    pub variant: Variant,
}

impl TorusConfig {
    pub fn new(dim: usize, side: usize, replicas: u64, seed: u64) -> Self {
        let n2 = (side * side) as u64;
        TorusConfig {
            dim,
            side,
            t1: None,
            t2: n2,
            t3: n2,
            c0: 10.0,
            replicas,
            seed,
            variant: Variant::Lazy,
        }
    }

    pub fn resolved_t1(&self) -> u64 {
        self.t1.unwrap_or_else(|| {
            let n = self.side as f64;
            (self.c0 * n * n * n.ln()).ceil() as u64
        })
    }
}

/// Monte Carlo `E_0|R_1(t_1) ∪ R_2(t_2) ∪ R_3(t_3)|` against
/// `E_0|R(t_1 + t_2 + t_3)|`. Both sides share the seed.
pub fn torus_star_vs_single(cfg: &TorusConfig) -> Result<InequalityReport> {
    if cfg.dim < 3 {
        return Err(Error::InvalidDimension(cfg.dim));
    }
    let net = Network::torus(cfg.dim, cfg.side)?;
    let kernel = TransitionKernel::with_variant(&net, cfg.variant);
    let t1 = cfg.resolved_t1();
    let lifespans = vec![t1 as f64, cfg.t2 as f64, cfg.t3 as f64];
    let total = t1 + cfg.t2 + cfg.t3;
    let multi = estimate(&WalkJob::new(
        &kernel,
        StartScheme::FixedPoints(vec![0; 3]),
        lifespans.clone(),
        cfg.replicas,
        cfg.seed,
    )?)?;
    let single = estimate(&WalkJob::new(
        &kernel,
        StartScheme::FixedPoints(vec![0]),
        vec![total as f64],
        cfg.replicas,
        cfg.seed,
    )?)?;
    let n = cfg.side as f64;
    let mut report = InequalityReport::exact(
        InequalityKind::TorusStarVsSingle,
        cfg.variant,
        &lifespans,
        multi.mean,
        single.mean,
    )
    .on_graph(format!("torus:{},{}", cfg.dim, cfg.side))
    .with_note("t1_over_n2logn", t1 as f64 / (n * n * n.ln()))
    .with_note("c0", cfg.c0);
    report.method = Method::MonteCarlo {
        lhs_se: multi.std_error,
        rhs_se: single.std_error,
        replicas: cfg.replicas,
    };
    report.seed = Some(cfg.seed);
    let within = report.holds();
    Ok(report.with_note("within_4se", within))
}
