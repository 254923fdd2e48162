//! Distributional comparison of `|∪R_i(t_i)|` under `π^k` with `|R(Σt_i)|`
//! under `π`. Exploratory only.

use crate::chain::TransitionKernel;
use crate::error::{Error, Result};
use crate::scheme::StartScheme;
use crate::simulate::{cdf_at, cdf_of, estimate, EmpiricalCdf, WalkJob};
use crate::survival::brute_force_distribution;

#[derive(Debug, Clone, PartialEq)]
pub struct DominanceReport {
    pub multi: EmpiricalCdf,
    pub single: EmpiricalCdf,
    /// `max(0, sup_y F_multi(y) − F_single(y))`; zero when the multi-walker
    /// count dominates.
    pub max_crossing: f64,
}

/// Largest excess of `multi` over `single`, over the union of both supports.
pub fn max_crossing(multi: &[(u32, f64)], single: &[(u32, f64)]) -> f64 {
    multi
        .iter()
        .chain(single)
        .map(|&(y, _)| cdf_at(multi, y as f64) - cdf_at(single, y as f64))
        .fold(0.0, f64::max)
}

/// Empirical CDFs from `replicas` runs of each side under one seed.
pub fn dominance_scan(
    kernel: &TransitionKernel,
    lifespans: &[f64],
    replicas: u64,
    seed: u64,
) -> Result<DominanceReport> {
    if lifespans.is_empty() {
        return Err(Error::InvalidScheme("at least one walker is required".into()));
    }
    let k = lifespans.len();
    let total: f64 = lifespans.iter().sum();
    let multi = WalkJob::new(kernel, StartScheme::iid_stationary(kernel, k), lifespans.to_vec(), replicas, seed)?
        .retaining_samples();
    let single = WalkJob::new(kernel, StartScheme::iid_stationary(kernel, 1), vec![total], replicas, seed)?
        .retaining_samples();
    let multi = cdf_of(estimate(&multi)?.samples.as_deref().unwrap_or_default());
    let single = cdf_of(estimate(&single)?.samples.as_deref().unwrap_or_default());
    let max_crossing = max_crossing(&multi, &single);
    Ok(DominanceReport {
        multi,
        single,
        max_crossing,
    })
}

fn cdf_from_distribution(dist: &[f64]) -> EmpiricalCdf {
    let mut running = 0.0;
    dist.iter()
        .enumerate()
        .filter(|&(_, &p)| p > 0.0)
        .map(|(m, &p)| {
            running += p;
            (m as u32, running)
        })
        .collect()
}

/// Exact CDFs by trajectory enumeration, within the oracle's size limits.
pub fn exact_dominance(kernel: &TransitionKernel, lifespans: &[u64]) -> Result<DominanceReport> {
    if lifespans.is_empty() {
        return Err(Error::InvalidScheme("at least one walker is required".into()));
    }
    let k = lifespans.len();
    let total: u64 = lifespans.iter().sum();
    let multi = brute_force_distribution(kernel, &StartScheme::iid_stationary(kernel, k), lifespans)?;
    let single = brute_force_distribution(kernel, &StartScheme::iid_stationary(kernel, 1), &[total])?;
    let multi = cdf_from_distribution(&multi);
    let single = cdf_from_distribution(&single);
    let max_crossing = max_crossing(&multi, &single);
    Ok(DominanceReport {
        multi,
        single,
        max_crossing,
    })
}
