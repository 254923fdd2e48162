//! Expected size of the union of ranges, via `E|∪R_i| = n − Σ_y P(no walker hits y)`.

use rayon::prelude::*;

use super::survival_by_start;
use crate::chain::TransitionKernel;
use crate::error::{Error, Result};
use crate::scheme::{point_mass, validate_measure, Coupling, StartScheme};

/// Distinct lifespans and, per walker, the index of its lifespan.
fn distinct_times(lifespans: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut times: Vec<f64> = Vec::new();
    let slots = lifespans
        .iter()
        .map(|&t| match times.iter().position(|&u| u.to_bits() == t.to_bits()) {
            Some(i) => i,
            None => {
                times.push(t);
                times.len() - 1
            }
        })
        .collect();
    (times, slots)
}

/// `n − Σ_y f(y)` with `f` evaluated per target in parallel and summed in
/// ascending `y`.
fn complement_sum<F>(kernel: &TransitionKernel, lifespans: &[f64], per_target: F) -> Result<f64>
where
    F: Fn(&[Vec<f64>], &[usize]) -> f64 + Sync,
{
    if lifespans.is_empty() {
        return Err(Error::InvalidScheme("at least one walker is required".into()));
    }
    let n = kernel.vertex_count();
    let (times, slots) = distinct_times(lifespans);
    let vacant: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|y| survival_by_start(kernel, y, &times).map(|profile| per_target(&profile, &slots)))
        .collect::<Result<_>>()?;
    Ok(n as f64 - vacant.iter().sum::<f64>())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `E_{ν_1,…,ν_k} |∪ R_i(t_i)|` for independent starts.
pub fn expected_union_product(
    kernel: &TransitionKernel,
    measures: &[Vec<f64>],
    lifespans: &[f64],
) -> Result<f64> {
    if measures.len() != lifespans.len() {
        return Err(Error::InvalidScheme(format!(
            "{} start measures for {} lifespans",
            measures.len(),
            lifespans.len()
        )));
    }
    let n = kernel.vertex_count();
    for nu in measures {
        validate_measure(nu, n)?;
    }
    complement_sum(kernel, lifespans, |profile, slots| {
        measures
            .iter()
            .zip(slots)
            .map(|(nu, &s)| dot(nu, &profile[s]))
            .product()
    })
}

/// `E_ν |R(t)|` for a single walker.
pub fn expected_range_single(kernel: &TransitionKernel, nu: &[f64], t: f64) -> Result<f64> {
    expected_union_product(kernel, &[nu.to_vec()], &[t])
}

/// All walkers start at one point `x ∼ ν`:
/// `n − Σ_y Σ_x ν(x) Π_i P_x(τ(y) > t_i)`.
pub fn expected_union_star(kernel: &TransitionKernel, nu: &[f64], lifespans: &[f64]) -> Result<f64> {
    validate_measure(nu, kernel.vertex_count())?;
    complement_sum(kernel, lifespans, |profile, slots| {
        nu.iter()
            .enumerate()
            .filter(|&(_, &w)| w != 0.0)
            .map(|(x, &w)| w * slots.iter().map(|&s| profile[s][x]).product::<f64>())
            .sum()
    })
}

/// Starts drawn jointly from an explicit coupling `μ` on `V^k`.
pub fn expected_union_coupled(
    kernel: &TransitionKernel,
    coupling: &Coupling,
    lifespans: &[f64],
) -> Result<f64> {
    let n = kernel.vertex_count();
    if coupling.vertex_count() != n || coupling.walkers() != lifespans.len() {
        return Err(Error::InvalidScheme(format!(
            "coupling over {}^{} does not match {n} vertices and {} walkers",
            coupling.vertex_count(),
            coupling.walkers(),
            lifespans.len()
        )));
    }
    let support: Vec<(usize, f64)> = coupling
        .table()
        .iter()
        .copied()
        .enumerate()
        .filter(|&(_, w)| w != 0.0)
        .collect();
    complement_sum(kernel, lifespans, |profile, slots| {
        let mut coords = vec![0; slots.len()];
        support
            .iter()
            .map(|&(cell, w)| {
                coupling.decode(cell, &mut coords);
                w * coords
                    .iter()
                    .zip(slots)
                    .map(|(&x, &s)| profile[s][x])
                    .product::<f64>()
            })
            .sum()
    })
}

/// Expected union size for any start scheme.
pub fn expected_union(kernel: &TransitionKernel, scheme: &StartScheme, lifespans: &[f64]) -> Result<f64> {
    let n = kernel.vertex_count();
    scheme.validate(n, lifespans.len())?;
    match scheme {
        StartScheme::IidProduct(measures) => expected_union_product(kernel, measures, lifespans),
        StartScheme::SharedPoint(nu) => expected_union_star(kernel, nu, lifespans),
        StartScheme::FixedPoints(points) => {
            let measures: Vec<Vec<f64>> = points.iter().map(|&x| point_mass(n, x)).collect();
            expected_union_product(kernel, &measures, lifespans)
        }
        StartScheme::Coupling(c) => expected_union_coupled(kernel, c, lifespans),
    }
}
