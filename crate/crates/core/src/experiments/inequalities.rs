use super::{InequalityKind, InequalityReport};
use crate::chain::{TransitionKernel, Variant, BALANCE_TOL};
use crate::error::{Error, Result};
use crate::network::Network;
use crate::scheme::{decode_index, validate_measure, Coupling};
use crate::survival::{
    check_time_for, expected_range_single, expected_union_coupled, expected_union_product,
    expected_union_star,
};

/// Slack on the deviation bounds, absorbing rounding in constructed inputs.
const BOUND_SLACK: f64 = 1e-12;

/// Checks reversibility, aperiodicity and the time-parity case of the
/// one-vs-many family; returns the total lifespan.
fn check_case(kernel: &TransitionKernel, lifespans: &[f64]) -> Result<f64> {
    if lifespans.is_empty() {
        return Err(Error::InvalidScheme("at least one walker is required".into()));
    }
    for &t in lifespans {
        check_time_for(kernel.variant(), t)?;
    }
    let residual = kernel.detailed_balance_residual();
    if residual > BALANCE_TOL {
        return Err(Error::AssumptionViolation(format!(
            "kernel is not reversible (residual {residual:e})"
        )));
    }
    if !kernel.is_aperiodic() {
        return Err(Error::AssumptionViolation(
            "plain kernel on a bipartite graph is periodic".into(),
        ));
    }
    let total: f64 = lifespans.iter().sum();
    if kernel.variant() == Variant::Plain && (total as u64) % 2 == 1 {
        return Err(Error::CaseViolation { total: total as u64 });
    }
    Ok(total)
}

/// `E_{π^k}|∪R_i(t_i)|` against `E_π|R(Σt_i)|`.
pub fn verify_one_vs_many(kernel: &TransitionKernel, lifespans: &[f64]) -> Result<InequalityReport> {
    let total = check_case(kernel, lifespans)?;
    let pi = kernel.pi().to_vec();
    let lhs = expected_union_product(kernel, &vec![pi.clone(); lifespans.len()], lifespans)?;
    let rhs = expected_range_single(kernel, &pi, total)?;
    Ok(InequalityReport::exact(
        InequalityKind::OneVsMany,
        kernel.variant(),
        lifespans,
        lhs,
        rhs,
    ))
}

/// `(1 + π_*)^{1/k} − 1`.
pub fn max_independent_deviation(kernel: &TransitionKernel, k: usize) -> f64 {
    (1.0 + kernel.pi_star()).powf(1.0 / k as f64) - 1.0
}

/// `(1 + ε π_*)^{1/k} − 1`.
pub fn max_dependent_deviation(kernel: &TransitionKernel, k: usize, epsilon: f64) -> f64 {
    (1.0 + epsilon * kernel.pi_star()).powf(1.0 / k as f64) - 1.0
}

fn check_relative_deviation(pi: &[f64], measures: &[Vec<f64>], bound: f64, condition: &str) -> Result<()> {
    for (i, nu) in measures.iter().enumerate() {
        validate_measure(nu, pi.len())?;
        for (x, (&a, &b)) in nu.iter().zip(pi).enumerate() {
            let ratio = (a - b).abs() / b;
            if ratio > bound + BOUND_SLACK {
                return Err(Error::AssumptionViolation(format!(
                    "{condition}: start law {i} at vertex {x} deviates by ratio {ratio} > {bound}"
                )));
            }
        }
    }
    Ok(())
}

/// Independent starts `ν_i` close to `π` in relative terms.
pub fn verify_near_uniform_independent(
    kernel: &TransitionKernel,
    lifespans: &[f64],
    measures: &[Vec<f64>],
) -> Result<InequalityReport> {
    let total = check_case(kernel, lifespans)?;
    if measures.len() != lifespans.len() {
        return Err(Error::InvalidScheme(format!(
            "{} start laws for {} walkers",
            measures.len(),
            lifespans.len()
        )));
    }
    let bound = max_independent_deviation(kernel, lifespans.len());
    check_relative_deviation(kernel.pi(), measures, bound, "marginal deviation")?;
    let lhs = expected_union_product(kernel, measures, lifespans)?;
    let rhs = expected_range_single(kernel, kernel.pi(), total)?;
    Ok(InequalityReport::exact(
        InequalityKind::NearUniformIndependent,
        kernel.variant(),
        lifespans,
        lhs,
        rhs,
    )
    .with_note("deviation_bound", bound))
}

/// Jointly coupled starts whose marginals and dependence are both small
/// perturbations of `π^k`.
pub fn verify_near_uniform_dependent(
    kernel: &TransitionKernel,
    lifespans: &[f64],
    coupling: &Coupling,
    epsilon: f64,
) -> Result<InequalityReport> {
    let total = check_case(kernel, lifespans)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::AssumptionViolation(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    let k = lifespans.len();
    let n = kernel.vertex_count();
    if coupling.walkers() != k || coupling.vertex_count() != n {
        return Err(Error::InvalidScheme(format!(
            "coupling over {}^{} does not match {n} vertices and {k} walkers",
            coupling.vertex_count(),
            coupling.walkers()
        )));
    }
    let pi = kernel.pi();
    let marginal_bound = max_dependent_deviation(kernel, k, epsilon);
    check_relative_deviation(pi, coupling.marginals(), marginal_bound, "marginal deviation")?;

    let coupling_bound = (1.0 - epsilon) * kernel.pi_star();
    let mut coords = vec![0; k];
    for (cell, &mass) in coupling.table().iter().enumerate() {
        decode_index(cell, n, &mut coords);
        let product: f64 = coords
            .iter()
            .zip(coupling.marginals())
            .map(|(&x, nu)| nu[x])
            .product();
        let scale: f64 = coords.iter().map(|&x| pi[x]).product();
        let ratio = (mass - product).abs() / scale;
        if ratio > coupling_bound + BOUND_SLACK {
            return Err(Error::AssumptionViolation(format!(
                "coupling dependence at {coords:?}: ratio {ratio} > {coupling_bound}"
            )));
        }
    }
    let lhs = expected_union_coupled(kernel, coupling, lifespans)?;
    let rhs = expected_range_single(kernel, pi, total)?;
    Ok(InequalityReport::exact(
        InequalityKind::NearUniformDependent,
        kernel.variant(),
        lifespans,
        lhs,
        rhs,
    )
    .with_note("epsilon", epsilon))
}

/// `k` walkers from independent `ν` draws against `k` walkers from one
/// shared `ν` draw, all with lifespan `t`.
pub fn verify_star_vs_iid(kernel: &TransitionKernel, k: usize, t: f64, nu: &[f64]) -> Result<InequalityReport> {
    if k == 0 {
        return Err(Error::InvalidScheme("at least one walker is required".into()));
    }
    let lifespans = vec![t; k];
    let lhs = expected_union_product(kernel, &vec![nu.to_vec(); k], &lifespans)?;
    let rhs = expected_union_star(kernel, nu, &lifespans)?;
    Ok(InequalityReport::exact(
        InequalityKind::StarVsIid,
        kernel.variant(),
        &lifespans,
        lhs,
        rhs,
    ))
}

/// Nondecreasing `k`-tuples with odd sum at most `max_total`.
fn odd_tuples(k: usize, max_total: u64) -> Vec<Vec<u64>> {
    fn extend(prefix: &mut Vec<u64>, k: usize, budget: u64, out: &mut Vec<Vec<u64>>) {
        if prefix.len() == k {
            if prefix.iter().sum::<u64>() % 2 == 1 {
                out.push(prefix.clone());
            }
            return;
        }
        let low = prefix.last().copied().unwrap_or(0);
        for t in low..=budget {
            prefix.push(t);
            extend(prefix, k, budget - t, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if k > 0 {
        extend(&mut Vec::new(), k, max_total, &mut out);
    }
    out
}

/// Plain-chain one-vs-many gaps at odd total lifespan. Reported only: the
/// inequality is not known to hold here.
pub fn odd_case_scan(
    graphs: &[(String, Network)],
    walkers: std::ops::RangeInclusive<usize>,
    max_total: u64,
) -> Result<Vec<InequalityReport>> {
    let mut reports = Vec::new();
    for (name, net) in graphs {
        let kernel = TransitionKernel::from_network(net);
        let pi = kernel.pi().to_vec();
        for k in walkers.clone() {
            for tuple in odd_tuples(k, max_total) {
                let lifespans: Vec<f64> = tuple.iter().map(|&t| t as f64).collect();
                let total: f64 = lifespans.iter().sum();
                let lhs = expected_union_product(&kernel, &vec![pi.clone(); k], &lifespans)?;
                let rhs = expected_range_single(&kernel, &pi, total)?;
                reports.push(
                    InequalityReport::exact(InequalityKind::OddCaseScan, Variant::Plain, &lifespans, lhs, rhs)
                        .on_graph(name.clone())
                        .with_note("bipartite", net.is_bipartite()),
                );
            }
        }
    }
    Ok(reports)
}

/// `π` with mass at `vertex` scaled by `1 + delta`, then renormalised.
pub fn perturb_renormalized(pi: &[f64], vertex: usize, delta: f64) -> Vec<f64> {
    let mut nu = pi.to_vec();
    nu[vertex] *= 1.0 + delta;
    let total: f64 = nu.iter().sum();
    nu.iter().map(|w| w / total).collect()
}

/// Moves `delta · π(gain)` of mass from `lose` to `gain`.
///
/// The relative deviation is exactly `delta` at `gain` and
/// `delta · π(gain) / π(lose)` at `lose`, so the result sits on the
/// admissible boundary whenever `π(gain) ≤ π(lose)`.
pub fn shift_mass(pi: &[f64], gain: usize, lose: usize, delta: f64) -> Result<Vec<f64>> {
    let moved = delta * pi[gain];
    if moved > pi[lose] {
        return Err(Error::InvalidMeasure(format!(
            "cannot move {moved} from vertex {lose} holding {}",
            pi[lose]
        )));
    }
    let mut nu = pi.to_vec();
    nu[gain] += moved;
    nu[lose] -= moved;
    Ok(nu)
}

/// `⊗ν_i` plus `±h` on the `2^k` cells with every coordinate in `{a, b}`,
/// signed by the parity of `b` coordinates. Marginals are unchanged.
pub fn checkerboard_coupling(marginals: &[Vec<f64>], a: usize, b: usize, h: f64) -> Result<Coupling> {
    let base = Coupling::product(marginals)?;
    let k = marginals.len();
    let mut table = base.table().to_vec();
    let mut coords = vec![0; k];
    for mask in 0u32..(1 << k) {
        for (i, c) in coords.iter_mut().enumerate() {
            *c = if mask >> i & 1 == 1 { b } else { a };
        }
        let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        table[base.encode(&coords)] += sign * h;
    }
    if let Some(w) = table.iter().find(|&&w| w < 0.0) {
        return Err(Error::InvalidMeasure(format!("perturbation leaves negative mass {w}")));
    }
    Coupling::new(base.vertex_count(), k, table, marginals.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{point_mass, uniform};

    fn tri() -> TransitionKernel {
        TransitionKernel::from_network(&Network::cycle(3).unwrap())
    }

    #[test]
    fn triangle_one_vs_many() {
        let r = verify_one_vs_many(&tri(), &[1.0, 1.0]).unwrap();
        assert!((r.lhs - 8.0 / 3.0).abs() < 1e-12);
        assert!((r.rhs - 2.5).abs() < 1e-12);
        assert!((r.gap - 1.0 / 6.0).abs() < 1e-12);
        let r = verify_one_vs_many(&tri(), &[0.0, 0.0]).unwrap();
        assert!((r.lhs - 5.0 / 3.0).abs() < 1e-12);
        assert!((r.rhs - 1.0).abs() < 1e-12);
        assert!((r.gap - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn one_vs_many_case_errors() {
        assert!(matches!(
            verify_one_vs_many(&tri(), &[1.0, 2.0]),
            Err(Error::CaseViolation { total: 3 })
        ));
        let k2 = TransitionKernel::from_network(&Network::complete(2).unwrap());
        assert!(matches!(
            verify_one_vs_many(&k2, &[1.0, 1.0]),
            Err(Error::AssumptionViolation(_))
        ));
        let lazy = k2.make_lazy().unwrap();
        let r = verify_one_vs_many(&lazy, &[1.0, 2.0]).unwrap();
        assert!(r.gap >= -1e-9);
    }

    #[test]
    fn single_walker_gap_is_exactly_zero() {
        let k = TransitionKernel::with_variant(&Network::path(5).unwrap(), Variant::Lazy);
        for t in 0..8 {
            assert_eq!(verify_one_vs_many(&k, &[t as f64]).unwrap().gap, 0.0);
        }
    }

    #[test]
    fn near_uniform_independent() {
        let k = tri().make_lazy().unwrap();
        let bound = max_independent_deviation(&k, 2);
        let nu = perturb_renormalized(k.pi(), 0, bound);
        let r = verify_near_uniform_independent(&k, &[2.0, 3.0], &[nu.clone(), k.pi().to_vec()]).unwrap();
        assert!(r.gap >= -1e-9);
        let stationary = verify_near_uniform_independent(&k, &[2.0, 3.0], &vec![k.pi().to_vec(); 2]).unwrap();
        let plain = verify_one_vs_many(&k, &[2.0, 3.0]).unwrap();
        assert_eq!(stationary.gap, plain.gap);
        let bad = perturb_renormalized(k.pi(), 0, 4.0 * bound);
        assert!(matches!(
            verify_near_uniform_independent(&k, &[2.0, 3.0], &[bad, nu]),
            Err(Error::AssumptionViolation(_))
        ));
    }

    #[test]
    fn shift_mass_hits_the_boundary() {
        let pi = [0.25, 0.5, 0.25];
        let nu = shift_mass(&pi, 0, 1, 0.1).unwrap();
        assert!(((nu[0] - pi[0]) / pi[0] - 0.1).abs() < 1e-15);
        assert!((nu.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(shift_mass(&pi, 1, 0, 2.0).is_err());
    }

    #[test]
    fn near_uniform_dependent() {
        let k = TransitionKernel::with_variant(&Network::complete(2).unwrap(), Variant::Lazy);
        let eps = 0.5;
        let product = Coupling::product(&[k.pi().to_vec(), k.pi().to_vec()]).unwrap();
        let r = verify_near_uniform_dependent(&k, &[1.0, 2.0], &product, eps).unwrap();
        assert_eq!(r.gap, verify_one_vs_many(&k, &[1.0, 2.0]).unwrap().gap);

        let h = (1.0 - eps) * k.pi_star() * 0.25;
        let coupled = checkerboard_coupling(&[k.pi().to_vec(), k.pi().to_vec()], 0, 1, h).unwrap();
        let r = verify_near_uniform_dependent(&k, &[1.0, 2.0], &coupled, eps).unwrap();
        assert!(r.gap >= -1e-9);
        assert!(verify_near_uniform_dependent(&k, &[1.0, 2.0], &coupled, 1.0).is_err());

        let k5 = TransitionKernel::with_variant(&Network::complete(5).unwrap(), Variant::Lazy);
        let pi = k5.pi().to_vec();
        let h = 2.0 * k5.pi_star() * pi[0] * pi[1];
        let too_dependent = checkerboard_coupling(&[pi.clone(), pi.clone()], 0, 1, h).unwrap();
        assert!(matches!(
            verify_near_uniform_dependent(&k5, &[1.0, 1.0], &too_dependent, eps),
            Err(Error::AssumptionViolation(_))
        ));
    }

    #[test]
    fn star_vs_iid() {
        let t = tri();
        let r = verify_star_vs_iid(&t, 2, 1.0, t.pi()).unwrap();
        assert!((r.lhs - 8.0 / 3.0).abs() < 1e-12);
        assert!((r.rhs - 2.5).abs() < 1e-12);
        assert!((r.gap - 1.0 / 6.0).abs() < 1e-12);
        let r = verify_star_vs_iid(&t, 3, 2.0, &point_mass(3, 1)).unwrap();
        assert!(r.gap.abs() < 1e-12);
        let r = verify_star_vs_iid(&t, 1, 4.0, &uniform(3)).unwrap();
        assert!(r.gap.abs() < 1e-12);
    }

    #[test]
    fn odd_scan_shapes() {
        assert_eq!(odd_tuples(2, 3), vec![vec![0, 1], vec![0, 3], vec![1, 2]]);
        let graphs = vec![("C3".to_string(), Network::cycle(3).unwrap())];
        let reports = odd_case_scan(&graphs, 2..=2, 3).unwrap();
        assert_eq!(reports.len(), 3);
        let r12 = reports.iter().find(|r| r.lifespans == vec![1.0, 2.0]).unwrap();
        let direct_lhs = expected_union_product(&tri(), &vec![tri().pi().to_vec(); 2], &[1.0, 2.0]).unwrap();
        assert_eq!(r12.lhs, direct_lhs);
        #[allow(clippy::reversed_empty_ranges)]
        let empty = odd_case_scan(&graphs, 3..=2, 5).unwrap();
        assert!(empty.is_empty());
        assert!(odd_case_scan(&[], 2..=3, 5).unwrap().is_empty());
    }
}
