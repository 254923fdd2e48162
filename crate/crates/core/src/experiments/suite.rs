//! The small verification suite: named graphs, variants, lifespan grids and
//! runners that evaluate every inequality over all of them.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::{
    checkerboard_coupling, max_dependent_deviation, max_independent_deviation, odd_case_scan,
    perturb_renormalized, shift_mass, verify_near_uniform_dependent, verify_near_uniform_independent,
    verify_one_vs_many, verify_star_vs_iid, InequalityReport,
};
use crate::chain::{TransitionKernel, Variant};
use crate::error::{Error, Result};
use crate::network::Network;
use crate::scheme::{normalize, point_mass, uniform};

/// Largest total lifespan on the suite grids.
pub const SUITE_MAX_TOTAL: u64 = 12;

/// Coupling strength used for the dependent-start suite.
pub const SUITE_EPSILON: f64 = 0.5;

/// Pinned `G(n, p)` samples as `(n, p, seed)`.
pub const SUITE_GNP: [(usize, f64, u64); 5] = [(5, 0.6, 1), (6, 0.5, 2), (7, 0.4, 3), (8, 0.35, 4), (8, 0.5, 5)];

/// Which chain variants a suite run covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteCase {
    Lazy,
    Continuous,
    Plain,
    All,
}

impl SuiteCase {
    pub fn variants(self) -> &'static [Variant] {
        match self {
            SuiteCase::Lazy => &[Variant::Lazy],
            SuiteCase::Continuous => &[Variant::ContinuousTime],
            SuiteCase::Plain => &[Variant::Plain],
            SuiteCase::All => &[Variant::Lazy, Variant::ContinuousTime, Variant::Plain],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SuiteCase::Lazy => "lazy",
            SuiteCase::Continuous => "continuous",
            SuiteCase::Plain => "plain",
            SuiteCase::All => "all",
        }
    }
}

impl fmt::Display for SuiteCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SuiteCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lazy" => Ok(SuiteCase::Lazy),
            "continuous" | "continuous-time" | "ct" => Ok(SuiteCase::Continuous),
            "plain" => Ok(SuiteCase::Plain),
            "all" => Ok(SuiteCase::All),
            other => Err(Error::Unrecognized(other.to_string())),
        }
    }
}

/// Named suite graphs, each name a generator spec understood by the CLI.
pub fn small_suite_graphs() -> Result<Vec<(String, Network)>> {
    let mut graphs = Vec::new();
    for n in 2..=5 {
        graphs.push((format!("complete:{n}"), Network::complete(n)?));
    }
    for n in 3..=6 {
        graphs.push((format!("cycle:{n}"), Network::cycle(n)?));
    }
    for n in 2..=6 {
        graphs.push((format!("path:{n}"), Network::path(n)?));
    }
    graphs.push(("torus:1,4".to_string(), Network::torus(1, 4)?));
    graphs.push(("torus:2,3".to_string(), Network::torus(2, 3)?));
    for (n, p, seed) in SUITE_GNP {
        graphs.push((format!("gnp:{n},{p},{seed}"), Network::gnp(n, p, seed)?));
    }
    Ok(graphs)
}

/// Variants of `case` that satisfy the standing assumptions on `net`:
/// plain chains are skipped on bipartite graphs.
pub fn suite_variants(net: &Network, case: SuiteCase) -> Vec<Variant> {
    case.variants()
        .iter()
        .copied()
        .filter(|&v| v != Variant::Plain || !net.is_bipartite())
        .collect()
}

fn nondecreasing_tuples(k: usize, max_total: u64) -> Vec<Vec<u64>> {
    fn extend(prefix: &mut Vec<u64>, k: usize, budget: u64, out: &mut Vec<Vec<u64>>) {
        if prefix.len() == k {
            out.push(prefix.clone());
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
    extend(&mut Vec::new(), k, max_total, &mut out);
    out
}

/// Lifespan tuples for `k` walkers: nondecreasing integer tuples with total
/// at most [`SUITE_MAX_TOTAL`] (even totals only for plain chains), plus
/// fractional tuples for continuous time.
pub fn lifespan_grid(variant: Variant, k: usize) -> Vec<Vec<f64>> {
    let mut grid: Vec<Vec<f64>> = nondecreasing_tuples(k, SUITE_MAX_TOTAL)
        .into_iter()
        .filter(|t| variant != Variant::Plain || t.iter().sum::<u64>() % 2 == 0)
        .map(|t| t.into_iter().map(|x| x as f64).collect())
        .collect();
    if variant == Variant::ContinuousTime {
        let fractional: &[f64] = &[0.25, 0.5, 1.5, 2.75, 4.2];
        for (i, &a) in fractional.iter().enumerate() {
            let mut tuple = vec![a; k];
            tuple[k - 1] = fractional[(i + 2) % fractional.len()];
            grid.push(tuple);
        }
    }
    grid
}

/// Equal-lifespan values for `k` walkers on the star grid.
fn equal_lifespans(variant: Variant, k: usize) -> Vec<f64> {
    let mut times: Vec<f64> = (0..=SUITE_MAX_TOTAL / k as u64).map(|t| t as f64).collect();
    if variant == Variant::ContinuousTime {
        times.extend([0.5, 1.25, 3.7]);
    }
    times
}

struct Point<'a> {
    graph: &'a str,
    kernel: TransitionKernel,
}

fn kernels<'a>(graphs: &'a [(String, Network)], variants: impl Fn(&Network) -> Vec<Variant>) -> Vec<Point<'a>> {
    graphs
        .iter()
        .flat_map(|(name, net)| {
            variants(net).into_iter().map(move |v| Point {
                graph: name,
                kernel: TransitionKernel::with_variant(net, v),
            })
        })
        .collect()
}

/// Runs `eval` on every `(kernel, lifespans)` pair in parallel, keeping
/// suite order.
fn run<F>(points: &[Point<'_>], grid: impl Fn(&Point<'_>) -> Vec<Vec<f64>>, eval: F) -> Result<Vec<InequalityReport>>
where
    F: Fn(&Point<'_>, &[f64]) -> Result<Vec<InequalityReport>> + Sync,
{
    let jobs: Vec<(usize, Vec<f64>)> = points
        .iter()
        .enumerate()
        .flat_map(|(i, p)| grid(p).into_iter().map(move |t| (i, t)))
        .collect();
    let batches = jobs
        .par_iter()
        .map(|(i, t)| {
            let p = &points[*i];
            eval(p, t).map(|rs| rs.into_iter().map(|r| r.on_graph(p.graph)).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(batches.into_iter().flatten().collect())
}

fn walker_grid(p: &Point<'_>) -> Vec<Vec<f64>> {
    let v = p.kernel.variant();
    [2, 3].iter().flat_map(|&k| lifespan_grid(v, k)).collect()
}

pub fn suite_one_vs_many(graphs: &[(String, Network)], case: SuiteCase) -> Result<Vec<InequalityReport>> {
    let points = kernels(graphs, |net| suite_variants(net, case));
    run(&points, walker_grid, |p, t| {
        Ok(vec![verify_one_vs_many(&p.kernel, t)?.with_note("scheme", "iid-stationary")])
    })
}

/// Start laws for the star-vs-IID comparison: stationary, uniform, a point
/// mass and a skewed law proportional to `x + 1`.
pub fn star_measures(kernel: &TransitionKernel) -> Result<Vec<(&'static str, Vec<f64>)>> {
    let n = kernel.vertex_count();
    let skew: Vec<f64> = (0..n).map(|x| (x + 1) as f64).collect();
    Ok(vec![
        ("stationary", kernel.pi().to_vec()),
        ("uniform", uniform(n)),
        ("point:0", point_mass(n, 0)),
        ("skewed", normalize(&skew)?),
    ])
}

/// Star-vs-IID needs no stationarity or aperiodicity, so every variant runs
/// on every graph.
pub fn suite_star_vs_iid(graphs: &[(String, Network)], case: SuiteCase) -> Result<Vec<InequalityReport>> {
    let points = kernels(graphs, |_| case.variants().to_vec());
    let grid = |p: &Point<'_>| {
        let v = p.kernel.variant();
        [2usize, 3]
            .iter()
            .flat_map(|&k| equal_lifespans(v, k).into_iter().map(move |t| vec![t; k]))
            .collect()
    };
    run(&points, grid, |p, t| {
        star_measures(&p.kernel)?
            .into_iter()
            .map(|(name, nu)| Ok(verify_star_vs_iid(&p.kernel, t.len(), t[0], &nu)?.with_note("nu", name)))
            .collect()
    })
}

fn extreme_vertices(pi: &[f64]) -> (usize, usize) {
    let lo = (0..pi.len()).min_by(|&a, &b| pi[a].total_cmp(&pi[b])).unwrap_or(0);
    let hi = (0..pi.len()).rev().max_by(|&a, &b| pi[a].total_cmp(&pi[b])).unwrap_or(0);
    if lo == hi {
        (0, 1.min(pi.len() - 1))
    } else {
        (lo, hi)
    }
}

/// Start laws at relative distance exactly `bound` from `π`: mass moved from
/// the heaviest to the lightest vertex, then single-vertex rescalings up and
/// down with renormalisation.
pub fn boundary_measures(pi: &[f64], k: usize, bound: f64) -> Result<Vec<Vec<f64>>> {
    let (lo, hi) = extreme_vertices(pi);
    let n = pi.len();
    (0..k)
        .map(|i| match i % 3 {
            0 => shift_mass(pi, lo, hi, bound),
            1 => {
                let v = i % n;
                Ok(perturb_renormalized(pi, v, -bound / (1.0 - pi[v] + bound * pi[v])))
            }
            _ => {
                let v = (n - 1 + i) % n;
                Ok(perturb_renormalized(pi, v, bound / (1.0 - pi[v] - bound * pi[v])))
            }
        })
        .collect()
}

pub fn suite_near_uniform_independent(
    graphs: &[(String, Network)],
    case: SuiteCase,
) -> Result<Vec<InequalityReport>> {
    let points = kernels(graphs, |net| suite_variants(net, case));
    run(&points, walker_grid, |p, t| {
        let bound = max_independent_deviation(&p.kernel, t.len());
        let measures = boundary_measures(p.kernel.pi(), t.len(), bound)?;
        Ok(vec![verify_near_uniform_independent(&p.kernel, t, &measures)?])
    })
}

/// Largest checkerboard amplitude on `{a, b}^k` that keeps the dependence
/// ratio within `(1 − ε)π_*` and all masses nonnegative.
fn checkerboard_amplitude(pi: &[f64], marginals: &[Vec<f64>], a: usize, b: usize, limit: f64) -> f64 {
    let k = marginals.len();
    let mut amplitude = f64::INFINITY;
    for mask in 0u32..(1 << k) {
        let mut scale = 1.0;
        let mut mass = 1.0;
        for (i, nu) in marginals.iter().enumerate() {
            let x = if mask >> i & 1 == 1 { b } else { a };
            scale *= pi[x];
            mass *= nu[x];
        }
        amplitude = amplitude.min(limit * scale).min(mass);
    }
    amplitude
}

pub fn suite_near_uniform_dependent(
    graphs: &[(String, Network)],
    case: SuiteCase,
) -> Result<Vec<InequalityReport>> {
    let points = kernels(graphs, |net| suite_variants(net, case));
    run(&points, walker_grid, |p, t| {
        let k = t.len();
        let pi = p.kernel.pi();
        let marginals = boundary_measures(pi, k, max_dependent_deviation(&p.kernel, k, SUITE_EPSILON))?;
        let (a, b) = extreme_vertices(pi);
        let limit = (1.0 - SUITE_EPSILON) * p.kernel.pi_star();
        let h = checkerboard_amplitude(pi, &marginals, a, b, limit);
        let coupling = checkerboard_coupling(&marginals, a, b, h)?;
        Ok(vec![verify_near_uniform_dependent(&p.kernel, t, &coupling, SUITE_EPSILON)?
            .with_note("amplitude", h)])
    })
}

/// Every verified inequality over the small suite, in suite order.
pub fn run_small_suite(case: SuiteCase) -> Result<Vec<InequalityReport>> {
    let graphs = small_suite_graphs()?;
    let mut reports = suite_one_vs_many(&graphs, case)?;
    reports.extend(suite_star_vs_iid(&graphs, case)?);
    reports.extend(suite_near_uniform_independent(&graphs, case)?);
    reports.extend(suite_near_uniform_dependent(&graphs, case)?);
    Ok(reports)
}

/// Largest vertex count accepted by [`connected_graphs`].
pub const ENUMERATION_MAX_VERTICES: usize = 6;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    fn heap(m: usize, perm: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if m <= 1 {
            out.push(perm.clone());
            return;
        }
        for i in 0..m {
            heap(m - 1, perm, out);
            let j = if m.is_multiple_of(2) { i } else { 0 };
            perm.swap(j, m - 1);
        }
    }
    heap(n, &mut perm, &mut out);
    out
}

/// All connected simple graphs on `n` vertices, one per isomorphism class,
/// with unit conductances.
pub fn connected_graphs(n: usize) -> Result<Vec<Network>> {
    if n == 0 || n > ENUMERATION_MAX_VERTICES {
        return Err(Error::TooLarge(format!(
            "graph enumeration supports 1..={ENUMERATION_MAX_VERTICES} vertices, got {n}"
        )));
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let slot = |u: usize, v: usize| pairs.iter().position(|&p| p == (u.min(v), u.max(v))).unwrap_or(0);
    let perms = permutations(n);
    let relabel: Vec<Vec<usize>> = perms
        .iter()
        .map(|perm| pairs.iter().map(|&(u, v)| slot(perm[u], perm[v])).collect())
        .collect();
    let mut seen = HashSet::new();
    let mut graphs = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let canonical = relabel
            .iter()
            .map(|map| {
                map.iter()
                    .enumerate()
                    .filter(|&(e, _)| mask >> e & 1 == 1)
                    .fold(0u32, |acc, (_, &s)| acc | 1 << s)
            })
            .min()
            .unwrap_or(mask);
        if !seen.insert(canonical) {
            continue;
        }
        let edges = pairs
            .iter()
            .enumerate()
            .filter(|&(e, _)| mask >> e & 1 == 1)
            .map(|(_, &(u, v))| (u, v, 1.0));
        if let Ok(net) = Network::build(n, edges) {
            graphs.push(net);
        }
    }
    Ok(graphs)
}

/// Compact descriptor such as `n4:0-1,1-2,2-3`.
pub fn edge_descriptor(net: &Network) -> String {
    let edges: Vec<String> = net.edges().iter().map(|e| format!("{}-{}", e.u, e.v)).collect();
    format!("n{}:{}", net.vertex_count(), edges.join(","))
}

/// All connected graphs with `2 ≤ n ≤ max_vertices`, named by descriptor.
pub fn all_connected_graphs(max_vertices: usize) -> Result<Vec<(String, Network)>> {
    let mut out = Vec::new();
    for n in 2..=max_vertices {
        for net in connected_graphs(n)? {
            out.push((edge_descriptor(&net), net));
        }
    }
    Ok(out)
}

/// Plain chains, two walkers, odd totals up to 7 over every connected graph
/// with at most five vertices.
pub fn small_odd_scan() -> Result<Vec<InequalityReport>> {
    odd_case_scan(&all_connected_graphs(5)?, 2..=2, 7)
}
