//! Exhaustive trajectory enumeration for tiny instances.
//!
//! Walkers are enumerated one after another: every start configuration and
//! every step sequence is visited, and the union size is read off a visited
//! bitmask at the end. Suffixes that share (walker, position, steps left,
//! visited set, relevant start history) are summed once and reused. Nothing
//! here touches hitting times, so it checks the survival engines from the
//! outside.

use std::collections::HashMap;

use crate::chain::TransitionKernel;
use crate::error::{Error, Result};
use crate::scheme::StartScheme;

pub const ORACLE_MAX_VERTICES: usize = 6;
pub const ORACLE_MAX_WALKERS: usize = 3;
pub const ORACLE_MAX_TOTAL_TIME: u64 = 10;

/// Exact law of `|∪ R_i(t_i)|`: entry `m` is the probability of `m` vertices.
pub fn brute_force_distribution(
    kernel: &TransitionKernel,
    scheme: &StartScheme,
    lifespans: &[u64],
) -> Result<Vec<f64>> {
    let n = kernel.vertex_count();
    let k = lifespans.len();
    if !kernel.variant().is_discrete() {
        return Err(Error::WrongVariant {
            expected: "discrete (plain or lazy)",
            found: kernel.variant().name(),
        });
    }
    let total: u64 = lifespans.iter().sum();
    if n > ORACLE_MAX_VERTICES || k > ORACLE_MAX_WALKERS || total > ORACLE_MAX_TOTAL_TIME {
        return Err(Error::TooLarge(format!(
            "n={n}, k={k}, total time {total} (limits {ORACLE_MAX_VERTICES}, {ORACLE_MAX_WALKERS}, {ORACLE_MAX_TOTAL_TIME})"
        )));
    }
    scheme.validate(n, k)?;
    let mut enumerator = Enumerator::new(kernel, scheme, lifespans);
    Ok(enumerator.start(0, 0, 0))
}

/// Exact `E|∪ R_i(t_i)|` by enumeration.
pub fn brute_force_oracle(kernel: &TransitionKernel, scheme: &StartScheme, lifespans: &[u64]) -> Result<f64> {
    let dist = brute_force_distribution(kernel, scheme, lifespans)?;
    Ok(dist.iter().enumerate().map(|(m, p)| m as f64 * p).sum())
}

struct Enumerator<'a> {
    kernel: &'a TransitionKernel,
    scheme: &'a StartScheme,
    lifespans: &'a [u64],
    n: usize,
    /// Coupling marginals of the first `j` coordinates, `prefix_mass[j][cell]`.
    prefix_mass: Vec<Vec<f64>>,
    walk_memo: HashMap<(usize, usize, u64, u32, usize), Vec<f64>>,
    start_memo: HashMap<(usize, u32, usize), Vec<f64>>,
}

impl<'a> Enumerator<'a> {
    fn new(kernel: &'a TransitionKernel, scheme: &'a StartScheme, lifespans: &'a [u64]) -> Self {
        let n = kernel.vertex_count();
        let k = lifespans.len();
        let mut prefix_mass = Vec::new();
        if let StartScheme::Coupling(c) = scheme {
            prefix_mass = vec![Vec::new(); k + 1];
            prefix_mass[k] = c.table().to_vec();
            for j in (0..k).rev() {
                let width = n.pow(j as u32);
                let mut mass = vec![0.0; width];
                for (cell, &w) in prefix_mass[j + 1].iter().enumerate() {
                    mass[cell % width] += w;
                }
                prefix_mass[j] = mass;
            }
        }
        Enumerator {
            kernel,
            scheme,
            lifespans,
            n,
            prefix_mass,
            walk_memo: HashMap::new(),
            start_memo: HashMap::new(),
        }
    }

    /// Law of walker `i`'s start given the encoded history `prefix`.
    fn start_weights(&self, i: usize, prefix: usize) -> Vec<(usize, f64)> {
        let n = self.n;
        match self.scheme {
            StartScheme::IidProduct(measures) => measures[i].iter().copied().enumerate().collect(),
            StartScheme::SharedPoint(nu) if i == 0 => nu.iter().copied().enumerate().collect(),
            StartScheme::SharedPoint(_) => vec![(prefix, 1.0)],
            StartScheme::FixedPoints(points) => vec![(points[i], 1.0)],
            StartScheme::Coupling(_) => {
                let base = self.prefix_mass[i][prefix];
                let width = n.pow(i as u32);
                (0..n)
                    .map(|x| {
                        let joint = self.prefix_mass[i + 1][prefix + x * width];
                        (x, if base > 0.0 { joint / base } else { 0.0 })
                    })
                    .collect()
            }
        }
        .into_iter()
        .filter(|&(_, w)| w > 0.0)
        .collect()
    }

    /// History carried forward after walker `i` starts at `x`.
    fn extend_prefix(&self, i: usize, prefix: usize, x: usize) -> usize {
        match self.scheme {
            StartScheme::SharedPoint(_) if i == 0 => x,
            StartScheme::Coupling(_) => prefix + x * self.n.pow(i as u32),
            _ => prefix,
        }
    }

    fn terminal(&self, visited: u32) -> Vec<f64> {
        let mut dist = vec![0.0; self.n + 1];
        dist[visited.count_ones() as usize] = 1.0;
        dist
    }

    fn start(&mut self, i: usize, visited: u32, prefix: usize) -> Vec<f64> {
        if i == self.lifespans.len() {
            return self.terminal(visited);
        }
        if let Some(hit) = self.start_memo.get(&(i, visited, prefix)) {
            return hit.clone();
        }
        let mut acc = vec![0.0; self.n + 1];
        for (x, w) in self.start_weights(i, prefix) {
            let next_prefix = self.extend_prefix(i, prefix, x);
            let sub = self.walk(i, x, self.lifespans[i], visited | (1 << x), next_prefix);
            for (a, b) in acc.iter_mut().zip(&sub) {
                *a += w * b;
            }
        }
        self.start_memo.insert((i, visited, prefix), acc.clone());
        acc
    }

    fn walk(&mut self, i: usize, pos: usize, steps: u64, visited: u32, prefix: usize) -> Vec<f64> {
        if steps == 0 {
            return self.start(i + 1, visited, prefix);
        }
        let key = (i, pos, steps, visited, prefix);
        if let Some(hit) = self.walk_memo.get(&key) {
            return hit.clone();
        }
        let mut acc = vec![0.0; self.n + 1];
        let kernel = self.kernel;
        for &(y, p) in kernel.row(pos) {
            let sub = self.walk(i, y, steps - 1, visited | (1 << y), prefix);
            for (a, b) in acc.iter_mut().zip(&sub) {
                *a += p * b;
            }
        }
        self.walk_memo.insert(key, acc.clone());
        acc
    }
}
