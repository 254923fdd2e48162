//! Exact survival probabilities `P_ν(τ(y) > t)` and expected range sizes.
//!
//! `τ(y)` is the first time `≥ 0` a walk occupies `y`, so a walk started at
//! `y` has already hit it. Survival is evaluated through the grounded kernel
//! (`P` with row and column `y` removed): discrete chains take iterated
//! products with it, continuous-time chains take a Poisson-weighted series of
//! the same products (uniformization).

mod oracle;
mod range;
mod spectral;

pub use oracle::{brute_force_distribution, brute_force_oracle, ORACLE_MAX_TOTAL_TIME};
pub use range::{
    expected_range_single, expected_union, expected_union_coupled, expected_union_product,
    expected_union_star,
};
pub use spectral::{spectral, SpectralDecomposition, ALPHA_SUM_TOL};

use crate::chain::{TransitionKernel, Variant};
use crate::error::{Error, Result};
use crate::scheme::validate_measure;

/// Poisson tail mass below which the uniformization series is truncated.
pub const POISSON_TAIL_TOL: f64 = 1e-12;

/// `P` restricted to `V ∖ {y}`, with reduced indices `0..n−1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundedKernel {
    target: usize,
    n: usize,
    variant: Variant,
    rows: Vec<Vec<(usize, f64)>>,
}

impl GroundedKernel {
    pub fn new(kernel: &TransitionKernel, target: usize) -> Result<Self> {
        let n = kernel.vertex_count();
        if target >= n {
            return Err(Error::BadVertex { vertex: target, n });
        }
        let reduce = |x: usize| if x < target { x } else { x - 1 };
        let rows = (0..n)
            .filter(|&x| x != target)
            .map(|x| {
                kernel
                    .row(x)
                    .iter()
                    .filter(|&&(y, _)| y != target)
                    .map(|&(y, p)| (reduce(y), p))
                    .collect()
            })
            .collect();
        Ok(GroundedKernel {
            target,
            n,
            variant: kernel.variant(),
            rows,
        })
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Size of the reduced state space, `n − 1`.
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduced index of vertex `x`, or `None` for the target.
    pub fn reduced_index(&self, x: usize) -> Option<usize> {
        match x.cmp(&self.target) {
            std::cmp::Ordering::Less => Some(x),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(x - 1),
        }
    }

    /// Original vertex label of reduced index `i`.
    pub fn vertex(&self, i: usize) -> usize {
        if i < self.target {
            i
        } else {
            i + 1
        }
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.rows[i]
            .iter()
            .find(|&&(c, _)| c == j)
            .map_or(0.0, |&(_, p)| p)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        self.rows
            .iter()
            .map(|row| {
                let mut dense = vec![0.0; d];
                for &(j, p) in row {
                    dense[j] = p;
                }
                dense
            })
            .collect()
    }

    /// `ν` restricted to `V ∖ {y}` as a reduced row vector.
    fn restrict(&self, start: &[f64]) -> Result<Vec<f64>> {
        validate_measure(start, self.n)?;
        Ok((0..self.dim()).map(|i| start[self.vertex(i)]).collect())
    }

    /// `out = v Q̂`.
    fn left_multiply(&self, v: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (row, &mass) in self.rows.iter().zip(v) {
            if mass != 0.0 {
                for &(j, p) in row {
                    out[j] += mass * p;
                }
            }
        }
    }
}

/// `P_ν(τ(y) > t)` for a discrete chain by `t` row-vector products with `Q̂`.
pub fn survival_power(g: &GroundedKernel, start: &[f64], t: u64) -> Result<f64> {
    if !g.variant.is_discrete() {
        return Err(Error::WrongVariant {
            expected: "discrete (plain or lazy)",
            found: g.variant.name(),
        });
    }
    let mut v = g.restrict(start)?;
    let mut next = vec![0.0; v.len()];
    for _ in 0..t {
        g.left_multiply(&v, &mut next);
        std::mem::swap(&mut v, &mut next);
    }
    Ok(v.iter().sum())
}

/// Truncation depth of the uniformization series at time `t`.
///
/// Smallest `m` whose Poisson(`t`) tail beyond `m` is below
/// [`POISSON_TAIL_TOL`], capped at `10 (t + 10)`.
pub fn uniformization_depth(t: f64) -> usize {
    let cap = (10.0 * (t + 10.0)).ceil() as usize;
    let mut covered = 0.0;
    for (m, w) in poisson_weights(t).enumerate() {
        covered += w;
        if 1.0 - covered < POISSON_TAIL_TOL || m >= cap {
            return m;
        }
    }
    cap
}

/// Poisson(`t`) probabilities `e^{−t} t^m / m!`, computed in log space.
pub fn poisson_weights(t: f64) -> impl Iterator<Item = f64> {
    let log_t = if t > 0.0 { t.ln() } else { f64::NEG_INFINITY };
    (0u64..).scan(-t, move |log_w, m| {
        if m > 0 {
            *log_w += log_t - (m as f64).ln();
        }
        Some(if t == 0.0 {
            if m == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            log_w.exp()
        })
    })
}

/// `P_ν(τ(y) > t)` for a continuous-time chain: `ν exp(t(Q̂ − I)) 1`.
pub fn survival_continuous(g: &GroundedKernel, start: &[f64], t: f64) -> Result<f64> {
    if g.variant != Variant::ContinuousTime {
        return Err(Error::WrongVariant {
            expected: Variant::ContinuousTime.name(),
            found: g.variant.name(),
        });
    }
    check_time(t)?;
    survival_series(g, start, t, uniformization_depth(t))
}

/// Uniformization series truncated after `depth` terms; exposed so tests can
/// compare against deeper truncations.
pub fn survival_series(g: &GroundedKernel, start: &[f64], t: f64, depth: usize) -> Result<f64> {
    let mut v = g.restrict(start)?;
    let mut next = vec![0.0; v.len()];
    let mut total = 0.0;
    for (m, w) in poisson_weights(t).take(depth + 1).enumerate() {
        if m > 0 {
            g.left_multiply(&v, &mut next);
            std::mem::swap(&mut v, &mut next);
        }
        total += w * v.iter().sum::<f64>();
    }
    Ok(total)
}

fn check_time(t: f64) -> Result<()> {
    if t < 0.0 || t.is_nan() {
        Err(Error::NegativeTime(t))
    } else {
        Ok(())
    }
}

/// Validates a time for `variant`; discrete chains need whole steps.
pub fn check_time_for(variant: Variant, t: f64) -> Result<()> {
    check_time(t)?;
    if variant.is_discrete() && (t.fract() != 0.0 || !t.is_finite()) {
        return Err(Error::NonIntegerTime(t));
    }
    Ok(())
}

/// `P_x(τ(y) > t)` for every start `x` and each requested time.
///
/// Returns one length-`n` vector per entry of `times` (entry `y` is 0). The
/// column vectors `Q̂^m 1` are built on full-length arrays with `y` pinned to
/// zero, so no reduced copy of the kernel is made.
pub fn survival_by_start(kernel: &TransitionKernel, y: usize, times: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n = kernel.vertex_count();
    if y >= n {
        return Err(Error::BadVertex { vertex: y, n });
    }
    for &t in times {
        check_time_for(kernel.variant(), t)?;
    }
    let mut u = vec![1.0; n];
    u[y] = 0.0;
    let mut next = vec![0.0; n];
    let step = |u: &[f64], next: &mut [f64]| {
        for (x, slot) in next.iter_mut().enumerate() {
            *slot = if x == y {
                0.0
            } else {
                kernel.row(x).iter().map(|&(z, p)| p * u[z]).sum()
            };
        }
    };
    let mut out = vec![Vec::new(); times.len()];
    match kernel.variant() {
        Variant::Plain | Variant::Lazy => {
            let mut order: Vec<usize> = (0..times.len()).collect();
            order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
            let mut current = 0u64;
            for idx in order {
                let target = times[idx] as u64;
                while current < target {
                    step(&u, &mut next);
                    std::mem::swap(&mut u, &mut next);
                    current += 1;
                }
                out[idx] = u.clone();
            }
        }
        Variant::ContinuousTime => {
            let depths: Vec<usize> = times.iter().map(|&t| uniformization_depth(t)).collect();
            let max_depth = depths.iter().copied().max().unwrap_or(0);
            let mut weights: Vec<Vec<f64>> = times
                .iter()
                .zip(&depths)
                .map(|(&t, &d)| poisson_weights(t).take(d + 1).collect())
                .collect();
            for slot in &mut out {
                *slot = vec![0.0; n];
            }
            for m in 0..=max_depth {
                if m > 0 {
                    step(&u, &mut next);
                    std::mem::swap(&mut u, &mut next);
                }
                for (acc, w) in out.iter_mut().zip(&mut weights) {
                    if let Some(&wm) = w.get(m) {
                        for (a, &b) in acc.iter_mut().zip(&u) {
                            *a += wm * b;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `P_ν(τ(y) > t)` for any variant.
pub fn survival(kernel: &TransitionKernel, start: &[f64], y: usize, t: f64) -> Result<f64> {
    validate_measure(start, kernel.vertex_count())?;
    let profile = survival_by_start(kernel, y, &[t])?;
    Ok(start.iter().zip(&profile[0]).map(|(a, b)| a * b).sum())
}

/// Rows of `(graph distance from y, x, P_x(τ(y) > t))`, sorted by distance.
///
/// Exploration aid for whether hitting probabilities are monotone in
/// distance on vertex-transitive graphs; nothing asserts the ordering.
pub fn survival_by_distance(
    kernel: &TransitionKernel,
    net: &crate::network::Network,
    y: usize,
    t: f64,
) -> Result<Vec<(usize, usize, f64)>> {
    let dist = net.distances_from(y);
    let profile = survival_by_start(kernel, y, &[t])?;
    let mut rows: Vec<_> = (0..kernel.vertex_count())
        .map(|x| (dist[x], x, profile[0][x]))
        .collect();
    rows.sort_by_key(|&(d, x, _)| (d, x));
    Ok(rows)
}
