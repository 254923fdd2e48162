//! Reversible transition kernels built from networks.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::network::Network;

/// Tolerance on row sums and detailed balance.
pub const BALANCE_TOL: f64 = 1e-12;

/// Time semantics attached to a kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Discrete steps with `P(x, y) = c(x, y) / c(x)`.
    Plain,
    /// Discrete steps with `½ I + ½ P`.
    Lazy,
    /// Rate-1 exponential clock driving the plain jump kernel.
    ContinuousTime,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Plain => "plain",
            Variant::Lazy => "lazy",
            Variant::ContinuousTime => "continuous",
        }
    }

    pub fn is_discrete(self) -> bool {
        !matches!(self, Variant::ContinuousTime)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Variant::Plain),
            "lazy" => Ok(Variant::Lazy),
            "continuous" | "continuous-time" | "ct" => Ok(Variant::ContinuousTime),
            other => Err(Error::Unrecognized(other.to_string())),
        }
    }
}

/// Row-stochastic reversible kernel with its stationary distribution.
///
/// Rows are stored sparsely (sorted by column, diagonal included for lazy
/// kernels); [`TransitionKernel::entry`] and [`TransitionKernel::to_dense`]
/// give the matrix view. For `ContinuousTime` the rows hold the embedded
/// jump kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionKernel {
    rows: Vec<Vec<(usize, f64)>>,
    pi: Vec<f64>,
    variant: Variant,
    bipartite: bool,
}

impl TransitionKernel {
    /// Plain kernel `c(x, y) / c(x)` with `π(x) = c(x) / Σ c`.
    ///
    /// A one-vertex network yields the trivial kernel `[[1]]`.
    pub fn from_network(net: &Network) -> Self {
        let n = net.vertex_count();
        if n == 1 {
            return TransitionKernel {
                rows: vec![vec![(0, 1.0)]],
                pi: vec![1.0],
                variant: Variant::Plain,
                bipartite: false,
            };
        }
        let total: f64 = net.vertex_weights().iter().sum();
        let rows = (0..n)
            .map(|x| {
                let cx = net.vertex_weight(x);
                net.neighbors(x).iter().map(|&(y, c)| (y, c / cx)).collect()
            })
            .collect();
        let pi = net.vertex_weights().iter().map(|&c| c / total).collect();
        TransitionKernel {
            rows,
            pi,
            variant: Variant::Plain,
            bipartite: net.is_bipartite(),
        }
    }

    /// Network kernel converted to `variant`.
    pub fn with_variant(net: &Network, variant: Variant) -> Self {
        let plain = Self::from_network(net);
        match variant {
            Variant::Plain => plain,
            Variant::Lazy => plain.make_lazy().expect("plain source"),
            Variant::ContinuousTime => plain.make_continuous().expect("plain source"),
        }
    }

    /// `½ I + ½ P`; π is carried over unchanged.
    pub fn make_lazy(&self) -> Result<Self> {
        self.require(Variant::Plain)?;
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(x, row)| {
                let mut lazy: Vec<(usize, f64)> = Vec::with_capacity(row.len() + 1);
                let mut placed = false;
                for &(y, p) in row {
                    if !placed && y >= x {
                        if y == x {
                            lazy.push((x, 0.5 + 0.5 * p));
                            placed = true;
                            continue;
                        }
                        lazy.push((x, 0.5));
                        placed = true;
                    }
                    lazy.push((y, 0.5 * p));
                }
                if !placed {
                    lazy.push((x, 0.5));
                }
                lazy
            })
            .collect();
        Ok(TransitionKernel {
            rows,
            pi: self.pi.clone(),
            variant: Variant::Lazy,
            bipartite: self.bipartite,
        })
    }

    /// Same jump kernel and π, evaluated in continuous time.
    pub fn make_continuous(&self) -> Result<Self> {
        self.require(Variant::Plain)?;
        Ok(TransitionKernel {
            variant: Variant::ContinuousTime,
            ..self.clone()
        })
    }

    /// The plain jump kernel underlying this one.
    pub fn jump_kernel(&self) -> Self {
        match self.variant {
            Variant::Plain => self.clone(),
            Variant::ContinuousTime => TransitionKernel {
                variant: Variant::Plain,
                ..self.clone()
            },
            Variant::Lazy => TransitionKernel {
                rows: self
                    .rows
                    .iter()
                    .enumerate()
                    .map(|(x, row)| {
                        row.iter()
                            .filter_map(|&(y, p)| {
                                let q = if y == x { 2.0 * p - 1.0 } else { 2.0 * p };
                                (q > 0.0).then_some((y, q))
                            })
                            .collect()
                    })
                    .collect(),
                pi: self.pi.clone(),
                variant: Variant::Plain,
                bipartite: self.bipartite,
            },
        }
    }

    pub(crate) fn require(&self, expected: Variant) -> Result<()> {
        if self.variant == expected {
            Ok(())
        } else {
            Err(Error::WrongVariant {
                expected: expected.name(),
                found: self.variant.name(),
            })
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.rows.len()
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    /// Nonzero entries of row `x`, sorted by column.
    pub fn row(&self, x: usize) -> &[(usize, f64)] {
        &self.rows[x]
    }

    pub fn entry(&self, x: usize, y: usize) -> f64 {
        let row = &self.rows[x];
        row.binary_search_by_key(&y, |&(c, _)| c)
            .map(|i| row[i].1)
            .unwrap_or(0.0)
    }

    /// Dense row-major copy of the matrix.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.vertex_count();
        self.rows
            .iter()
            .map(|row| {
                let mut dense = vec![0.0; n];
                for &(y, p) in row {
                    dense[y] = p;
                }
                dense
            })
            .collect()
    }

    /// `π_* = π_min / (1 − π_min)`.
    pub fn pi_star(&self) -> f64 {
        let pi_min = self.pi.iter().copied().fold(f64::INFINITY, f64::min);
        pi_min / (1.0 - pi_min)
    }

    /// Lazy and continuous-time chains are always aperiodic; a plain chain
    /// is aperiodic exactly when its graph is not bipartite.
    pub fn is_aperiodic(&self) -> bool {
        match self.variant {
            Variant::Lazy | Variant::ContinuousTime => true,
            Variant::Plain => !self.bipartite || self.vertex_count() == 1,
        }
    }

    /// `max |π(x) P(x, y) − π(y) P(y, x)|`.
    pub fn detailed_balance_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (x, row) in self.rows.iter().enumerate() {
            for &(y, p) in row {
                let flow = self.pi[x] * p - self.pi[y] * self.entry(y, x);
                worst = worst.max(flow.abs());
            }
        }
        worst
    }

    /// `max |Σ_y P(x, y) − 1|`.
    pub fn row_sum_residual(&self) -> f64 {
        self.rows
            .iter()
            .map(|row| (row.iter().map(|&(_, p)| p).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `max_y |(π P)(y) − π(y)|`; for continuous time this is the residual
    /// of `π Q = 0` with `Q = P − I`.
    pub fn stationarity_residual(&self) -> f64 {
        let mut flow = vec![0.0; self.vertex_count()];
        for (x, row) in self.rows.iter().enumerate() {
            for &(y, p) in row {
                flow[y] += self.pi[x] * p;
            }
        }
        flow.iter()
            .zip(&self.pi)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
