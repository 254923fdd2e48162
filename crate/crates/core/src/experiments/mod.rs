//! Both sides of each collaboration inequality, evaluated and reported.

mod dominance;
mod gap_decay;
mod inequalities;
pub mod suite;
mod torus;

pub use dominance::{dominance_scan, exact_dominance, max_crossing, DominanceReport};
pub use gap_decay::{
    fit_exponential, gap_decay_experiment, measure_gap_decay, ExpFit, GapDecayConfig, GapDecayCurve,
    GapPoint,
};
pub use inequalities::{
    checkerboard_coupling, max_dependent_deviation, max_independent_deviation, odd_case_scan,
    perturb_renormalized, shift_mass, verify_near_uniform_dependent,
    verify_near_uniform_independent, verify_one_vs_many, verify_star_vs_iid,
};
pub use torus::{torus_star_vs_single, TorusConfig};

use std::fmt;
use std::str::FromStr;

use crate::chain::Variant;
use crate::error::Error;

/// Verified inequalities hold when `gap ≥ −GAP_TOL`.
pub const GAP_TOL: f64 = 1e-9;

/// Largest graph and total lifespan for which `auto` picks the exact engine.
pub const AUTO_EXACT_MAX_VERTICES: usize = 512;
pub const AUTO_EXACT_MAX_TOTAL_TIME: f64 = 1e5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InequalityKind {
    OneVsMany,
    NearUniformIndependent,
    NearUniformDependent,
    StarVsIid,
    OddCaseScan,
    TorusStarVsSingle,
    Dominance,
}

impl InequalityKind {
    pub fn name(self) -> &'static str {
        match self {
            InequalityKind::OneVsMany => "one-vs-many",
            InequalityKind::NearUniformIndependent => "near-uniform-independent",
            InequalityKind::NearUniformDependent => "near-uniform-dependent",
            InequalityKind::StarVsIid => "star-vs-iid",
            InequalityKind::OddCaseScan => "odd-case-scan",
            InequalityKind::TorusStarVsSingle => "torus-star-vs-single",
            InequalityKind::Dominance => "dominance",
        }
    }
}

impl fmt::Display for InequalityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How both sides of a report were obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Exact,
    MonteCarlo { lhs_se: f64, rhs_se: f64, replicas: u64 },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::MonteCarlo { .. } => "monte-carlo",
        }
    }
}

/// Requested evaluation method; `Auto` resolves by problem size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MethodChoice {
    #[default]
    Auto,
    Exact,
    MonteCarlo,
}

impl MethodChoice {
    pub fn use_exact(self, vertices: usize, total_time: f64) -> bool {
        match self {
            MethodChoice::Exact => true,
            MethodChoice::MonteCarlo => false,
            MethodChoice::Auto => {
                vertices <= AUTO_EXACT_MAX_VERTICES && total_time <= AUTO_EXACT_MAX_TOTAL_TIME
            }
        }
    }
}

impl FromStr for MethodChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "auto" => Ok(MethodChoice::Auto),
            "exact" => Ok(MethodChoice::Exact),
            "mc" | "monte-carlo" => Ok(MethodChoice::MonteCarlo),
            other => Err(Error::Unrecognized(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub name: InequalityKind,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs − rhs`.
    pub gap: f64,
    pub graph: String,
    pub variant: Variant,
    pub k: usize,
    pub lifespans: Vec<f64>,
    pub method: Method,
    pub seed: Option<u64>,
    /// Free-form `(key, value)` notes such as the start scheme.
    pub metadata: Vec<(String, String)>,
}

impl InequalityReport {
    pub(crate) fn exact(name: InequalityKind, variant: Variant, lifespans: &[f64], lhs: f64, rhs: f64) -> Self {
        InequalityReport {
            name,
            lhs,
            rhs,
            gap: lhs - rhs,
            graph: String::new(),
            variant,
            k: lifespans.len(),
            lifespans: lifespans.to_vec(),
            method: Method::Exact,
            seed: None,
            metadata: Vec::new(),
        }
    }

    pub fn on_graph(mut self, graph: impl Into<String>) -> Self {
        self.graph = graph.into();
        self
    }

    pub fn with_note(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.push((key.to_string(), value.to_string()));
        self
    }

    pub fn note(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Standard error of the gap; zero for exact reports.
    pub fn gap_se(&self) -> f64 {
        match self.method {
            Method::Exact => 0.0,
            Method::MonteCarlo { lhs_se, rhs_se, .. } => lhs_se.hypot(rhs_se),
        }
    }

    /// `gap ≥ −GAP_TOL` for exact reports, `gap + 4·SE ≥ 0` for Monte Carlo.
    pub fn holds(&self) -> bool {
        match self.method {
            Method::Exact => self.gap >= -GAP_TOL,
            Method::MonteCarlo { .. } => self.gap + 4.0 * self.gap_se() >= 0.0,
        }
    }
}

/// Semicolon-joined lifespans, e.g. `1;1`.
pub fn format_lifespans(lifespans: &[f64]) -> String {
    lifespans
        .iter()
        .map(|t| format!("{t}"))
        .collect::<Vec<_>>()
        .join(";")
}
