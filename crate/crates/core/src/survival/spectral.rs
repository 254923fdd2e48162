//! Spectral form of stationary survival: `P_π(τ(y) > t) = Σ_v α_v λ_v^t`.
//!
//! With `D = diag(π)` on `V ∖ {y}`, the matrix `A = D^{½} Q̂ D^{−½}` is
//! symmetric by reversibility. For orthonormal eigenpairs `(λ_v, φ_v)` of
//! `A` the weights are `α_v = (Σ_ξ φ_v(ξ) π(ξ)^{½})²`, and normalising them
//! by `1 − π(y)` gives the law of a variable `W` with
//! `E[W^t] = P_π(τ(y) > t) / (1 − π(y))`.
//!
//! For continuous-time kernels the stored `λ_v` are `exp(μ_v − 1)` where
//! `μ_v` are the eigenvalues of `A`, i.e. the eigenvalues of the unit-time
//! survival operator, so the same formula holds for real `t ≥ 0`.

use nalgebra::{DMatrix, SymmetricEigen};

use super::check_time_for;
use crate::chain::{TransitionKernel, Variant, BALANCE_TOL};
use crate::error::{Error, Result};

/// Allowed drift of `Σ α_v` from `1 − π(y)`.
pub const ALPHA_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub target: usize,
    pub variant: Variant,
    pub lambdas: Vec<f64>,
    pub alphas: Vec<f64>,
    pub pi_target: f64,
}

/// Eigendecomposition of the symmetrised grounded kernel for target `y`.
pub fn spectral(kernel: &TransitionKernel, y: usize) -> Result<SpectralDecomposition> {
    let n = kernel.vertex_count();
    if y >= n {
        return Err(Error::BadVertex { vertex: y, n });
    }
    let residual = kernel.detailed_balance_residual();
    if residual > BALANCE_TOL {
        return Err(Error::AssumptionViolation(format!(
            "kernel is not reversible (detailed-balance residual {residual:e})"
        )));
    }
    let pi = kernel.pi();
    let verts: Vec<usize> = (0..n).filter(|&x| x != y).collect();
    let d = verts.len();
    let sqrt_pi: Vec<f64> = verts.iter().map(|&x| pi[x].sqrt()).collect();
    let mut a = DMatrix::<f64>::zeros(d, d);
    for (i, &x) in verts.iter().enumerate() {
        for &(z, p) in kernel.row(x) {
            if z == y {
                continue;
            }
            let j = if z < y { z } else { z - 1 };
            a[(i, j)] = sqrt_pi[i] * p / sqrt_pi[j];
        }
    }
    let a = (&a + a.transpose()) * 0.5;
    let (mut lambdas, alphas) = if d == 0 {
        (Vec::new(), Vec::new())
    } else {
        let eig = SymmetricEigen::try_new(a, f64::EPSILON, 100_000)
            .ok_or_else(|| Error::EigenFailure(format!("no convergence for target {y}")))?;
        let alphas = eig
            .eigenvectors
            .column_iter()
            .map(|phi| {
                let overlap: f64 = phi.iter().zip(&sqrt_pi).map(|(f, s)| f * s).sum();
                overlap * overlap
            })
            .collect();
        (eig.eigenvalues.iter().copied().collect::<Vec<_>>(), alphas)
    };
    if kernel.variant() == Variant::ContinuousTime {
        for l in &mut lambdas {
            *l = (*l - 1.0).exp();
        }
    }
    let decomposition = SpectralDecomposition {
        target: y,
        variant: kernel.variant(),
        lambdas,
        alphas,
        pi_target: pi[y],
    };
    let drift = (decomposition.alpha_sum() - (1.0 - pi[y])).abs();
    if drift > ALPHA_SUM_TOL {
        return Err(Error::EigenFailure(format!(
            "weights sum drifts from 1 - pi(y) by {drift:e}"
        )));
    }
    Ok(decomposition)
}

impl SpectralDecomposition {
    pub fn alpha_sum(&self) -> f64 {
        self.alphas.iter().sum()
    }

    fn power_sum(&self, t: f64) -> f64 {
        let whole = t.fract() == 0.0 && t.abs() < i32::MAX as f64;
        self.alphas
            .iter()
            .zip(&self.lambdas)
            .map(|(&a, &l)| a * if whole { l.powi(t as i32) } else { l.powf(t) })
            .sum()
    }

    /// `P_π(τ(y) > t) = Σ_v α_v λ_v^t`.
    pub fn survival(&self, t: f64) -> Result<f64> {
        check_time_for(self.variant, t)?;
        Ok(self.power_sum(t))
    }

    /// `E[W^t]`.
    pub fn moment(&self, t: f64) -> Result<f64> {
        Ok(self.survival(t)? / (1.0 - self.pi_target))
    }

    /// `(E[W^t] E[W^s], E[W^{t+s}])`.
    ///
    /// Plain kernels may have negative `λ_v`; there the inequality
    /// `lhs ≤ rhs` only follows when `t` and `s` share parity, so mixed
    /// parity is refused. Use [`SpectralDecomposition::moment_pair`] to
    /// explore that regime.
    pub fn moment_inequality_check(&self, t: f64, s: f64) -> Result<(f64, f64)> {
        check_time_for(self.variant, t)?;
        check_time_for(self.variant, s)?;
        if self.variant == Variant::Plain && (t as u64 + s as u64) % 2 == 1 {
            return Err(Error::ParityViolation {
                t: t as u64,
                s: s as u64,
            });
        }
        self.moment_pair(t, s)
    }

    /// The moment pair without the parity guard.
    pub fn moment_pair(&self, t: f64, s: f64) -> Result<(f64, f64)> {
        Ok((self.moment(t)? * self.moment(s)?, self.moment(t + s)?))
    }
}
