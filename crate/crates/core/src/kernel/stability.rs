//! 1-stability: `4^j k_j → σ`.

use serde::Serialize;

use super::KernelSpec;
use crate::error::{Error, Result};
use crate::geometry::pow2;

/// Number of sampled levels.
pub const STABILITY_SAMPLES: i32 = 8;

/// Levels left unsampled at the top of the shell window, where the flat
/// eigenvalue tail biases `k_j`.
pub const STABILITY_GUARD: i32 = 10;

const TRAILING: usize = 5;
const TOLERANCE: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    /// `(j, 4^j k_j)` in increasing `j`.
    pub samples: Vec<(i32, f64)>,
    pub sigma_estimate: f64,
    /// Relative spread of the last five samples below 1e-2.
    pub converged: bool,
}

impl StabilityReport {
    /// Converged towards a positive parameter.
    pub fn is_one_stable(&self) -> bool {
        self.converged && self.sigma_estimate > 0.0
    }
}

impl KernelSpec {
    /// Highest sampled shell level.
    pub fn stability_top(&self) -> i32 {
        -self.window().lo - STABILITY_GUARD
    }

    pub fn stability_estimate(&self) -> Result<StabilityReport> {
        let top = self.stability_top();
        if top < STABILITY_SAMPLES {
            return Err(Error::InsufficientTail { top, required: STABILITY_SAMPLES });
        }
        let samples: Vec<(i32, f64)> =
            (top - STABILITY_SAMPLES + 1..=top).map(|m| (m, self.k(m) * pow2(2 * m))).collect();
        let sigma_estimate = samples[samples.len() - 1].1;
        let spread = samples[samples.len() - TRAILING..]
            .iter()
            .map(|&(_, s)| (s - sigma_estimate).abs())
            .fold(0.0, f64::max);
        let converged = spread <= TOLERANCE * sigma_estimate.abs();
        Ok(StabilityReport { samples, sigma_estimate, converged })
    }

    /// `γ(i, j) = 2^{i-j} Σ_{l ≥ i-j} k_l 2^{l-1} + k_{i-j} 4^{i-j} / 2`.
    ///
    /// For a 1-stable seed with parameter `2t/3` this tends to `t` as `i → ∞`.
    pub fn gamma_diag(&self, i: i32, j: i32) -> f64 {
        let n = i - j;
        let k = self.k_seq();
        let w = k.window();
        let mut tail: f64 = (n.max(w.lo)..=w.hi).map(|l| k.get(l) * pow2(l - 1)).sum();
        if n < w.lo {
            tail += k.head() * (pow2(w.lo - 1) - pow2(n - 1));
        }
        pow2(n) * tail + 0.5 * k.get(n) * pow2(2 * n)
    }

    /// `γ(i, j)` read off the eigenvalues: `2^{i-j} (1 - Λ_{j-i})`.
    pub fn gamma_from_lambda(&self, i: i32, j: i32) -> f64 {
        pow2(i - j) * self.mu(j - i)
    }
}
