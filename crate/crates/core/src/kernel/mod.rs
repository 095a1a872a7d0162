//! Markov kernels on the half line that depend only on the dyadic distance.
//!
//! A [`KernelSpec`] is stored by its Haar eigenvalues `Λ_j` on a finite
//! window; the shell values `k̄` and profile coefficients `ᾱ` are derived.

mod families;
mod ops;
mod sequences;
mod stability;

pub use families::{gaussian, power_law_seed, psi, step};
pub use ops::{convolve, convolve_alpha_route, power_pair};
pub use sequences::{
    alpha_to_k, alpha_to_lambda, k_to_alpha, k_to_lambda, lambda_to_alpha, lambda_to_k, AlphaSeq, KSeq,
    LambdaSeq, Window,
};
pub use stability::{StabilityReport, STABILITY_GUARD, STABILITY_SAMPLES};

use crate::error::{Error, Result};
use crate::geometry::{dyadic_distance, pow2, DeltaValue, DyadicPoint};

/// Default window for constructed kernels.
pub const DEFAULT_WINDOW: Window = Window { lo: -30, hi: 30 };

/// Slack admitted on `k_j ≥ 0`.
pub const NONNEGATIVITY_TOLERANCE: f64 = 1e-12;

/// Slack admitted on `Σ k_j 2^{j-1} = 1`.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-10;

/// A kernel in the class, stored by its eigenvalue sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    lambda: LambdaSeq,
    k: KSeq,
    sigma: Option<f64>,
}

impl KernelSpec {
    /// Validates `Λ` and builds the kernel.
    ///
    /// With `strict` set the sequence must be nonincreasing, tails included.
    pub fn from_lambda(window: Window, values: Vec<f64>, strict: bool) -> Result<Self> {
        Self::from_sequence(LambdaSeq::new(window, values)?, strict)
    }

    /// Like [`KernelSpec::from_lambda`], starting from a prepared sequence.
    pub fn from_sequence(lambda: LambdaSeq, strict: bool) -> Result<Self> {
        for (j, v) in lambda.iter() {
            if !(-1.0..=1.0).contains(&v) {
                return Err(Error::EigenvalueOutOfRange { index: j, value: v });
            }
        }
        if strict {
            let w = lambda.window();
            for j in w.lo..=w.hi + 1 {
                if lambda.get(j) > lambda.get(j - 1) {
                    return Err(Error::NotDecreasing { index: j, value: lambda.get(j) });
                }
            }
        }
        let kernel = Self::unchecked(lambda, None);
        if let Some((index, value)) = kernel.k.iter().find(|&(_, v)| v < -NONNEGATIVITY_TOLERANCE) {
            return Err(Error::KernelNotNonnegative { index, value });
        }
        Ok(kernel)
    }

    pub(crate) fn unchecked(lambda: LambdaSeq, sigma: Option<f64>) -> Self {
        let k = lambda_to_k(&lambda);
        Self { lambda, k, sigma }
    }

    /// Records a known stability parameter.
    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = Some(sigma);
        self
    }

    pub fn window(&self) -> Window {
        self.lambda.window()
    }

    /// Declared stability parameter, carried through the semigroup operations.
    pub fn sigma(&self) -> Option<f64> {
        self.sigma
    }

    pub fn lambda_seq(&self) -> &LambdaSeq {
        &self.lambda
    }

    pub fn lambda(&self, j: i32) -> f64 {
        self.lambda.get(j)
    }

    /// `1 - Λ_j`, at full relative precision when the construction allows it.
    pub fn mu(&self, j: i32) -> f64 {
        self.lambda.complement(j)
    }

    pub fn alpha_seq(&self) -> AlphaSeq {
        lambda_to_alpha(&self.lambda)
    }

    pub fn k_seq(&self) -> &KSeq {
        &self.k
    }

    /// Shell value `k_m`, the kernel on `{δ = 2^m}`.
    pub fn k(&self, m: i32) -> f64 {
        self.k.get(m)
    }

    /// `Σ_j k_j 2^{j-1}`.
    pub fn normalization_check(&self) -> f64 {
        self.k.total_mass()
    }

    /// `Σ_{m ≤ top} k_m 2^{m-1}`: the mass within distance `2^top`.
    pub fn mass_up_to(&self, top: i32) -> f64 {
        self.k.mass_up_to(top)
    }

    /// `K(x, y) = k_m` where `δ(x, y) = 2^m`.
    pub fn eval(&self, x: &DyadicPoint, y: &DyadicPoint) -> Result<f64> {
        match dyadic_distance(x, y) {
            DeltaValue::Zero => Err(Error::DiagonalEvaluation),
            DeltaValue::Pow2(m) => Ok(self.k(m)),
        }
    }

    /// Smallest partial moment `min_j Σ_{l ≤ j} α_l 2^l` over the window.
    ///
    /// The partial moment at `j` equals `k_{-j}`, so a kernel in the class
    /// gives a value no smaller than `-NONNEGATIVITY_TOLERANCE`.
    pub fn partial_alpha_moment_check(&self) -> f64 {
        let alpha = self.alpha_seq();
        let mut acc = 0.0;
        let mut min = f64::INFINITY;
        for (l, a) in alpha.iter() {
            acc += a * pow2(l);
            min = min.min(acc);
        }
        min
    }

    /// Eigenvalues over `[lo, hi]`, window tails included.
    pub fn lambda_range(&self, lo: i32, hi: i32) -> Vec<f64> {
        (lo..=hi).map(|j| self.lambda(j)).collect()
    }
}
