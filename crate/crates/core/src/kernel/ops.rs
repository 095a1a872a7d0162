//! Semigroup operations: convolution, iteration, mollification and the
//! central-limit step `M^i`.

use super::{AlphaSeq, KernelSpec, LambdaSeq, Window};
use crate::error::{Error, Result};
use crate::geometry::pow2;

/// `(Λ^n, 1 - Λ^n)` from `(Λ, 1 - Λ)`.
///
/// Near 1 the power is `exp(n · ln_1p(-μ))`; negative bases take the sign
/// `(-1)^n`, with `odd` giving the parity of `n`.
pub fn power_pair(lambda: f64, mu: f64, n: f64, odd: bool) -> (f64, f64) {
    if mu == 0.0 {
        return (1.0, 0.0);
    }
    if lambda == 0.0 {
        return (0.0, 1.0);
    }
    if lambda >= 0.5 {
        let v = n * (-mu).ln_1p();
        return (v.exp(), -v.exp_m1());
    }
    let magnitude = lambda.abs().powf(n);
    let value = if lambda < 0.0 && odd { -magnitude } else { magnitude };
    (value, 1.0 - value)
}

fn product_pair(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let value = a.0 * b.0;
    if a.0 >= 0.5 && b.0 >= 0.5 {
        (value, a.1 + b.1 - a.1 * b.1)
    } else {
        (value, 1.0 - value)
    }
}

fn pair(k: &KernelSpec, j: i32) -> (f64, f64) {
    (k.lambda(j), k.mu(j))
}

fn product_window(a: Window, b: Window) -> Window {
    Window { lo: a.lo.min(b.lo), hi: a.hi.min(b.hi) }
}

fn add_sigma(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    Some(a? + b?)
}

/// Convolution `K¹ ∗ K²`, with `Λ³_j = Λ¹_j Λ²_j`.
///
/// The result lives on `[min lo, min hi]`, where the product is represented
/// exactly under the tail conventions.
pub fn convolve(a: &KernelSpec, b: &KernelSpec) -> KernelSpec {
    let w = product_window(a.window(), b.window());
    let lambda = LambdaSeq::from_pair_fn(w, |j| product_pair(pair(a, j), pair(b, j)));
    KernelSpec::unchecked(lambda, add_sigma(a.sigma(), b.sigma()))
}

/// Profile coefficients of `K¹ ∗ K²` from `α³ = α¹Λ² + α²Λ¹ + α¹α²`.
pub fn convolve_alpha_route(a: &KernelSpec, b: &KernelSpec) -> AlphaSeq {
    let w = product_window(a.window(), b.window());
    let (a1, a2) = (a.alpha_seq(), b.alpha_seq());
    AlphaSeq::from_fn(Window { lo: w.lo, hi: w.hi + 1 }, |j| {
        let (x, y) = (a1.get(j), a2.get(j));
        x * b.lambda(j) + y * a.lambda(j) + x * y
    })
}

impl KernelSpec {
    /// `n`-fold convolution power, `Λ_j^(n) = (Λ_j)^n`.
    pub fn iterate(&self, n: u64) -> Result<KernelSpec> {
        if n == 0 {
            return Err(Error::Domain("iterate needs n >= 1".into()));
        }
        if n == 1 {
            return Ok(self.clone());
        }
        let odd = n % 2 == 1;
        let lambda =
            LambdaSeq::from_pair_fn(self.window(), |j| power_pair(self.lambda(j), self.mu(j), n as f64, odd));
        Ok(KernelSpec::unchecked(lambda, self.sigma.map(|s| s * n as f64)))
    }

    /// Mollification by `2^i`: `Λ'_l = Λ_{l-i}`, stability parameter `2^{-i} σ`.
    pub fn mollify(&self, i: i32) -> Result<KernelSpec> {
        let w = self.window().shifted(i)?;
        let lambda = LambdaSeq::from_pair_fn(w, |l| pair(self, l - i));
        Ok(KernelSpec::unchecked(lambda, self.sigma.map(|s| s * pow2(-i))))
    }

    /// `M^i`: `2^i`-fold iteration followed by `2^i`-mollification,
    /// `Λ_j = (Λ_{j-i})^{2^i}`. The stability parameter is unchanged.
    pub fn clt_step(&self, i: u32) -> Result<KernelSpec> {
        if i == 0 {
            return Ok(self.clone());
        }
        let shift = i32::try_from(i).map_err(|_| Error::Overflow("clt_step level"))?;
        let w = self.window().shifted(shift)?;
        let n = pow2(shift);
        let lambda = LambdaSeq::from_pair_fn(w, |j| {
            let (l, m) = pair(self, j - shift);
            power_pair(l, m, n, false)
        });
        Ok(KernelSpec::unchecked(lambda, self.sigma))
    }
}
