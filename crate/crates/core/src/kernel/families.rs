//! Concrete kernels: the dyadic diffusion kernel `K_t`, the power-law seed
//! and the uniform kernel on the unit ball.

use super::{KernelSpec, LambdaSeq, Window};
use crate::error::{Error, Result};
use crate::geometry::pow2;

const PSI_RELATIVE_CUTOFF: f64 = 1e-18;
const PSI_MAX_TERMS: i32 = 2200;

/// `ψ(r) = (1/r) (Σ_{j≥1} 2^{-j} e^{-1/(2^j r)} - e^{-1/r})`.
///
/// For `r ≥ 1` the bracket is evaluated as
/// `e^{-1/r} Σ_{j≥1} 2^{-j} expm1((1 - 2^{-j}) / r)`, which has no cancellation.
pub fn psi(r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("psi needs r > 0, got {r}")));
    }
    let inv = 1.0 / r;
    let bracket = if r >= 1.0 {
        let bound = inv.exp_m1();
        let mut acc = 0.0;
        for j in 1..PSI_MAX_TERMS {
            let w = pow2(-j);
            acc += w * ((1.0 - w) * inv).exp_m1();
            if w * bound < PSI_RELATIVE_CUTOFF * acc {
                break;
            }
        }
        (-inv).exp() * acc
    } else {
        let mut acc = 0.0;
        for j in 1..PSI_MAX_TERMS {
            let w = pow2(-j);
            acc += w * (-inv * w).exp();
            if acc > 0.0 && w < PSI_RELATIVE_CUTOFF * acc {
                break;
            }
        }
        acc - (-inv).exp()
    };
    Ok(inv * bracket)
}

/// The dyadic diffusion kernel `K_t` with `Λ_j = e^{-t 2^j}`.
///
/// Shell values equal `(1/t) ψ(2^m / t)`; the kernel is 1-stable with
/// parameter `2t/3`.
pub fn gaussian(t: f64, window: Window) -> Result<KernelSpec> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("gaussian needs t > 0, got {t}")));
    }
    let lambda = LambdaSeq::from_pair_fn(window, |j| {
        let x = -t * pow2(j);
        (x.exp(), -x.exp_m1())
    });
    Ok(KernelSpec::from_sequence(lambda, true)?.with_sigma(2.0 * t / 3.0))
}

/// The seed with `k_j = 1 - σ/2` for `j ≤ 0` and `k_j = σ 4^{-j}` for `j ≥ 1`.
///
/// Its eigenvalues are `Λ_j = 1 - (3σ/2) 2^j` for `j < 0` and `0` for `j ≥ 0`.
/// The window must reach below 0 and up to at least -1.
pub fn power_law_seed(sigma: f64, window: Window) -> Result<KernelSpec> {
    if !(sigma > 0.0 && sigma < 2.0) {
        return Err(Error::HeadWeightNegative(sigma));
    }
    if window.lo >= 0 || window.hi < -1 {
        return Err(Error::IncompatibleWindows(format!(
            "power-law seed needs lo < 0 <= hi + 1, got [{}, {}]",
            window.lo, window.hi
        )));
    }
    let lambda = LambdaSeq::from_pair_fn(window, |j| {
        if j < 0 {
            let mu = 1.5 * sigma * pow2(j);
            (1.0 - mu, mu)
        } else {
            (0.0, 1.0)
        }
    });
    // Λ_{-1} < 0 once σ > 4/3, so only nonnegativity of k is checked.
    Ok(KernelSpec::from_sequence(lambda, false)?.with_sigma(sigma))
}

/// Uniform kernel on the unit ball, `k_m = 1` for `m ≤ 0`:
/// `Λ_j = 1` for `j ≤ -1`, else 0.
pub fn step(window: Window) -> Result<KernelSpec> {
    if !window.contains(-1) && !window.contains(0) {
        return Err(Error::IncompatibleWindows(format!(
            "step kernel needs -1 or 0 in the window, got [{}, {}]",
            window.lo, window.hi
        )));
    }
    let lambda = LambdaSeq::from_fn(window, |j| if j < 0 { 1.0 } else { 0.0 });
    KernelSpec::from_sequence(lambda, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_pinned_value() {
        // 60-digit evaluation of the defining series.
        let want = 0.360_326_700_716_256_335_34;
        assert!((psi(1.0).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn psi_tail_constant() {
        let pinned = [
            (5, 0.653_424_496_478_782_430_81),
            (10, 0.666_248_288_192_744_616_56),
            (20, 0.666_666_257_949_243_969_48),
        ];
        for (e, want) in pinned {
            let r = pow2(e);
            let got = r * r * psi(r).unwrap();
            assert!((got - want).abs() < 1e-12 * want, "r = 2^{e}: {got} vs {want}");
        }
    }

    #[test]
    fn psi_positive_and_domain() {
        for e in -10..=10 {
            assert!(psi(pow2(e)).unwrap() > 0.0, "r = 2^{e}");
        }
        assert!(psi(0.0).is_err());
        assert!(psi(-1.0).is_err());
        // Both evaluation branches agree where they meet.
        let below = psi(1.0 - 1e-12).unwrap();
        assert!((below - psi(1.0).unwrap()).abs() < 1e-11);
    }

    #[test]
    fn gaussian_shells_match_psi() {
        let w = Window::new(-40, 20).unwrap();
        for t in [0.5, 1.0, 2.0] {
            let g = gaussian(t, w).unwrap();
            for m in -16..=16 {
                let want = psi(pow2(m) / t).unwrap() / t;
                let got = g.k(m);
                assert!(((got - want) / want).abs() < 1e-10, "t = {t}, m = {m}: {got} vs {want}");
            }
        }
        assert!(gaussian(0.0, w).is_err());
    }

    #[test]
    fn power_law_examples() {
        let p = power_law_seed(2.0 / 3.0, super::super::DEFAULT_WINDOW).unwrap();
        assert!((p.k(0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((p.k(1) - 1.0 / 6.0).abs() < 1e-15);
        assert!((p.k(2) - 1.0 / 24.0).abs() < 1e-16);
        assert!((p.normalization_check() - 1.0).abs() < 1e-15);
        assert_eq!(p.lambda(-1), 0.5);
        assert!(matches!(power_law_seed(2.0, super::super::DEFAULT_WINDOW), Err(Error::HeadWeightNegative(_))));
        assert!(matches!(power_law_seed(0.0, super::super::DEFAULT_WINDOW), Err(Error::HeadWeightNegative(_))));
    }
}
