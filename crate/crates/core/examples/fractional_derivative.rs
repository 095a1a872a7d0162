//! The dyadic fractional derivative: Haar multiplier form and shell-sum quadrature.

use dyadic::haar::{GridFunction, GridLayout, HaarIndex, LpExponent};
use dyadic::spectral::{derivative_eigenvalue_constant, fractional_derivative_quadrature_all, fractional_derivative_spectral};

fn main() -> dyadic::error::Result<()> {
    let layout = GridLayout::new(3, 5)?;
    for s in [0.25, 0.5, 0.75] {
        let c = derivative_eigenvalue_constant(s)?;
        println!("s = {s}: quadrature eigenvalue constant {c:.6}");
        for idx in [HaarIndex::new(-3, 0), HaarIndex::new(0, 2), HaarIndex::new(4, 7)] {
            let h = GridFunction::haar(layout, idx)?;
            let spectral = fractional_derivative_spectral(s, &h)?;
            let quad = fractional_derivative_quadrature_all(s, &h)?;
            let ratio = quad.lp_norm(LpExponent::Infinity)? / spectral.lp_norm(LpExponent::Infinity)?;
            println!(
                "  level {:>2}: multiplier 2^(js) = {:>9.5}, quadrature / multiplier = {ratio:.6}",
                idx.level,
                (idx.level as f64 * s).exp2()
            );
        }
        let flat = fractional_derivative_quadrature_all(s, &GridFunction::constant(layout, 1.0))?;
        println!("  constant function maps to {:.1e}", flat.lp_norm(LpExponent::Infinity)?);
    }
    Ok(())
}
