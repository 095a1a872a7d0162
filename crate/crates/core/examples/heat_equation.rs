//! Solving du/dt = -D^s u by Haar multipliers.

use dyadic::haar::{GridFunction, GridLayout, LpExponent};
use dyadic::spectral::heat_solve;

fn main() -> dyadic::error::Result<()> {
    let layout = GridLayout::new(2, 6)?;
    let u0 = GridFunction::from_fn(layout, |x| if (1.0..1.5).contains(&x) { 1.0 } else { 0.0 });
    println!("mean of u0 {:.6}", u0.mean());
    for s in [0.5, 1.0] {
        for t in [0.0, 0.1, 1.0, 10.0] {
            let u = heat_solve(s, t, &u0)?;
            println!(
                "s = {s}  t = {t:<4}  max {:.6}  L2 {:.6}  mean {:.6}",
                u.lp_norm(LpExponent::Infinity)?,
                u.lp_norm(LpExponent::Finite(2.0))?,
                u.mean()
            );
        }
    }
    Ok(())
}
