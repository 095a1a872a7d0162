//! A kernel acting on grid functions: Haar multiplier against dense quadrature.

use dyadic::haar::{GridFunction, GridLayout, HaarIndex, LpExponent};
use dyadic::kernel::{power_law_seed, DEFAULT_WINDOW};
use dyadic::spectral::{apply_kernel, apply_kernel_quadrature, OperatorPlan, ScalingMode};

fn main() -> dyadic::error::Result<()> {
    let layout = GridLayout::new(3, 5)?;
    let k = power_law_seed(2.0 / 3.0, DEFAULT_WINDOW)?;
    let h = GridFunction::haar(layout, HaarIndex::new(-2, 1))?;
    let th = apply_kernel_quadrature(&k, &h);
    println!("eigenvalue Lambda_-2 = {:.6}, quadrature error {:.1e}", k.lambda(-2), th.max_abs_diff(&(k.lambda(-2) * &h)));

    let f = GridFunction::from_fn(layout, |x| (x * 0.9).cos());
    for mode in [ScalingMode::Carry, ScalingMode::Restrict, ScalingMode::Annihilate] {
        let plan = OperatorPlan::new(k.clone(), mode, layout)?;
        let tf = apply_kernel(&plan, &f)?;
        println!(
            "{mode:?}: scaling factor {:.6}, ||Tf||_1 / ||f||_1 = {:.6}, gap to quadrature {:.2e}",
            plan.scaling_factor(),
            tf.lp_norm(LpExponent::Finite(1.0))? / f.lp_norm(LpExponent::Finite(1.0))?,
            tf.max_abs_diff(&apply_kernel_quadrature(&k, &f))
        );
    }
    Ok(())
}
