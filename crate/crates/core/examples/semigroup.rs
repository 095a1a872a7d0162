//! Convolution, iteration and mollification of kernels, and stability additivity.

use dyadic::kernel::{convolve, convolve_alpha_route, gaussian, power_law_seed, DEFAULT_WINDOW};

fn main() -> dyadic::error::Result<()> {
    let a = gaussian(0.5, DEFAULT_WINDOW)?;
    let b = gaussian(1.5, DEFAULT_WINDOW)?;
    let c = convolve(&a, &b);
    let d = gaussian(2.0, DEFAULT_WINDOW)?;
    let gap = DEFAULT_WINDOW.indices().map(|j| (c.lambda(j) - d.lambda(j)).abs()).fold(0.0, f64::max);
    println!("K_0.5 * K_1.5 vs K_2: max eigenvalue gap {gap:.1e}");

    let alpha = convolve_alpha_route(&a, &b);
    let direct = c.alpha_seq();
    let gap = (-31..=31).map(|j| (alpha.get(j) - direct.get(j)).abs()).fold(0.0, f64::max);
    println!("alpha route vs eigenvalue product: {gap:.1e}");

    let p = power_law_seed(0.4, DEFAULT_WINDOW)?;
    let q = power_law_seed(0.9, DEFAULT_WINDOW)?;
    let r = convolve(&p, &q).stability_estimate()?;
    println!("stability of power_law(0.4) * power_law(0.9): {:.6} (converged {})", r.sigma_estimate, r.converged);

    let p4 = p.iterate(4)?;
    println!("iterate(power_law(0.4), 4): sigma {:.6}", p4.stability_estimate()?.sigma_estimate);
    let m = p4.mollify(2)?;
    println!("then mollified by 4: sigma {:.6}", m.stability_estimate()?.sigma_estimate);
    Ok(())
}
