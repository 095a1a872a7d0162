//! The dyadic diffusion kernel K_t against its closed form (1/t) psi(delta / t).

use dyadic::geometry::pow2;
use dyadic::kernel::{gaussian, psi, Window};

fn main() -> dyadic::error::Result<()> {
    let t = 1.0;
    let k = gaussian(t, Window::new(-40, 20)?)?;
    println!("{:>4} {:>22} {:>22} {:>10}", "m", "k_m from Lambda", "psi(2^m / t) / t", "rel err");
    for m in (-12..=12).step_by(3) {
        let closed = psi(pow2(m) / t)? / t;
        println!("{m:>4} {:>22.15e} {closed:>22.15e} {:>10.2e}", k.k(m), ((k.k(m) - closed) / closed).abs());
    }
    for e in [5, 10, 20] {
        let r = pow2(e);
        println!("r = 2^{e:<2}  r^2 psi(r) = {:.12}", r * r * psi(r)?);
    }
    println!("limit 2/3 = {:.12}", 2.0 / 3.0);
    Ok(())
}
