//! The three sequence views of a kernel: eigenvalues, profile coefficients and shell values.

use dyadic::kernel::{k_to_lambda, step, Window};

fn main() -> dyadic::error::Result<()> {
    let k = step(Window::new(-4, 4)?)?;
    let alpha = k.alpha_seq();
    println!("uniform kernel on the unit ball");
    println!("{:>3} {:>8} {:>8} {:>8}", "j", "Lambda", "alpha", "k");
    for j in -5..=5 {
        println!("{j:>3} {:>8.4} {:>8.4} {:>8.4}", k.lambda(j), alpha.get(j), k.k(j));
    }
    println!("sum k_j 2^(j-1) = {}", k.normalization_check());
    let back = k_to_lambda(k.k_seq());
    let err = (-5..=5).map(|j| (back.get(j) - k.lambda(j)).abs()).fold(0.0, f64::max);
    println!("Lambda -> k -> Lambda error {err:.1e}");
    Ok(())
}
