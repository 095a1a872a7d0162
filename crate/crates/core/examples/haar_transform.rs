//! Fast Haar transform of a grid function, Parseval and the square function.

use dyadic::haar::{haar_forward, haar_inverse, square_function, GridFunction, GridLayout, LpExponent};

fn main() -> dyadic::error::Result<()> {
    let layout = GridLayout::new(2, 4)?;
    let f = GridFunction::from_fn(layout, |x| (x * 1.3).sin() + if x < 1.0 { 0.5 } else { 0.0 });
    let c = haar_forward(&f);
    println!("cells {}, Haar levels [{}, {}]", layout.cells(), layout.min_level(), layout.max_level());
    println!("scaling coefficient {:.6}", c.scaling);
    for j in layout.min_level()..=layout.max_level() {
        let energy: f64 = c.level(j).iter().map(|v| v * v).sum();
        println!("level {j:>2}: {:>3} coefficients, energy {energy:.6e}", c.level(j).len());
    }
    let l2 = f.lp_norm(LpExponent::Finite(2.0))?;
    let parseval = (c.scaling * c.scaling + c.detail_energy()).sqrt();
    println!("||f||_2 = {l2:.15}, from coefficients {parseval:.15}");
    println!("round trip error {:.3e}", haar_inverse(&c).max_abs_diff(&f));
    let s = square_function(&f);
    println!("square function at cell 0: {:.6}", s.values.values()[0]);
    Ok(())
}
