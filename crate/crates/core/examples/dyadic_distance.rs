//! Dyadic distance and the smallest common dyadic interval.

use dyadic::geometry::{dyadic_distance, smallest_common_interval, DyadicPoint};

fn main() -> dyadic::error::Result<()> {
    let pairs = [
        (DyadicPoint::new(255, 8), DyadicPoint::new(257, 8)),
        (DyadicPoint::new(383, 8), DyadicPoint::new(385, 8)),
        (DyadicPoint::integer(3), DyadicPoint::integer(12)),
        (DyadicPoint::new(1, 10), DyadicPoint::new(2, 10)),
    ];
    for (x, y) in pairs {
        let i = smallest_common_interval(&x, &y)?;
        let d = dyadic_distance(&x, &y).to_f64();
        println!(
            "x = {:<12} y = {:<12} |x - y| = {:<12.6e} delta = {d:<8} interval = [{}, {})",
            x.to_f64(),
            y.to_f64(),
            (x.to_f64() - y.to_f64()).abs(),
            i.left().to_f64(),
            i.left().to_f64() + i.length()
        );
    }
    Ok(())
}
