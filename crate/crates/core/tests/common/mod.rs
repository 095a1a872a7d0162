#![allow(dead_code)]

use dyadic::kernel::{KernelSpec, Window};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// A random window inside `[-12, 12]`.
pub fn random_window(rng: &mut StdRng) -> Window {
    let lo = rng.random_range(-12..=12);
    let hi = rng.random_range(lo..=12);
    Window::new(lo, hi).unwrap()
}

/// Nonincreasing values in `[0, 1]`, so the tails (1 below, 0 above) keep the order.
pub fn random_nonincreasing(rng: &mut StdRng, len: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..len).map(|_| rng.random::<f64>()).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

pub fn random_kernel(rng: &mut StdRng) -> KernelSpec {
    let w = random_window(rng);
    let values = random_nonincreasing(rng, w.len());
    KernelSpec::from_lambda(w, values, true).unwrap()
}

/// Grid function with values uniform in `[-1, 1]`.
pub fn random_grid(rng: &mut StdRng, layout: dyadic::haar::GridLayout) -> dyadic::haar::GridFunction {
    let values = (0..layout.cells()).map(|_| rng.random_range(-1.0..=1.0)).collect();
    dyadic::haar::GridFunction::new(layout, values).unwrap()
}
