//! Operators of kernels in the class acting on grid functions.
//!
//! Every kernel is diagonal in the Haar basis, `T h = Λ_{j(h)} h`, so
//! [`apply_kernel`] is a multiplier between two fast transforms. The dense
//! [`apply_kernel_quadrature`] integrates `∫ K(x, y) f(y) dy` shell by shell
//! and serves as an independent oracle.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{delta_power_integral, pow2, Region};
use crate::haar::{haar_forward, haar_inverse, GridFunction, GridLayout, HaarCoefficients};
use crate::kernel::KernelSpec;

/// Treatment of the coefficient against the normalized domain indicator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalingMode {
    /// Multiply by 1, the limit of `Λ_j` as `j → -∞`.
    #[default]
    Carry,
    /// Multiply by 0.
    Annihilate,
    /// Multiply by the mass the kernel keeps inside the domain,
    /// `s_D = Σ_{m ≤ Jd} k_m 2^{m-1}`; this is the exact action of the
    /// kernel restricted to `[0, 2^Jd)` on the domain indicator.
    Restrict,
}

/// `Σ_{m ≤ Jd} k_m 2^{m-1}`: mass of `K(x, ·)` inside the domain, equal for every `x` in it.
pub fn domain_mass(kernel: &KernelSpec, layout: GridLayout) -> f64 {
    kernel.mass_up_to(layout.jd)
}

/// A kernel bound to a grid.
#[derive(Debug, Clone)]
pub struct OperatorPlan {
    kernel: KernelSpec,
    mode: ScalingMode,
    layout: GridLayout,
    scaling_factor: f64,
}

impl OperatorPlan {
    /// Fails unless the kernel window covers the Haar levels `[-Jd, Jr-1]`.
    pub fn new(kernel: KernelSpec, mode: ScalingMode, layout: GridLayout) -> Result<Self> {
        let w = kernel.window();
        if w.lo > layout.min_level() || w.hi < layout.max_level() {
            return Err(Error::IncompatibleWindows(format!(
                "kernel window [{}, {}] does not cover Haar levels [{}, {}]",
                w.lo,
                w.hi,
                layout.min_level(),
                layout.max_level()
            )));
        }
        let scaling_factor = match mode {
            ScalingMode::Carry => 1.0,
            ScalingMode::Annihilate => 0.0,
            ScalingMode::Restrict => domain_mass(&kernel, layout),
        };
        Ok(Self { kernel, mode, layout, scaling_factor })
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn mode(&self) -> ScalingMode {
        self.mode
    }

    pub fn layout(&self) -> GridLayout {
        self.layout
    }

    /// Multiplier applied to the scaling coefficient.
    pub fn scaling_factor(&self) -> f64 {
        self.scaling_factor
    }

    /// Applies the multiplier to a coefficient set in place.
    pub fn apply_coefficients(&self, c: &mut HaarCoefficients) {
        c.apply_multiplier(|j| self.kernel.lambda(j), self.scaling_factor);
    }

    /// `(1 - s_D) |scaling|`: mass carried in carry mode that the kernel
    /// actually sends outside the domain.
    pub fn carry_truncation_bound(&self, f: &GridFunction) -> f64 {
        (1.0 - domain_mass(&self.kernel, self.layout)) * haar_forward(f).scaling.abs()
    }

    fn check(&self, f: &GridFunction) -> Result<()> {
        if f.layout() != self.layout {
            return Err(Error::LayoutMismatch(format!(
                "plan uses Jd={} Jr={}, function uses Jd={} Jr={}",
                self.layout.jd,
                self.layout.jr,
                f.layout().jd,
                f.layout().jr
            )));
        }
        Ok(())
    }
}

/// `T f` through the Haar multiplier `Λ_{j(h)}`.
pub fn apply_kernel(plan: &OperatorPlan, f: &GridFunction) -> Result<GridFunction> {
    plan.check(f)?;
    let mut c = haar_forward(f);
    plan.apply_coefficients(&mut c);
    Ok(haar_inverse(&c))
}

/// Entry of the quadrature matrix for cells whose XOR has bit length `b`
/// (`b = 0` is the diagonal).
fn shell_weights(kernel: &KernelSpec, layout: GridLayout) -> Vec<f64> {
    let width = layout.cell_width();
    let mut w = Vec::with_capacity(layout.levels() as usize + 1);
    w.push(kernel.mass_up_to(-layout.jr));
    for b in 1..=layout.levels() as i32 {
        w.push(kernel.k(b - layout.jr) * width);
    }
    w
}

fn bit_length(x: usize) -> usize {
    (usize::BITS - x.leading_zeros()) as usize
}

/// `∫_D K(x, y) f(y) dy` for every cell, as a dense matrix-vector product.
///
/// Off-diagonal entries are `k_m 2^{-Jr}` with `δ = 2^m` between the cells;
/// the diagonal carries the within-cell mass `Σ_{m ≤ -Jr} k_m 2^{m-1}`.
/// Exact for cell-constant `f`. Rows run in parallel.
pub fn apply_kernel_quadrature(kernel: &KernelSpec, f: &GridFunction) -> GridFunction {
    let layout = f.layout();
    let weights = shell_weights(kernel, layout);
    let support: Vec<(usize, f64)> =
        f.values().iter().copied().enumerate().filter(|&(_, v)| v != 0.0).collect();
    let values: Vec<f64> = (0..layout.cells())
        .into_par_iter()
        .map(|c| support.iter().map(|&(d, v)| weights[bit_length(c ^ d)] * v).sum())
        .collect();
    GridFunction::new(layout, values).expect("length matches layout")
}

/// Row-major dense quadrature matrix.
pub fn quadrature_matrix(kernel: &KernelSpec, layout: GridLayout) -> Vec<Vec<f64>> {
    let weights = shell_weights(kernel, layout);
    let n = layout.cells();
    (0..n)
        .into_par_iter()
        .map(|c| (0..n).map(|d| weights[bit_length(c ^ d)]).collect())
        .collect()
}

/// Row-major matrix of [`apply_kernel`] in the cell-indicator basis;
/// column `c` is the image of the indicator of cell `c`.
pub fn spectral_matrix(plan: &OperatorPlan) -> Vec<Vec<f64>> {
    let layout = plan.layout;
    let n = layout.cells();
    let columns: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|c| {
            let e = GridFunction::indicator_cell(layout, c);
            apply_kernel(plan, &e).expect("layout matches plan").into_values()
        })
        .collect();
    (0..n).map(|r| columns.iter().map(|col| col[r]).collect()).collect()
}

fn check_order(s: f64, allow_one: bool) -> Result<()> {
    let ok = s > 0.0 && (s < 1.0 || (allow_one && s == 1.0));
    if ok {
        Ok(())
    } else if s == 1.0 {
        Err(Error::DivergentQuadrature)
    } else {
        Err(Error::Domain(format!(
            "derivative order s = {s} outside {}",
            if allow_one { "(0, 1]" } else { "(0, 1)" }
        )))
    }
}

/// `D^s f`: details multiplied by `|I(h)|^{-s} = 2^{j s}`, scaling coefficient dropped.
pub fn fractional_derivative_spectral(s: f64, f: &GridFunction) -> Result<GridFunction> {
    check_order(s, true)?;
    let mut c = haar_forward(f);
    c.apply_multiplier(|j| (j as f64 * s).exp2(), 0.0);
    Ok(haar_inverse(&c))
}

/// Haar eigenvalue of the integral form of `D^s` at level 0,
/// `1 + 1 / (2 (2^s - 1))`; at level `j` it is this constant times `2^{j s}`.
///
/// The shells outside `I(h)` add `h(x) Σ_{m ≥ 1} 2^{-m s - 1}` to the unit
/// contribution of the sibling half.
pub fn derivative_eigenvalue_constant(s: f64) -> Result<f64> {
    check_order(s, false)?;
    Ok(1.0 + 0.5 / (s * std::f64::consts::LN_2).exp_m1())
}

/// `∫ (g(x) - g(y)) / δ(x, y)^{1+s} dy` at every cell, summed over shells.
///
/// Inside the domain each shell `{δ = 2^m}` around a cell is a sibling block
/// of cells; within-cell shells contribute nothing. Outside the domain `g`
/// is continued by its mean, so the tail contributes
/// `(g(x) - mean g) ∫_{δ ≥ 2^{Jd+1}} δ^{-1-s} dy`.
pub fn fractional_derivative_quadrature_all(s: f64, g: &GridFunction) -> Result<GridFunction> {
    check_order(s, false)?;
    let layout = g.layout();
    let n = layout.cells();
    let levels = layout.levels() as usize;
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for v in g.values() {
        acc += v;
        prefix.push(acc);
    }
    let mean = g.mean();
    let tail = delta_power_integral(-1.0 - s, pow2(layout.jd + 1), Region::Tail)?;
    let width = layout.cell_width();
    let shell: Vec<(f64, f64)> = (1..=levels as i32)
        .map(|b| {
            let m = b - layout.jr;
            // (2^{-m(1+s)}, shell measure 2^{m-1})
            (((-m) as f64 * (1.0 + s)).exp2(), pow2(m - 1))
        })
        .collect();
    let values = (0..n)
        .into_par_iter()
        .map(|c| {
            let gx = g.values()[c];
            let mut total = 0.0;
            for b in 1..=levels {
                let size = 1usize << (b - 1);
                let start = ((c >> (b - 1)) ^ 1) << (b - 1);
                let block = prefix[start + size] - prefix[start];
                let (weight, measure) = shell[b - 1];
                total += weight * (measure * gx - width * block);
            }
            total + (gx - mean) * tail
        })
        .collect();
    GridFunction::new(layout, values)
}

/// Single-cell form of [`fractional_derivative_quadrature_all`].
pub fn fractional_derivative_quadrature(s: f64, g: &GridFunction, cell: usize) -> Result<f64> {
    if cell >= g.layout().cells() {
        return Err(Error::Domain(format!("cell {cell} outside the grid")));
    }
    Ok(fractional_derivative_quadrature_all(s, g)?.values()[cell])
}

/// Solution of `∂u/∂t = -D^s u` at time `t`: details multiplied by
/// `e^{-t 2^{j s}}`, scaling coefficient carried.
pub fn heat_solve(s: f64, t: f64, u0: &GridFunction) -> Result<GridFunction> {
    check_order(s, true)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time t = {t} must be finite and nonnegative")));
    }
    if t == 0.0 {
        return Ok(u0.clone());
    }
    let mut c = haar_forward(u0);
    c.apply_multiplier(|j| (-t * (j as f64 * s).exp2()).exp(), 1.0);
    Ok(haar_inverse(&c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::{HaarIndex, LpExponent};
    use crate::kernel::{gaussian, power_law_seed, step, Window};

    fn layout() -> GridLayout {
        GridLayout::new(3, 5).unwrap()
    }

    fn window() -> Window {
        Window::new(-30, 30).unwrap()
    }

    fn pseudo_random(layout: GridLayout, seed: u64) -> GridFunction {
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        GridFunction::new(
            layout,
            (0..layout.cells())
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn plan_requires_covering_window() {
        let k = gaussian(1.0, Window::new(-2, 10).unwrap()).unwrap();
        assert!(matches!(
            OperatorPlan::new(k, ScalingMode::Carry, layout()),
            Err(Error::IncompatibleWindows(_))
        ));
    }

    #[test]
    fn haar_functions_are_eigenfunctions() {
        let l = layout();
        for kernel in [gaussian(1.0, window()).unwrap(), power_law_seed(2.0 / 3.0, window()).unwrap()] {
            let plan = OperatorPlan::new(kernel.clone(), ScalingMode::Carry, l).unwrap();
            for idx in l.haar_indices() {
                let h = GridFunction::haar(l, idx).unwrap();
                let want = kernel.lambda(idx.level) * &h;
                assert!(apply_kernel(&plan, &h).unwrap().max_abs_diff(&want) < 1e-12);
                assert!(apply_kernel_quadrature(&kernel, &h).max_abs_diff(&want) < 1e-12, "{idx}");
            }
        }
    }

    #[test]
    fn constants_and_modes() {
        let l = layout();
        let k = step(window()).unwrap();
        let one = GridFunction::constant(l, 1.0);
        let carry = OperatorPlan::new(k.clone(), ScalingMode::Carry, l).unwrap();
        assert!(apply_kernel(&carry, &one).unwrap().max_abs_diff(&one) < 1e-15);
        let annihilate = OperatorPlan::new(k.clone(), ScalingMode::Annihilate, l).unwrap();
        assert!(apply_kernel(&annihilate, &one).unwrap().lp_norm(LpExponent::Infinity).unwrap() < 1e-15);
        // The unit ball sits inside the domain, so nothing is lost.
        assert_eq!(domain_mass(&k, l), 1.0);
        let g = gaussian(1.0, window()).unwrap();
        let s_d = domain_mass(&g, l);
        let restrict = OperatorPlan::new(g.clone(), ScalingMode::Restrict, l).unwrap();
        let quad = apply_kernel_quadrature(&g, &one);
        assert!(quad.max_abs_diff(&GridFunction::constant(l, s_d)) < 1e-14);
        assert!(apply_kernel(&restrict, &one).unwrap().max_abs_diff(&quad) < 1e-14);
        let plan = OperatorPlan::new(g, ScalingMode::Carry, l).unwrap();
        let bound = plan.carry_truncation_bound(&one);
        assert!((bound - (1.0 - s_d) * l.domain_length().sqrt()).abs() < 1e-14);
    }

    #[test]
    fn matrices_agree_in_restrict_mode() {
        let l = GridLayout::new(2, 3).unwrap();
        let k = gaussian(0.8, window()).unwrap();
        let plan = OperatorPlan::new(k.clone(), ScalingMode::Restrict, l).unwrap();
        let a = quadrature_matrix(&k, l);
        let b = spectral_matrix(&plan);
        for (ra, rb) in a.iter().zip(&b) {
            for (x, y) in ra.iter().zip(rb) {
                assert!((x - y).abs() < 1e-13);
            }
        }
        let f = pseudo_random(l, 3);
        let dense: Vec<f64> = a.iter().map(|row| row.iter().zip(f.values()).map(|(x, y)| x * y).sum()).collect();
        let quad = apply_kernel_quadrature(&k, &f);
        for (x, y) in dense.iter().zip(quad.values()) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_maps_to_zero() {
        let k = gaussian(1.0, window()).unwrap();
        let z = GridFunction::zeros(layout());
        assert_eq!(apply_kernel_quadrature(&k, &z), z);
    }

    #[test]
    fn derivative_examples() {
        let l = layout();
        let h = GridFunction::haar(l, HaarIndex::new(0, 0)).unwrap();
        for s in [0.25, 0.5, 0.75] {
            // Sibling half plus the outer shells, summed term by term.
            let shells: f64 = 1.0 + (1..400).map(|m| (-(m as f64) * s - 1.0).exp2()).sum::<f64>();
            let c = derivative_eigenvalue_constant(s).unwrap();
            assert!((c - shells).abs() < 1e-13 * c);
            let q = fractional_derivative_quadrature(s, &h, 0).unwrap();
            assert!((q - c).abs() < 1e-12 * c);
            for idx in l.haar_indices() {
                let h = GridFunction::haar(l, idx).unwrap();
                let want = (idx.level as f64 * s).exp2() * &h;
                let scale = want.lp_norm(LpExponent::Infinity).unwrap();
                let multiplier = fractional_derivative_spectral(s, &h).unwrap();
                let quad = fractional_derivative_quadrature_all(s, &h).unwrap();
                assert!(multiplier.max_abs_diff(&want) < 1e-12 * scale);
                assert!(quad.max_abs_diff(&(c * &want)) < 1e-12 * c * scale, "{idx}");
            }
        }
        let c = GridFunction::constant(l, 2.5);
        assert!(fractional_derivative_quadrature_all(0.5, &c).unwrap().lp_norm(LpExponent::Infinity).unwrap() < 1e-12);
        assert_eq!(fractional_derivative_spectral(1.0, &c).unwrap(), GridFunction::zeros(l));
        assert!(matches!(fractional_derivative_quadrature(1.0, &c, 0), Err(Error::DivergentQuadrature)));
        assert!(fractional_derivative_spectral(1.5, &c).is_err());
    }

    #[test]
    fn derivative_forms_agree_on_random_input() {
        let l = layout();
        let f = pseudo_random(l, 11);
        let multiplier = fractional_derivative_spectral(0.5, &f).unwrap();
        let quad = fractional_derivative_quadrature_all(0.5, &f).unwrap();
        let c = derivative_eigenvalue_constant(0.5).unwrap();
        let scale = multiplier.lp_norm(LpExponent::Infinity).unwrap();
        assert!((c * &multiplier).max_abs_diff(&quad) < 1e-12 * c * scale);
    }

    #[test]
    fn heat_examples() {
        let l = layout();
        let idx = HaarIndex::new(2, 5);
        let h = GridFunction::haar(l, idx).unwrap();
        let u = heat_solve(1.0, 0.3, &h).unwrap();
        assert!(u.max_abs_diff(&((-0.3 * 4.0f64).exp() * &h)) < 1e-14);
        let f = pseudo_random(l, 5);
        assert_eq!(heat_solve(0.5, 0.0, &f).unwrap(), f);
        assert!(heat_solve(1.0, -1.0, &f).is_err());
        let two_steps = heat_solve(0.7, 0.4, &heat_solve(0.7, 0.2, &f).unwrap()).unwrap();
        assert!(two_steps.max_abs_diff(&heat_solve(0.7, 0.6, &f).unwrap()) < 1e-12);
        let plan = OperatorPlan::new(gaussian(0.6, window()).unwrap(), ScalingMode::Carry, l).unwrap();
        assert!(apply_kernel(&plan, &f).unwrap().max_abs_diff(&heat_solve(1.0, 0.6, &f).unwrap()) < 1e-12);
    }

    #[test]
    fn layout_mismatch() {
        let plan = OperatorPlan::new(gaussian(1.0, window()).unwrap(), ScalingMode::Carry, layout()).unwrap();
        let f = GridFunction::zeros(GridLayout::new(2, 2).unwrap());
        assert!(matches!(apply_kernel(&plan, &f), Err(Error::LayoutMismatch(_))));
    }
}
