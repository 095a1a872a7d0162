//! Haar analysis on a finite dyadic grid over `[0, 2^Jd)`.
//!
//! A [`GridFunction`] is constant on the `2^(Jd+Jr)` cells of width `2^-Jr`.
//! Its Haar expansion keeps every `h^j_k` whose support lies in the domain,
//! `j ∈ [-Jd, Jr-1]`, plus one coefficient against the normalized indicator
//! of the whole domain. The transform works on cell averages, so each detail
//! is the exact inner product `⟨f, h⟩` up to a single `2^{j/2}` rounding.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{pow2, DyadicInterval, DyadicPoint};

/// Largest supported `Jd + Jr`.
pub const MAX_GRID_LEVELS: i32 = 28;

/// `2^(e/2)` for integer `e`.
pub fn half_pow2(e: i32) -> f64 {
    let q = e.div_euclid(2);
    if e.rem_euclid(2) == 0 {
        pow2(q)
    } else {
        pow2(q) * std::f64::consts::SQRT_2
    }
}

/// Grid geometry: domain `[0, 2^jd)`, cell width `2^-jr`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridLayout {
    #[serde(rename = "Jd")]
    pub jd: i32,
    #[serde(rename = "Jr")]
    pub jr: i32,
}

impl GridLayout {
    pub fn new(jd: i32, jr: i32) -> Result<Self> {
        let levels = jd.checked_add(jr).ok_or_else(|| Error::InvalidLayout("Jd + Jr overflows".into()))?;
        if levels < 1 {
            return Err(Error::InvalidLayout(format!("Jd + Jr = {levels} must be at least 1")));
        }
        if levels > MAX_GRID_LEVELS {
            return Err(Error::InvalidLayout(format!(
                "Jd + Jr = {levels} exceeds the supported {MAX_GRID_LEVELS}"
            )));
        }
        Ok(Self { jd, jr })
    }

    /// Number of Haar levels, `Jd + Jr`.
    pub fn levels(&self) -> u32 {
        (self.jd + self.jr) as u32
    }

    pub fn cells(&self) -> usize {
        1usize << self.levels()
    }

    pub fn cell_width(&self) -> f64 {
        pow2(-self.jr)
    }

    pub fn domain_length(&self) -> f64 {
        pow2(self.jd)
    }

    /// Coarsest Haar level in range, `-Jd`.
    pub fn min_level(&self) -> i32 {
        -self.jd
    }

    /// Finest Haar level in range, `Jr - 1`.
    pub fn max_level(&self) -> i32 {
        self.jr - 1
    }

    pub fn domain(&self) -> DyadicInterval {
        DyadicInterval::new(-self.jd, 0)
    }

    pub fn contains_haar(&self, idx: &HaarIndex) -> bool {
        idx.level >= self.min_level()
            && idx.level <= self.max_level()
            && idx.position < (1u64 << (idx.level + self.jd))
    }

    /// All in-range Haar indices, coarse to fine.
    pub fn haar_indices(&self) -> impl Iterator<Item = HaarIndex> + '_ {
        (self.min_level()..=self.max_level()).flat_map(move |j| {
            (0..1u64 << (j + self.jd)).map(move |k| HaarIndex::new(j, k))
        })
    }

    /// Left endpoint of cell `c`.
    pub fn cell_point(&self, c: usize) -> DyadicPoint {
        DyadicPoint::new(c as u64, self.jr)
    }

    /// Midpoint of cell `c`.
    pub fn cell_midpoint(&self, c: usize) -> DyadicPoint {
        DyadicPoint::new(2 * c as u64 + 1, self.jr + 1)
    }

    /// Exponent `m` with `δ = 2^m` between any points of two distinct cells.
    pub fn cell_delta_exponent(&self, a: usize, b: usize) -> Option<i32> {
        let x = a ^ b;
        if x == 0 {
            None
        } else {
            Some((usize::BITS - x.leading_zeros()) as i32 - self.jr)
        }
    }

    /// Offset of level `j` in the flat detail vector.
    fn level_offset(&self, j: i32) -> usize {
        (1usize << (j + self.jd)) - 1
    }
}

/// The Haar function `h^j_k(x) = 2^{j/2} h(2^j x - k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HaarIndex {
    pub level: i32,
    pub position: u64,
}

impl HaarIndex {
    pub const fn new(level: i32, position: u64) -> Self {
        Self { level, position }
    }

    pub fn support(&self) -> DyadicInterval {
        DyadicInterval::new(self.level, self.position)
    }

    /// `|h|` on its support, `2^{j/2}`.
    pub fn amplitude(&self) -> f64 {
        half_pow2(self.level)
    }
}

impl fmt::Display for HaarIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "h^{}_{}", self.level, self.position)
    }
}

/// Value of `h^j_k` at an exact point.
pub fn haar_eval(idx: &HaarIndex, x: &DyadicPoint) -> f64 {
    match x.floor_at_level(idx.level + 1) {
        Some(half) if half >> 1 == idx.position as u128 => {
            if half & 1 == 0 {
                idx.amplitude()
            } else {
                -idx.amplitude()
            }
        }
        _ => 0.0,
    }
}

/// A function constant on each grid cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    layout: GridLayout,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(layout: GridLayout, values: Vec<f64>) -> Result<Self> {
        if values.len() != layout.cells() {
            return Err(Error::LayoutMismatch(format!(
                "expected {} cell values, got {}",
                layout.cells(),
                values.len()
            )));
        }
        Ok(Self { layout, values })
    }

    pub fn zeros(layout: GridLayout) -> Self {
        Self { layout, values: vec![0.0; layout.cells()] }
    }

    pub fn constant(layout: GridLayout, c: f64) -> Self {
        Self { layout, values: vec![c; layout.cells()] }
    }

    /// Samples `g` at cell midpoints.
    pub fn from_fn(layout: GridLayout, g: impl Fn(f64) -> f64) -> Self {
        let values = (0..layout.cells()).map(|c| g(layout.cell_midpoint(c).to_f64())).collect();
        Self { layout, values }
    }

    /// Cell samples of an in-range Haar function.
    pub fn haar(layout: GridLayout, idx: HaarIndex) -> Result<Self> {
        if !layout.contains_haar(&idx) {
            return Err(Error::LayoutMismatch(format!("{idx} is not supported inside the grid domain")));
        }
        let values = (0..layout.cells()).map(|c| haar_eval(&idx, &layout.cell_midpoint(c))).collect();
        Ok(Self { layout, values })
    }

    pub fn indicator_cell(layout: GridLayout, c: usize) -> Self {
        let mut f = Self::zeros(layout);
        f.values[c] = 1.0;
        f
    }

    pub fn layout(&self) -> GridLayout {
        self.layout
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Average over the domain.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs_diff(&self, other: &GridFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn lp_norm(&self, p: LpExponent) -> Result<f64> {
        lp_norm(self, p)
    }

    fn zip_with(&self, other: &GridFunction, op: impl Fn(f64, f64) -> f64) -> GridFunction {
        assert_eq!(self.layout, other.layout, "grid layouts differ");
        let values = self.values.iter().zip(&other.values).map(|(a, b)| op(*a, *b)).collect();
        GridFunction { layout: self.layout, values }
    }
}

impl Add for &GridFunction {
    type Output = GridFunction;
    fn add(self, rhs: &GridFunction) -> GridFunction {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &GridFunction {
    type Output = GridFunction;
    fn sub(self, rhs: &GridFunction) -> GridFunction {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<&GridFunction> for f64 {
    type Output = GridFunction;
    fn mul(self, rhs: &GridFunction) -> GridFunction {
        GridFunction { layout: rhs.layout, values: rhs.values.iter().map(|v| self * v).collect() }
    }
}

/// Haar coefficients of a [`GridFunction`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaarCoefficients {
    layout: GridLayout,
    /// Coefficient of `2^{-Jd/2} χ_[0, 2^Jd)`.
    pub scaling: f64,
    /// Details level by level, coarse first; level `j` holds `2^(j+Jd)` entries.
    details: Vec<f64>,
}

impl HaarCoefficients {
    pub fn zeros(layout: GridLayout) -> Self {
        Self { layout, scaling: 0.0, details: vec![0.0; layout.cells() - 1] }
    }

    pub fn from_parts(layout: GridLayout, scaling: f64, details: Vec<f64>) -> Result<Self> {
        if details.len() + 1 != layout.cells() {
            return Err(Error::MalformedCoefficients(format!(
                "layout Jd={} Jr={} needs {} details, got {}",
                layout.jd,
                layout.jr,
                layout.cells() - 1,
                details.len()
            )));
        }
        Ok(Self { layout, scaling, details })
    }

    /// Builds a coefficient set from `(index, value)` pairs; every index must be in range.
    pub fn from_entries(
        layout: GridLayout,
        scaling: f64,
        entries: impl IntoIterator<Item = (HaarIndex, f64)>,
    ) -> Result<Self> {
        let mut c = Self::zeros(layout);
        c.scaling = scaling;
        for (idx, v) in entries {
            if !layout.contains_haar(&idx) {
                return Err(Error::MalformedCoefficients(format!("{idx} outside the layout")));
            }
            *c.detail_mut(idx) = v;
        }
        Ok(c)
    }

    pub fn layout(&self) -> GridLayout {
        self.layout
    }

    pub fn details(&self) -> &[f64] {
        &self.details
    }

    pub fn detail(&self, idx: HaarIndex) -> f64 {
        self.details[self.layout.level_offset(idx.level) + idx.position as usize]
    }

    pub fn detail_mut(&mut self, idx: HaarIndex) -> &mut f64 {
        let i = self.layout.level_offset(idx.level) + idx.position as usize;
        &mut self.details[i]
    }

    pub fn level(&self, j: i32) -> &[f64] {
        let start = self.layout.level_offset(j);
        &self.details[start..start + (1usize << (j + self.layout.jd))]
    }

    pub fn level_mut(&mut self, j: i32) -> &mut [f64] {
        let start = self.layout.level_offset(j);
        let len = 1usize << (j + self.layout.jd);
        &mut self.details[start..start + len]
    }

    pub fn iter(&self) -> impl Iterator<Item = (HaarIndex, f64)> + '_ {
        self.layout.haar_indices().zip(self.details.iter().copied())
    }

    /// Multiplies every level `j` by `multiplier(j)` and the scaling term by `scaling`.
    pub fn apply_multiplier(&mut self, multiplier: impl Fn(i32) -> f64, scaling: f64) {
        self.scaling *= scaling;
        for j in self.layout.min_level()..=self.layout.max_level() {
            let m = multiplier(j);
            self.level_mut(j).iter_mut().for_each(|d| *d *= m);
        }
    }

    /// `Σ details²`, without the scaling term.
    pub fn detail_energy(&self) -> f64 {
        self.details.iter().map(|d| d * d).sum()
    }
}

/// Pyramid transform in O(N): cell averages are merged pairwise, and each
/// parent interval of level `j` emits `2^{-j/2-1}(mean_left - mean_right)`.
pub fn haar_forward(f: &GridFunction) -> HaarCoefficients {
    let layout = f.layout;
    let mut coeffs = HaarCoefficients::zeros(layout);
    let mut means = f.values.clone();
    for j in (layout.min_level()..=layout.max_level()).rev() {
        let scale = half_pow2(-j) * 0.5;
        let half = means.len() / 2;
        let level = coeffs.level_mut(j);
        for k in 0..half {
            let (l, r) = (means[2 * k], means[2 * k + 1]);
            level[k] = scale * (l - r);
            means[k] = 0.5 * (l + r);
        }
        means.truncate(half);
    }
    coeffs.scaling = means[0] * half_pow2(layout.jd);
    coeffs
}

/// Inverse pyramid; left inverse of [`haar_forward`].
pub fn haar_inverse(c: &HaarCoefficients) -> GridFunction {
    let layout = c.layout;
    let mut means = Vec::with_capacity(layout.cells());
    means.push(c.scaling * half_pow2(-layout.jd));
    for j in layout.min_level()..=layout.max_level() {
        let amp = half_pow2(j);
        let level = c.level(j);
        let mut next = Vec::with_capacity(means.len() * 2);
        for (m, d) in means.iter().zip(level) {
            next.push(m + d * amp);
            next.push(m - d * amp);
        }
        means = next;
    }
    GridFunction { layout, values: means }
}

/// Square function of the detail part, together with the omitted scaling coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareFunction {
    pub values: GridFunction,
    pub scaling: f64,
}

/// `S f = (Σ_h |⟨f,h⟩|² |I(h)|^{-1} χ_{I(h)})^{1/2}` on the grid.
pub fn square_function(f: &GridFunction) -> SquareFunction {
    let layout = f.layout;
    let coeffs = haar_forward(f);
    let mut acc = vec![0.0; layout.cells()];
    let total = layout.levels();
    for j in layout.min_level()..=layout.max_level() {
        let inv_len = pow2(j);
        let block = 1usize << (total - (j + layout.jd) as u32);
        for (k, d) in coeffs.level(j).iter().enumerate() {
            let w = d * d * inv_len;
            if w != 0.0 {
                acc[k * block..(k + 1) * block].iter_mut().for_each(|a| *a += w);
            }
        }
    }
    let values = acc.into_iter().map(f64::sqrt).collect();
    SquareFunction { values: GridFunction { layout, values }, scaling: coeffs.scaling }
}

/// Exponent of an `L^p` norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LpExponent {
    Finite(f64),
    Infinity,
}

impl LpExponent {
    pub fn finite(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::NotANorm(p));
        }
        Ok(if p.is_infinite() { LpExponent::Infinity } else { LpExponent::Finite(p) })
    }
}

impl fmt::Display for LpExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpExponent::Finite(p) => write!(f, "{p}"),
            LpExponent::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for LpExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
            return Ok(LpExponent::Infinity);
        }
        let p: f64 = s.parse().map_err(|_| Error::Parse(format!("invalid L^p exponent {s:?}")))?;
        LpExponent::finite(p)
    }
}

impl Serialize for LpExponent {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for LpExponent {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Exact cell quadrature `(Σ |f_c|^p 2^{-Jr})^{1/p}`, or `max |f_c|` for `p = ∞`.
pub fn lp_norm(f: &GridFunction, p: LpExponent) -> Result<f64> {
    let w = f.layout.cell_width();
    match p {
        LpExponent::Infinity => Ok(f.values.iter().map(|v| v.abs()).fold(0.0, f64::max)),
        LpExponent::Finite(p) if p.is_nan() || p < 1.0 => Err(Error::NotANorm(p)),
        LpExponent::Finite(p) if p == 1.0 => Ok(f.values.iter().map(|v| v.abs()).sum::<f64>() * w),
        LpExponent::Finite(p) if p == 2.0 => Ok((f.values.iter().map(|v| v * v).sum::<f64>() * w).sqrt()),
        LpExponent::Finite(p) => {
            // Scale by the max to keep |f|^p in range.
            let top = f.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
            if top == 0.0 {
                return Ok(0.0);
            }
            let s: f64 = f.values.iter().map(|v| (v.abs() / top).powf(p)).sum();
            Ok(top * (s * w).powf(1.0 / p))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout(jd: i32, jr: i32) -> GridLayout {
        GridLayout::new(jd, jr).unwrap()
    }

    /// Direct O(N²) inner products against sampled Haar functions.
    fn direct_coefficients(f: &GridFunction) -> (f64, Vec<f64>) {
        let l = f.layout();
        let w = l.cell_width();
        let scaling = f.values().iter().sum::<f64>() * w * half_pow2(-l.jd);
        let details = l
            .haar_indices()
            .map(|idx| {
                let h = GridFunction::haar(l, idx).unwrap();
                h.values().iter().zip(f.values()).map(|(a, b)| a * b).sum::<f64>() * w
            })
            .collect();
        (scaling, details)
    }

    fn pseudo_random(layout: GridLayout, seed: u64) -> GridFunction {
        let mut s = seed;
        let values = (0..layout.cells())
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
            })
            .collect();
        GridFunction::new(layout, values).unwrap()
    }

    #[test]
    fn eval_examples() {
        let h = HaarIndex::new(0, 0);
        assert_eq!(haar_eval(&h, &DyadicPoint::new(1, 2)), 1.0);
        assert_eq!(haar_eval(&h, &DyadicPoint::new(3, 2)), -1.0);
        let h = HaarIndex::new(2, 5);
        assert_eq!(haar_eval(&h, &DyadicPoint::new(4, 2)), 0.0);
        assert_eq!(haar_eval(&h, &DyadicPoint::new(6, 2)), 0.0);
        assert_eq!(haar_eval(&h, &DyadicPoint::new(10, 3)), 2.0);
        assert_eq!(haar_eval(&h, &DyadicPoint::new(11, 3)), -2.0);
    }

    #[test]
    fn layout_validation() {
        assert!(GridLayout::new(0, 0).is_err());
        assert!(GridLayout::new(-2, 3).is_ok());
        assert!(GridLayout::new(20, 20).is_err());
        assert_eq!(layout(2, 3).haar_indices().count(), 31);
    }

    #[test]
    fn constant_has_only_scaling() {
        let l = layout(3, 2);
        let c = haar_forward(&GridFunction::constant(l, 2.5));
        assert!(c.details().iter().all(|d| *d == 0.0));
        assert!((c.scaling - 2.5 * half_pow2(3)).abs() < 1e-14);
    }

    #[test]
    fn haar_samples_have_single_coefficient() {
        let l = layout(2, 3);
        for idx in l.haar_indices() {
            let c = haar_forward(&GridFunction::haar(l, idx).unwrap());
            for (other, v) in c.iter() {
                let expected = if other == idx { 1.0 } else { 0.0 };
                assert!((v - expected).abs() < 1e-14, "{idx} vs {other}: {v}");
            }
            assert!(c.scaling.abs() < 1e-14);
        }
    }

    #[test]
    fn forward_matches_direct_inner_products() {
        let l = layout(1, 3);
        let f = pseudo_random(l, 7);
        let c = haar_forward(&f);
        let (s, d) = direct_coefficients(&f);
        assert!((c.scaling - s).abs() < 1e-13);
        for (a, b) in c.details().iter().zip(&d) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn inverse_examples() {
        let l = layout(3, 4);
        assert!(haar_inverse(&HaarCoefficients::zeros(l)).values().iter().all(|v| *v == 0.0));
        let idx = HaarIndex::new(1, 3);
        let c = HaarCoefficients::from_entries(l, 0.0, [(idx, 1.0)]).unwrap();
        let g = haar_inverse(&c);
        assert!(g.max_abs_diff(&GridFunction::haar(l, idx).unwrap()) < 1e-15);

        let f = pseudo_random(layout(4, 6), 11);
        assert!(haar_inverse(&haar_forward(&f)).max_abs_diff(&f) < 1e-12);
    }

    #[test]
    fn malformed_coefficients_rejected() {
        let l = layout(2, 2);
        assert!(matches!(
            HaarCoefficients::from_parts(l, 0.0, vec![0.0; 3]),
            Err(Error::MalformedCoefficients(_))
        ));
        assert!(HaarCoefficients::from_entries(l, 0.0, [(HaarIndex::new(2, 0), 1.0)]).is_err());
    }

    #[test]
    fn square_function_examples() {
        let l = layout(2, 3);
        let idx = HaarIndex::new(1, 2);
        let h = GridFunction::haar(l, idx).unwrap();
        let s = square_function(&h);
        let supp = idx.support();
        for c in 0..l.cells() {
            let expected = if supp.contains(&l.cell_midpoint(c)) { half_pow2(1) } else { 0.0 };
            assert!((s.values.values()[c] - expected).abs() < 1e-14);
        }
        let z = square_function(&GridFunction::zeros(l));
        assert!(z.values.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn square_function_l2_is_detail_energy() {
        let f = pseudo_random(layout(3, 4), 3);
        let s = square_function(&f);
        let c = haar_forward(&f);
        let s2 = lp_norm(&s.values, LpExponent::Finite(2.0)).unwrap();
        assert!((s2 * s2 - c.detail_energy()).abs() < 1e-12);
        let f2 = lp_norm(&f, LpExponent::Finite(2.0)).unwrap();
        assert!((s2 * s2 + s.scaling * s.scaling - f2 * f2).abs() < 1e-12 * f2 * f2);
    }

    #[test]
    fn lp_norm_examples() {
        let l = layout(2, 5);
        let one = GridFunction::indicator_cell(l, 3);
        assert_eq!(lp_norm(&one, LpExponent::Finite(1.0)).unwrap(), pow2(-5));
        let idx = HaarIndex::new(3, 1);
        let h = GridFunction::haar(l, idx).unwrap();
        assert!((lp_norm(&h, LpExponent::Finite(2.0)).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(lp_norm(&h, LpExponent::Infinity).unwrap(), half_pow2(3));
        assert!(matches!(lp_norm(&h, LpExponent::Finite(0.5)), Err(Error::NotANorm(_))));
        let p3 = lp_norm(&h, LpExponent::Finite(3.0)).unwrap();
        // |h|^3 integrates to 2^{3j/2} 2^{-j}
        assert!((p3 - (half_pow2(9) * pow2(-3)).powf(1.0 / 3.0)).abs() < 1e-13);
    }

    #[test]
    fn exponent_parsing() {
        assert_eq!("inf".parse::<LpExponent>().unwrap(), LpExponent::Infinity);
        assert_eq!("2".parse::<LpExponent>().unwrap(), LpExponent::Finite(2.0));
        assert!("0.5".parse::<LpExponent>().is_err());
        assert!("x".parse::<LpExponent>().is_err());
    }
}
