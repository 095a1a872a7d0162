//! Exact dyadic geometry on the half line.
//!
//! Points are binary rationals `n·2^-J`, so membership in a dyadic interval
//! and the dyadic distance are decided by integer bit operations. The
//! distance `δ(x, y)` is the length of the smallest dyadic interval holding
//! both points; it only takes values `2^m` (or zero on the diagonal).

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The dyadic interval `[k·2^-j, (k+1)·2^-j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicInterval {
    pub level: i32,
    pub position: u64,
}

impl DyadicInterval {
    pub const fn new(level: i32, position: u64) -> Self {
        Self { level, position }
    }

    /// Exact length `2^-level`.
    pub fn length(&self) -> f64 {
        pow2(-self.level)
    }

    pub fn left(&self) -> DyadicPoint {
        DyadicPoint::new(self.position, self.level)
    }

    pub fn parent(&self) -> DyadicInterval {
        DyadicInterval::new(self.level - 1, self.position / 2)
    }

    /// True when this interval is the left half of its parent.
    pub fn is_left_child(&self) -> bool {
        self.position.is_multiple_of(2)
    }

    pub fn left_half(&self) -> DyadicInterval {
        DyadicInterval::new(self.level + 1, 2 * self.position)
    }

    pub fn right_half(&self) -> DyadicInterval {
        DyadicInterval::new(self.level + 1, 2 * self.position + 1)
    }

    pub fn contains(&self, x: &DyadicPoint) -> bool {
        x.floor_at_level(self.level) == Some(self.position as u128)
    }

    /// Nested-or-disjoint containment test between dyadic intervals.
    pub fn contains_interval(&self, other: &DyadicInterval) -> bool {
        if other.level < self.level {
            return false;
        }
        let shift = (other.level - self.level) as u32;
        if shift >= 64 {
            return self.position == 0;
        }
        other.position >> shift == self.position
    }

    pub fn is_disjoint(&self, other: &DyadicInterval) -> bool {
        !self.contains_interval(other) && !other.contains_interval(self)
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "I^{}_{}", self.level, self.position)
    }
}

/// An exact point `numerator · 2^-exponent` of the half line.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DyadicPoint {
    pub numerator: u64,
    pub exponent: i32,
}

impl DyadicPoint {
    pub const fn new(numerator: u64, exponent: i32) -> Self {
        Self { numerator, exponent }
    }

    pub const fn integer(n: u64) -> Self {
        Self::new(n, 0)
    }

    /// Same point with trailing zero bits of the numerator removed.
    pub fn reduced(&self) -> Self {
        if self.numerator == 0 {
            return Self::new(0, 0);
        }
        let tz = self.numerator.trailing_zeros();
        Self::new(self.numerator >> tz, self.exponent - tz as i32)
    }

    /// `2^j · x`, exact.
    pub fn scale_pow2(&self, j: i32) -> Self {
        Self::new(self.numerator, self.exponent - j)
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator as f64 * pow2(-self.exponent)
    }

    /// `⌊x · 2^level⌋`, or `None` if it does not fit in 128 bits.
    pub fn floor_at_level(&self, level: i32) -> Option<u128> {
        let shift = level as i64 - self.exponent as i64;
        let n = self.numerator as u128;
        if shift >= 0 {
            if n == 0 {
                return Some(0);
            }
            if shift as u32 >= n.leading_zeros() {
                return None;
            }
            Some(n << shift)
        } else if -shift >= 128 {
            Some(0)
        } else {
            Some(n >> (-shift))
        }
    }
}

impl PartialEq for DyadicPoint {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = (self.reduced(), other.reduced());
        a.numerator == b.numerator && (a.numerator == 0 || a.exponent == b.exponent)
    }
}

impl Eq for DyadicPoint {}

impl PartialOrd for DyadicPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (self.reduced(), other.reduced());
        match (a.numerator, b.numerator) {
            (0, 0) => return Ordering::Equal,
            (0, _) => return Ordering::Less,
            (_, 0) => return Ordering::Greater,
            _ => {}
        }
        // Compare magnitudes by the position of the leading bit first.
        let lead = |p: &DyadicPoint| (64 - p.numerator.leading_zeros()) as i64 - p.exponent as i64;
        match lead(&a).cmp(&lead(&b)) {
            Ordering::Equal => {}
            ord => return ord,
        }
        // Same leading bit: align to a common exponent (difference < 64 after reduction).
        let j = a.exponent.max(b.exponent);
        let na = (a.numerator as u128) << (j - a.exponent);
        let nb = (b.numerator as u128) << (j - b.exponent);
        na.cmp(&nb)
    }
}

impl fmt::Display for DyadicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·2^{}", self.numerator, -self.exponent)
    }
}

/// A value of the dyadic distance: zero or an integer power of two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DeltaValue {
    Zero,
    Pow2(i32),
}

impl DeltaValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            DeltaValue::Zero => 0.0,
            DeltaValue::Pow2(m) => pow2(*m),
        }
    }

    pub fn exponent(&self) -> Option<i32> {
        match self {
            DeltaValue::Zero => None,
            DeltaValue::Pow2(m) => Some(*m),
        }
    }
}

impl PartialOrd for DeltaValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DeltaValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (DeltaValue::Zero, DeltaValue::Zero) => Ordering::Equal,
            (DeltaValue::Zero, _) => Ordering::Less,
            (_, DeltaValue::Zero) => Ordering::Greater,
            (DeltaValue::Pow2(a), DeltaValue::Pow2(b)) => a.cmp(b),
        }
    }
}

/// `2^e` for integer `e`, exact over the normal and subnormal range.
pub fn pow2(e: i32) -> f64 {
    match e {
        1024.. => f64::INFINITY,
        -1022..=1023 => f64::from_bits(((e + 1023) as u64) << 52),
        -1074..=-1023 => f64::from_bits(1u64 << (e + 1074)),
        _ => 0.0,
    }
}

fn bit_length(x: u128) -> u32 {
    128 - x.leading_zeros()
}

/// Exponent `m` with `δ(x, y) = 2^m`, for distinct points.
fn separation_exponent(x: &DyadicPoint, y: &DyadicPoint) -> Option<i32> {
    let (x, y) = (x.reduced(), y.reduced());
    // Order so that `fine` has the larger exponent.
    let (fine, coarse) = if x.exponent >= y.exponent { (x, y) } else { (y, x) };
    let d = (fine.exponent as i64 - coarse.exponent as i64) as u32;
    let bits = if d < 64 {
        let aligned = (coarse.numerator as u128) << d;
        let diff = aligned ^ fine.numerator as u128;
        if diff == 0 {
            return None;
        }
        bit_length(diff) as i64
    } else if coarse.numerator == 0 {
        if fine.numerator == 0 {
            return None;
        }
        bit_length(fine.numerator as u128) as i64
    } else {
        // The shifted coarse numerator and the fine numerator share no bits.
        bit_length(coarse.numerator as u128) as i64 + d as i64
    };
    Some((bits - fine.exponent as i64) as i32)
}

/// The smallest dyadic interval containing both points; they sit in opposite halves.
pub fn smallest_common_interval(x: &DyadicPoint, y: &DyadicPoint) -> Result<DyadicInterval> {
    let m = separation_exponent(x, y).ok_or(Error::IdenticalPoints)?;
    let level = -m;
    let position = x
        .floor_at_level(level)
        .and_then(|k| u64::try_from(k).ok())
        .ok_or(Error::Overflow("interval position exceeds 64 bits"))?;
    Ok(DyadicInterval::new(level, position))
}

/// The dyadic distance `δ(x, y)`.
pub fn dyadic_distance(x: &DyadicPoint, y: &DyadicPoint) -> DeltaValue {
    match separation_exponent(x, y) {
        None => DeltaValue::Zero,
        Some(m) => DeltaValue::Pow2(m),
    }
}

/// Measure of the shell `{y : δ(x, y) = 2^m}`; independent of `x`.
pub fn shell_measure(_x: &DyadicPoint, m: i32) -> f64 {
    pow2(m - 1)
}

/// Region of integration for [`delta_power_integral`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// `{y : δ(x, y) ≤ r}`
    Ball,
    /// `{y : δ(x, y) ≥ r}`
    Tail,
}

/// `c(α) = ½ (1 − 2^{−(1+α)})^{-1}`, the ball constant for `α > −1`.
pub fn ball_constant(alpha: f64) -> f64 {
    0.5 / -(-(1.0 + alpha) * std::f64::consts::LN_2).exp_m1()
}

/// `c̃(α) = ½ (1 − 2^{1+α})^{-1}`, the tail constant for `α < −1`.
pub fn tail_constant(alpha: f64) -> f64 {
    0.5 / -((1.0 + alpha) * std::f64::consts::LN_2).exp_m1()
}

/// `⌊log2 r⌋` for finite positive `r`, computed from the bit pattern.
pub fn floor_log2(r: f64) -> i32 {
    assert!(r > 0.0 && r.is_finite(), "floor_log2 needs a finite positive value");
    let bits = r.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    if exp == 0 {
        // subnormal
        let mant = bits & ((1u64 << 52) - 1);
        return -1074 + (63 - mant.leading_zeros() as i32);
    }
    exp - 1023
}

fn ceil_log2(r: f64) -> i32 {
    let f = floor_log2(r);
    if pow2(f) == r {
        f
    } else {
        f + 1
    }
}

/// `∫ δ(x,y)^α dy` over a ball `{δ ≤ r}` or a tail `{δ ≥ r}`, from the closed
/// geometric sums `½ Σ 2^{(1+α)m}`. Divergent cases return `+∞`.
pub fn delta_power_integral(alpha: f64, r: f64, region: Region) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("radius must be positive and finite, got {r}")));
    }
    let e = 1.0 + alpha;
    match region {
        Region::Ball => {
            if e <= 0.0 {
                return Ok(f64::INFINITY);
            }
            let j0 = floor_log2(r);
            Ok(ball_constant(alpha) * (e * j0 as f64).exp2())
        }
        Region::Tail => {
            if e >= 0.0 {
                return Ok(f64::INFINITY);
            }
            let j0 = ceil_log2(r);
            Ok(tail_constant(alpha) * (e * j0 as f64).exp2())
        }
    }
}
