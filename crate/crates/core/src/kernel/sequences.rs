//! The three sequence coordinates of a kernel in the class: shell values
//! `k̄`, profile coefficients `ᾱ` and Haar eigenvalues `Λ̄`.
//!
//! Each sequence is stored on a finite window and continued by a fixed tail:
//!
//! | sequence | below the window     | above the window |
//! |----------|----------------------|------------------|
//! | `Λ̄`      | 1                    | 0                |
//! | `ᾱ`      | 0                    | 0                |
//! | `k̄`      | first window value   | 0                |
//!
//! The six conversions map windows onto each other as
//! `Λ[lo, hi] → α[lo, hi+1]`, `Λ[lo, hi] → k[-hi-1, -lo]`,
//! `α[lo, hi] → k[-hi, -lo]` and their inverses.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::pow2;

/// A finite index window `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub lo: i32,
    pub hi: i32,
}

impl Window {
    pub fn new(lo: i32, hi: i32) -> Result<Self> {
        if lo > hi {
            return Err(Error::IncompatibleWindows(format!("empty window [{lo}, {hi}]")));
        }
        // Keep every derived index (and 2^index) representable.
        if lo < -1000 || hi > 1000 {
            return Err(Error::IncompatibleWindows(format!("window [{lo}, {hi}] exceeds [-1000, 1000]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, j: i32) -> bool {
        (self.lo..=self.hi).contains(&j)
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<i32> {
        self.lo..=self.hi
    }

    pub fn shifted(&self, by: i32) -> Result<Self> {
        let lo = self.lo.checked_add(by).ok_or(Error::Overflow("window shift"))?;
        let hi = self.hi.checked_add(by).ok_or(Error::Overflow("window shift"))?;
        Window::new(lo, hi)
    }

    /// Parses `lo:hi`.
    pub fn parse(s: &str) -> Result<Self> {
        let (lo, hi) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected <lo>:<hi>, got {s:?}")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<i32>()
                .map_err(|_| Error::Parse(format!("invalid window bound {v:?}")))
        };
        Window::new(parse(lo)?, parse(hi)?)
    }
}

impl std::fmt::Display for Window {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

fn check_values(window: Window, values: &[f64]) -> Result<()> {
    if values.len() != window.len() {
        return Err(Error::IncompatibleWindows(format!(
            "window [{}, {}] holds {} values, got {}",
            window.lo,
            window.hi,
            window.len(),
            values.len()
        )));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("non-finite sequence value {v}")));
    }
    Ok(())
}

/// Eigenvalue sequence `Λ_j`; 1 below the window, 0 above.
///
/// Alongside `Λ_j` the complement `μ_j = 1 - Λ_j` is stored, so that
/// constructions with a closed form for `μ` keep full relative precision
/// where `Λ_j` is close to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaSeq {
    window: Window,
    values: Vec<f64>,
    complement: Vec<f64>,
}

/// Profile coefficients `α_j`; 0 outside the window.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaSeq {
    window: Window,
    values: Vec<f64>,
}

/// Shell values `k_m`; constant (the first value) below the window, 0 above.
#[derive(Debug, Clone, PartialEq)]
pub struct KSeq {
    window: Window,
    values: Vec<f64>,
}

macro_rules! windowed {
    ($t:ty, $below:expr, $above:expr) => {
        impl $t {
            pub fn new(window: Window, values: Vec<f64>) -> Result<Self> {
                check_values(window, &values)?;
                Ok(Self { window, values })
            }

            pub(crate) fn from_fn(window: Window, f: impl Fn(i32) -> f64) -> Self {
                Self { window, values: window.indices().map(f).collect() }
            }

            pub fn window(&self) -> Window {
                self.window
            }

            pub fn values(&self) -> &[f64] {
                &self.values
            }

            /// Value at any integer index, using the tail convention.
            pub fn get(&self, j: i32) -> f64 {
                if j < self.window.lo {
                    let below: fn(&Self) -> f64 = $below;
                    below(self)
                } else if j > self.window.hi {
                    $above
                } else {
                    self.values[(j - self.window.lo) as usize]
                }
            }

            pub fn iter(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
                self.window.indices().zip(self.values.iter().copied())
            }
        }
    };
}

windowed!(AlphaSeq, |_| 0.0, 0.0);
windowed!(KSeq, |s| s.values[0], 0.0);

impl LambdaSeq {
    pub fn new(window: Window, values: Vec<f64>) -> Result<Self> {
        check_values(window, &values)?;
        let complement = values.iter().map(|v| 1.0 - v).collect();
        Ok(Self { window, values, complement })
    }

    /// Builds the sequence from `μ_j = 1 - Λ_j`.
    pub fn from_complement(window: Window, complement: Vec<f64>) -> Result<Self> {
        check_values(window, &complement)?;
        let values = complement.iter().map(|m| 1.0 - m).collect();
        Ok(Self { window, values, complement })
    }

    /// Builds the sequence from both `Λ_j` and `μ_j`, which must sum to 1.
    pub fn from_parts(window: Window, values: Vec<f64>, complement: Vec<f64>) -> Result<Self> {
        check_values(window, &values)?;
        check_values(window, &complement)?;
        for (j, (v, m)) in window.indices().zip(values.iter().zip(&complement)) {
            if (v + m - 1.0).abs() > 2.0 * f64::EPSILON {
                return Err(Error::Domain(format!("lambda[{j}] = {v} and its complement {m} do not sum to 1")));
            }
        }
        Ok(Self { window, values, complement })
    }

    pub(crate) fn from_fn(window: Window, f: impl Fn(i32) -> f64) -> Self {
        let values: Vec<f64> = window.indices().map(f).collect();
        let complement = values.iter().map(|v| 1.0 - v).collect();
        Self { window, values, complement }
    }

    /// Builds `Λ` from a function returning `(Λ_j, μ_j)`.
    pub(crate) fn from_pair_fn(window: Window, f: impl Fn(i32) -> (f64, f64)) -> Self {
        let (values, complement) = window.indices().map(f).unzip();
        Self { window, values, complement }
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn complements(&self) -> &[f64] {
        &self.complement
    }

    pub fn get(&self, j: i32) -> f64 {
        if j < self.window.lo {
            1.0
        } else if j > self.window.hi {
            0.0
        } else {
            self.values[(j - self.window.lo) as usize]
        }
    }

    /// `μ_j = 1 - Λ_j`.
    pub fn complement(&self, j: i32) -> f64 {
        if j < self.window.lo {
            0.0
        } else if j > self.window.hi {
            1.0
        } else {
            self.complement[(j - self.window.lo) as usize]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.window.indices().zip(self.values.iter().copied())
    }
}

impl AlphaSeq {
    /// `Σ_j α_j`; equals 1 for a kernel in the class.
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}

impl KSeq {
    /// Constant value taken below the window.
    pub fn head(&self) -> f64 {
        self.values[0]
    }

    /// `Σ_{m ≤ top} k_m 2^{m-1}`, with the constant head summed in closed form.
    pub fn mass_up_to(&self, top: i32) -> f64 {
        let lo = self.window.lo;
        if top < lo {
            return self.head() * pow2(top);
        }
        let hi = top.min(self.window.hi);
        let body: f64 = (lo..=hi).map(|m| self.get(m) * pow2(m - 1)).sum();
        self.head() * pow2(lo - 1) + body
    }

    /// `Σ_m k_m 2^{m-1}`; equals 1 for a kernel in the class.
    pub fn total_mass(&self) -> f64 {
        self.mass_up_to(self.window.hi)
    }
}

/// `α_j = Λ_{j-1} - Λ_j`.
pub fn lambda_to_alpha(lambda: &LambdaSeq) -> AlphaSeq {
    let w = lambda.window;
    let out = Window { lo: w.lo, hi: w.hi + 1 };
    AlphaSeq::from_fn(out, |j| {
        if lambda.get(j - 1) >= 0.5 {
            lambda.complement(j) - lambda.complement(j - 1)
        } else {
            lambda.get(j - 1) - lambda.get(j)
        }
    })
}

/// `Λ_j = Σ_{l > j} α_l`.
pub fn alpha_to_lambda(alpha: &AlphaSeq) -> LambdaSeq {
    let w = alpha.window;
    let out = Window { lo: w.lo, hi: (w.hi - 1).max(w.lo) };
    let mut values = vec![0.0; out.len()];
    let mut suffix = 0.0;
    for j in (w.lo..=w.hi).rev() {
        // suffix = Σ_{l > j} α_l
        if out.contains(j) {
            values[(j - out.lo) as usize] = suffix;
        }
        suffix += alpha.get(j);
    }
    LambdaSeq::from_fn(out, |j| values[(j - out.lo) as usize])
}

/// `k_j = Σ_{i ≥ j} 2^{-i} α_{-i}`.
pub fn alpha_to_k(alpha: &AlphaSeq) -> KSeq {
    let w = alpha.window;
    let out = Window { lo: -w.hi, hi: -w.lo };
    // Prefix sums P(L) = Σ_{l ≤ L} α_l 2^l, so k_j = P(-j).
    let mut prefix = vec![0.0; w.len()];
    let mut acc = 0.0;
    for (i, l) in w.indices().enumerate() {
        acc += alpha.get(l) * pow2(l);
        prefix[i] = acc;
    }
    KSeq::from_fn(out, |j| prefix[(-j - w.lo) as usize])
}

/// `α_j = 2^{-j} (k_{-j} - k_{-j+1})`.
pub fn k_to_alpha(k: &KSeq) -> AlphaSeq {
    let w = k.window;
    let out = Window { lo: -w.hi, hi: -w.lo };
    AlphaSeq::from_fn(out, |j| pow2(-j) * (k.get(-j) - k.get(-j + 1)))
}

/// `Λ_j = ½ (-k_{-j} 2^{-j} + Σ_{l < -j} k_l 2^l)`.
pub fn k_to_lambda(k: &KSeq) -> LambdaSeq {
    let w = k.window;
    let out = Window { lo: -w.hi, hi: -w.lo };
    // Σ_{l < n} k_l 2^l = head·2^{lo} + Σ_{l=lo}^{n-1} k_l 2^l
    let mut partial = Vec::with_capacity(w.len() + 1);
    let mut acc = k.head() * pow2(w.lo);
    partial.push(acc);
    for l in w.indices() {
        acc += k.get(l) * pow2(l);
        partial.push(acc);
    }
    LambdaSeq::from_fn(out, |j| {
        let n = -j;
        let below = partial[(n - w.lo) as usize];
        0.5 * (-k.get(n) * pow2(n) + below)
    })
}

/// `k_j = -2^{-j} Λ_{-j} + Σ_{i ≥ j+1} 2^{-i} Λ_{-i}`.
///
/// Where `Λ_{-j} ≥ 1/2` the same identity is evaluated on `μ = 1 - Λ`,
/// `k_j = 2^{-j} μ_{-j} - Σ_{i ≥ j+1} 2^{-i} μ_{-i}`, which avoids cancelling
/// two terms of size `2^{-j}` against a result of size `4^{-j}`.
pub fn lambda_to_k(lambda: &LambdaSeq) -> KSeq {
    let w = lambda.window;
    let out = Window { lo: -w.hi - 1, hi: -w.lo };
    let mut values = vec![0.0; out.len()];
    // Running sums over i ≥ j+1, built from the top of the k window down.
    // Beyond the window Λ = 1, μ = 0, and Σ_{i > -lo} 2^{-i} = 2^{lo}.
    let mut sum_lambda = pow2(w.lo);
    let mut sum_mu = 0.0;
    for j in out.indices().rev() {
        let lam = lambda.get(-j);
        let mu = lambda.complement(-j);
        let scale = pow2(-j);
        values[(j - out.lo) as usize] = if lam >= 0.5 {
            scale * mu - sum_mu
        } else {
            sum_lambda - scale * lam
        };
        sum_lambda += scale * lam;
        sum_mu += scale * mu;
    }
    KSeq { window: out, values }
}
