//! Nonnegative reals stored by their natural logarithm.
//!
//! Every measure in this crate is carried as a [`LogNonNegative`]: in dimension
//! 10⁶ a ball measure like `ω_{n-1} ρⁿ / n` overflows `f64` long before the
//! ratios we care about stop being representable.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// A nonnegative quantity `e^{ln}`; `ln == -inf` encodes zero.
///
/// `ln` is never NaN and never `+inf`.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LogNonNegative {
    ln: f64,
}

impl LogNonNegative {
    pub const ZERO: Self = Self { ln: f64::NEG_INFINITY };
    pub const ONE: Self = Self { ln: 0.0 };

    /// Wraps a logarithm. Panics on NaN or `+inf`, both of which indicate a bug upstream.
    #[inline]
    pub fn from_ln(ln: f64) -> Self {
        assert!(!ln.is_nan(), "log-space value is NaN");
        assert!(ln != f64::INFINITY, "log-space value is +inf");
        Self { ln }
    }

    /// Fallible version of [`from_ln`](Self::from_ln).
    pub fn try_from_ln(ln: f64) -> Result<Self> {
        if ln.is_nan() || ln == f64::INFINITY {
            return domain(format!("invalid log-space value {ln}"));
        }
        Ok(Self { ln })
    }

    /// From a plain nonnegative finite value.
    pub fn from_value(x: f64) -> Result<Self> {
        if !(x >= 0.0) || !x.is_finite() {
            return domain(format!("{x} is not a finite nonnegative number"));
        }
        Ok(Self { ln: x.ln() })
    }

    #[inline]
    pub fn ln(self) -> f64 {
        self.ln
    }

    /// The plain value; may underflow to 0 or overflow to `inf`.
    #[inline]
    pub fn value(self) -> f64 {
        self.ln.exp()
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.ln == f64::NEG_INFINITY
    }

    pub fn powf(self, e: f64) -> Self {
        if e == 0.0 {
            return Self::ONE;
        }
        Self::from_ln(self.ln * e)
    }

    /// `self - other`, failing when `other` exceeds `self` by more than `rel_slack`
    /// (relative). Differences inside the slack are clamped to zero.
    pub fn checked_sub(self, other: Self, rel_slack: f64) -> Result<Self> {
        if other.is_zero() {
            return Ok(self);
        }
        let d = other.ln - self.ln;
        if d >= 0.0 {
            if d <= rel_slack {
                return Ok(Self::ZERO);
            }
            return domain(format!(
                "log-space subtraction would be negative (ln a = {}, ln b = {})",
                self.ln, other.ln
            ));
        }
        // ln(a - b) = ln a + ln(1 - e^{d}), d < 0
        let t = if d > -std::f64::consts::LN_2 {
            (-d.exp_m1()).ln()
        } else {
            (-d.exp()).ln_1p()
        };
        Ok(Self::from_ln(self.ln + t))
    }

    /// Log of the relative difference `|a - b| / max(a, b)`; useful in tests.
    pub fn rel_diff(self, other: Self) -> f64 {
        if self.is_zero() && other.is_zero() {
            return 0.0;
        }
        let (hi, lo) = if self.ln >= other.ln { (self, other) } else { (other, self) };
        -(lo.ln - hi.ln).exp_m1()
    }

    pub fn max(self, other: Self) -> Self {
        if self.ln >= other.ln {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self.ln <= other.ln {
            self
        } else {
            other
        }
    }
}

/// `ln(e^a + e^b)`, exact for `-inf` operands.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Log-sum-exp over a slice; `-inf` for an empty or all-zero input.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|&x| (x - m).exp()).sum::<f64>().ln()
}

impl Add for LogNonNegative {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self::from_ln(log_add_exp(self.ln, rhs.ln))
    }
}

impl Mul for LogNonNegative {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        Self::from_ln(self.ln + rhs.ln)
    }
}

impl Div for LogNonNegative {
    type Output = Self;
    /// Division by zero panics through the `+inf` invariant.
    #[inline]
    fn div(self, rhs: Self) -> Self {
        if self.is_zero() {
            return Self::ZERO;
        }
        Self::from_ln(self.ln - rhs.ln)
    }
}

impl PartialOrd for LogNonNegative {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.ln.partial_cmp(&other.ln)
    }
}

impl std::iter::Sum for LogNonNegative {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

impl fmt::Debug for LogNonNegative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp({})", self.ln)
    }
}

impl fmt::Display for LogNonNegative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp({})", self.ln)
    }
}
