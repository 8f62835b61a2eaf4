//! Closed real intervals `[lo, hi]` with the positive-orthant operators used
//! by interval inventory games.
//!
//! Subtraction and division are partial: they are only defined when the
//! result is again a well-formed interval, and the checked variants return an
//! [`Error`] instead of repairing the operands.

use std::fmt;
use std::iter::Sum;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::GUARD_SLACK;

/// A closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "RawInterval")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

#[derive(Deserialize)]
struct RawInterval {
    lo: f64,
    hi: f64,
}

impl TryFrom<RawInterval> for Interval {
    type Error = Error;

    fn try_from(raw: RawInterval) -> Result<Self> {
        Interval::new(raw.lo, raw.hi)
    }
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::NonFinite);
        }
        if lo > hi {
            return Err(Error::InvalidBounds { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    /// Like [`Interval::new`] but additionally requires `lo >= 0`.
    pub fn nonneg(lo: f64, hi: f64) -> Result<Self> {
        let x = Self::new(lo, hi)?;
        if lo < 0.0 {
            return Err(Error::NegativeOperand(lo));
        }
        Ok(x)
    }

    /// Degenerate interval `[c, c]`.
    pub const fn point(c: f64) -> Self {
        Interval { lo: c, hi: c }
    }

    /// Builds an interval from bounds that are ordered analytically but may
    /// cross by a rounding error. Crossings within `slack` collapse to the
    /// midpoint; larger ones are rejected.
    pub fn from_rounded(lo: f64, hi: f64, slack: f64) -> Result<Self> {
        if lo > hi && lo - hi <= slack {
            let mid = 0.5 * (lo + hi);
            return Self::new(mid, mid);
        }
        Self::new(lo, hi)
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// `|x| = hi - lo`.
    #[inline]
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_zero(&self) -> bool {
        self.lo == 0.0 && self.hi == 0.0
    }

    pub fn scale(&self, beta: f64) -> Result<Self> {
        if beta < 0.0 {
            return Err(Error::NegativeScalar(beta));
        }
        Self::new(beta * self.lo, beta * self.hi)
    }

    /// `[x.lo - y.lo, x.hi - y.hi]`, defined only when `|x| >= |y|`.
    pub fn sub_checked(&self, y: &Interval) -> Result<Self> {
        let (wx, wy) = (self.length(), y.length());
        if wx < wy {
            return Err(Error::WidthViolation {
                lhs_width: wx,
                rhs_width: wy,
            });
        }
        // wx >= wy can still round to lo > hi by an ulp
        Self::from_rounded(self.lo - y.lo, self.hi - y.hi, GUARD_SLACK)
    }

    /// `[x.lo * y.lo, x.hi * y.hi]` for nonnegative operands.
    pub fn mul_nonneg(&self, y: &Interval) -> Result<Self> {
        if self.lo < 0.0 {
            return Err(Error::NegativeOperand(self.lo));
        }
        if y.lo < 0.0 {
            return Err(Error::NegativeOperand(y.lo));
        }
        Self::new(self.lo * y.lo, self.hi * y.hi)
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.lo < 0.0 {
            return Err(Error::NegativeOperand(self.lo));
        }
        Self::new(self.lo.sqrt(), self.hi.sqrt())
    }

    /// `x * x` for a nonnegative interval.
    pub fn square(&self) -> Result<Self> {
        self.mul_nonneg(self)
    }

    /// `[x.lo / y.lo, x.hi / y.hi]`, defined only when `x.lo·y.hi <= x.hi·y.lo`.
    pub fn div_checked(&self, y: &Interval) -> Result<Self> {
        if y.lo == 0.0 || y.hi == 0.0 {
            return Err(Error::ZeroDenominator);
        }
        let lhs = self.lo * y.hi;
        let rhs = self.hi * y.lo;
        if lhs > rhs + GUARD_SLACK {
            return Err(Error::OrderViolation { lhs, rhs });
        }
        Self::from_rounded(self.lo / y.lo, self.hi / y.hi, GUARD_SLACK.max(1e-15 * rhs.abs()))
    }

    /// `x ⪰ y`: both bounds of `x` are at least those of `y`.
    #[inline]
    pub fn weakly_geq(&self, y: &Interval) -> bool {
        self.lo >= y.lo && self.hi >= y.hi
    }

    /// `x ⪯ y`.
    #[inline]
    pub fn weakly_leq(&self, y: &Interval) -> bool {
        y.weakly_geq(self)
    }

    /// Boundwise comparison with an absolute slack on each bound.
    pub fn weakly_geq_within(&self, y: &Interval, slack_lo: f64, slack_hi: f64) -> bool {
        self.lo + slack_lo >= y.lo && self.hi + slack_hi >= y.hi
    }
}

impl Add for Interval {
    type Output = Interval;

    fn add(self, y: Interval) -> Interval {
        Interval {
            lo: self.lo + y.lo,
            hi: self.hi + y.hi,
        }
    }
}

impl Sum for Interval {
    fn sum<I: Iterator<Item = Interval>>(iter: I) -> Interval {
        iter.fold(Interval::ZERO, Add::add)
    }
}

impl<'a> Sum<&'a Interval> for Interval {
    fn sum<I: Iterator<Item = &'a Interval>>(iter: I) -> Interval {
        iter.copied().sum()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "[{:.*}, {:.*}]", p, self.lo, p, self.hi),
            None => write!(f, "[{}, {}]", self.lo, self.hi),
        }
    }
}
