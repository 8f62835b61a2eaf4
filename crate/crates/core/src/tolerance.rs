//! Numeric tolerances shared by the validators and property checks.

/// Absolute floor for game-value comparisons.
pub const ABS: f64 = 1e-9;
/// Relative tolerance for game-value comparisons.
pub const REL: f64 = 1e-9;
/// Slack on analytical guard conditions (interval division, condition checks).
pub const GUARD_SLACK: f64 = 1e-12;

/// `max(1e-9, 1e-9·|scale|)`.
#[inline]
pub fn for_magnitude(scale: f64) -> f64 {
    ABS.max(REL * scale.abs())
}

/// Equality within [`for_magnitude`] of the larger operand.
#[inline]
pub fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= for_magnitude(a.abs().max(b.abs()))
}

/// `a <= b` up to [`for_magnitude`] of the larger operand.
#[inline]
pub fn approx_le(a: f64, b: f64) -> bool {
    a <= b + for_magnitude(a.abs().max(b.abs()))
}
