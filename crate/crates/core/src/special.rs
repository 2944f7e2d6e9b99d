//! Hyperbolic helpers that stay finite where `sinh` itself overflows.
//!
//! Thermal prefactors are ratios such as `sinh(a) / (sinh(b) sinh(c))` whose
//! numerator and denominator overflow long before the ratio does. Arguments
//! above [`DIRECT_LIMIT`] are routed through `ln sinh`.

use std::f64::consts::LN_2;

/// Largest argument evaluated with plain `sinh`.
pub const DIRECT_LIMIT: f64 = 700.0;

/// `ln(sinh(x))` for `x > 0`.
pub fn ln_sinh(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 20.0 {
        x.sinh().ln()
    } else {
        // sinh x = e^x (1 - e^{-2x}) / 2
        x - LN_2 + (-(-2.0 * x).exp()).ln_1p()
    }
}

/// `sinh(a) / (sinh(b) * sinh(c))` for positive arguments.
pub fn sinh_ratio(a: f64, b: f64, c: f64) -> f64 {
    if a.max(b).max(c) <= DIRECT_LIMIT {
        a.sinh() / (b.sinh() * c.sinh())
    } else {
        (ln_sinh(a) - ln_sinh(b) - ln_sinh(c)).exp()
    }
}

/// `1 / sinh²(x)` for `x > 0`, written as `4 e^{-2x} / (1 - e^{-2x})²`.
pub fn inv_sinh_sq(x: f64) -> f64 {
    let e = (-2.0 * x).exp();
    let d = (-2.0 * x).exp_m1();
    4.0 * e / (d * d)
}

/// `x² / sinh²(x)`, equal to 1 at the origin.
pub fn x_over_sinh_sq(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        // x/sinh x = 1 - x²/6 + ...
        let r = 1.0 - x * x / 6.0;
        r * r
    } else {
        x * x * inv_sinh_sq(x.abs())
    }
}
