//! Vershik limit shape and the bulk limit of Frobenius correlations.

use std::f64::consts::PI;

/// `Π_i (1 + exp(π|ξ_i|/√6))^{-1}`.
pub fn bulk_limit(xis: &[f64]) -> f64 {
    let c = PI / 6f64.sqrt();
    xis.iter().map(|xi| 1.0 / (1.0 + (c * xi.abs()).exp())).product()
}

/// `(Υ(u), Υ'(u))` with `Υ(u) = (2√6/π) log(2 cosh(πu/(2√6)))`.
pub fn vershik(u: f64) -> (f64, f64) {
    let a = PI / (2.0 * 6f64.sqrt());
    let x = (a * u).abs();
    // log(2 cosh x) = x + log(1 + e^{-2x}) avoids overflow for large |u|.
    let log2cosh = x + (-2.0 * x).exp().ln_1p();
    (log2cosh / a, (a * u).tanh())
}
