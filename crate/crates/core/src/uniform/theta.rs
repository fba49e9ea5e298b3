//! Genus-one theta functions and q-Pochhammer products for real `q ∈ [0, 1)`.
//!
//! `Θ(x) = Θ₁₁(x; q) = Σ_n (-1)^n q^{(n+1/2)²/2} x^{n+1/2}` is normative; its
//! product form carries the prefactor `q^{1/8}`. Evaluators that are
//! homogeneous in `Θ` use the reduced series without that prefactor, which
//! stays nondegenerate at `q = 0`.

use twofloat::TwoFloat;

use crate::error::{Error, Result};

/// Cap on the order of `(x d/dx)^k` derivatives.
pub const DEFAULT_MAX_DERIVATIVE: u32 = 12;

/// `q` plus the truncation policy for every q-series evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaContext {
    pub q: f64,
    /// Series stop once the remaining terms fall below `tail_eps` times the
    /// partial-sum magnitude.
    pub tail_eps: f64,
    pub max_terms: usize,
    /// `|Θ(arg)|` below this is treated as sitting on a pole of a quotient.
    pub pole_tol: f64,
    pub max_derivative: u32,
}

impl ThetaContext {
    pub fn new(q: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&q) {
            return Err(Error::domain(format!("q = {q} is outside [0, 1)")));
        }
        Ok(ThetaContext {
            q,
            tail_eps: 1e-17,
            max_terms: 100_000,
            pole_tol: 1e-13,
            max_derivative: DEFAULT_MAX_DERIVATIVE,
        })
    }

    pub fn with_tail_eps(mut self, eps: f64) -> Self {
        self.tail_eps = eps;
        self
    }

    pub fn with_pole_tol(mut self, tol: f64) -> Self {
        self.pole_tol = tol;
        self
    }

    /// `q = e^{-2πr}` for `r > 0`.
    pub fn from_r(r: f64) -> Result<Self> {
        if r.is_nan() || r <= 0.0 {
            return Err(Error::domain(format!("r = {r} must be positive")));
        }
        Self::new((-2.0 * std::f64::consts::PI * r).exp())
    }

    /// `r` with `q = e^{-2πr}`; infinite at `q = 0`.
    pub fn r(&self) -> f64 {
        -self.q.ln() / (2.0 * std::f64::consts::PI)
    }
}

/// `(a; q)_∞ = Π_{m ≥ 0} (1 - a q^m)`.
pub fn qpochhammer_a(a: f64, ctx: &ThetaContext) -> f64 {
    let mut prod = 1.0;
    let mut factor = a;
    for _ in 0..ctx.max_terms {
        if factor.abs() < ctx.tail_eps {
            break;
        }
        prod *= 1.0 - factor;
        factor *= ctx.q;
    }
    prod
}

/// `(q; q)_∞`.
pub fn qpochhammer(ctx: &ThetaContext) -> f64 {
    qpochhammer_a(ctx.q, ctx)
}

/// Sums `Σ_{n ≥ 0} (pair_n)`, where each pair is two symmetric terms,
/// stopping once terms are decreasing and below the tail threshold.
fn sum_pairs(ctx: &ThetaContext, mut pair: impl FnMut(usize) -> (f64, f64)) -> f64 {
    let mut sum = 0.0;
    let mut scale: f64 = 0.0;
    let mut prev = f64::INFINITY;
    for n in 0..ctx.max_terms {
        let (a, b) = pair(n);
        sum += a + b;
        let mag = a.abs().max(b.abs());
        scale = scale.max(mag).max(sum.abs());
        if n > 0 && mag <= prev && mag <= ctx.tail_eps * scale {
            break;
        }
        prev = mag;
    }
    sum
}

/// `1/x` to double-double accuracy by one Newton step from the f64
/// reciprocal. TwoFloat division itself is only good to about 1e-17.
fn recip(x: f64) -> TwoFloat {
    let y = TwoFloat::from(1.0 / x);
    let residual = TwoFloat::from(1.0) - TwoFloat::from(x) * y;
    y + y * residual
}

/// Reduced `q^{-1/8} (x d/dx)^k Θ(x) = Σ (-1)^n q^{n(n+1)/2} (n+1/2)^k x^{n+1/2}`.
///
/// Near `q → 1` the terms are of order one while the sum is exponentially
/// small, so the series is accumulated in double-double arithmetic. Terms are
/// built by repeated multiplication, which keeps every step exact to about
/// 32 digits.
pub fn theta11_reduced(k: u32, x: f64, ctx: &ThetaContext) -> f64 {
    let q = TwoFloat::from(ctx.q);
    let xd = TwoFloat::from(x);
    let inv_x = recip(x);
    // up = q^{n(n+1)/2} x^{n+1/2}, down = q^{n(n+1)/2} x^{-n-1/2}, qn = q^n
    let mut up = xd.sqrt();
    let mut down = up * inv_x;
    let mut qn = TwoFloat::from(1.0);
    let mut sum = TwoFloat::from(0.0);
    let mut prev = f64::INFINITY;
    for n in 0..ctx.max_terms {
        let half = TwoFloat::from(n as f64 + 0.5);
        let pk = half.powi(k as i32);
        // n ↦ -n-1 flips the sign of (n + 1/2) and of (-1)^n.
        let neg_pk = if k.is_multiple_of(2) { pk } else { -pk };
        let (a, b) = (up * pk, down * neg_pk);
        if n % 2 == 0 {
            sum += a - b;
        } else {
            sum += b - a;
        }
        let mag = a.hi().abs().max(b.hi().abs());
        // Relative to the partial sum, which may be far below the terms.
        if n > 0 && mag <= prev && (mag == 0.0 || mag <= ctx.tail_eps * sum.hi().abs()) {
            break;
        }
        prev = mag;
        qn *= q;
        up = up * qn * xd;
        down = down * qn * inv_x;
    }
    sum.hi() + sum.lo()
}

fn theta11_prefactor(q: f64) -> f64 {
    // q^{1/8}, normalized to 1 at q = 0 so that Θ(x) = x^{1/2} - x^{-1/2} there.
    if q == 0.0 {
        1.0
    } else {
        q.powf(0.125)
    }
}

fn check_x(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("theta argument {x} must be a positive real")))
    }
}

/// `Θ₁₁(x; q)` from its defining series.
pub fn theta11(x: f64, ctx: &ThetaContext) -> Result<f64> {
    check_x(x)?;
    Ok(theta11_prefactor(ctx.q) * theta11_reduced(0, x, ctx))
}

/// `q^{1/8} (x^{1/2} - x^{-1/2}) (q;q)_∞ (qx;q)_∞ (q/x;q)_∞`.
pub fn theta11_product(x: f64, ctx: &ThetaContext) -> Result<f64> {
    check_x(x)?;
    let q = ctx.q;
    Ok(theta11_prefactor(q)
        * (x.sqrt() - 1.0 / x.sqrt())
        * qpochhammer(ctx)
        * qpochhammer_a(q * x, ctx)
        * qpochhammer_a(q / x, ctx))
}

/// `Θ^{(k)}(x) = (x d/dx)^k Θ(x)`.
pub fn theta_deriv(k: u32, x: f64, ctx: &ThetaContext) -> Result<f64> {
    check_x(x)?;
    if k > ctx.max_derivative {
        return Err(Error::domain(format!(
            "derivative order {k} exceeds the cap {}",
            ctx.max_derivative
        )));
    }
    Ok(theta11_prefactor(ctx.q) * theta11_reduced(k, x, ctx))
}

/// `Θ₃(z; q) = Σ_n q^{n²/2} z^n` for real `z > 0`.
pub fn theta3(z: f64, ctx: &ThetaContext) -> Result<f64> {
    check_x(z)?;
    let q = ctx.q;
    let ln_z = z.ln();
    Ok(sum_pairs(ctx, |n| {
        let nf = n as f64;
        let qpow = q.powf(nf * nf / 2.0);
        if n == 0 {
            return (qpow, 0.0);
        }
        (qpow * (nf * ln_z).exp(), qpow * (-nf * ln_z).exp())
    }))
}

/// Jacobi triple product `(q;q)_∞ (-q^{1/2} z; q)_∞ (-q^{1/2}/z; q)_∞`.
pub fn theta3_product(z: f64, ctx: &ThetaContext) -> Result<f64> {
    check_x(z)?;
    let h = ctx.q.sqrt();
    Ok(qpochhammer(ctx) * qpochhammer_a(-h * z, ctx) * qpochhammer_a(-h / z, ctx))
}

/// Below this `r` the circle evaluation switches to the Jacobi-transformed sum.
pub const JACOBI_SWITCH_R: f64 = 0.05;

/// `Θ₃(e^{2πis}, e^{-2πr})`, which is real on the unit circle.
pub fn theta3_circle(s: f64, ctx: &ThetaContext) -> f64 {
    let r = ctx.r();
    let two_pi = 2.0 * std::f64::consts::PI;
    if r >= JACOBI_SWITCH_R {
        let q = ctx.q;
        let mut sum = 1.0;
        for n in 1..ctx.max_terms {
            let nf = n as f64;
            let weight = 2.0 * q.powf(nf * nf / 2.0);
            sum += weight * (two_pi * nf * s).cos();
            // The cosine can vanish, so the stopping test uses the weight alone.
            if weight <= ctx.tail_eps {
                break;
            }
        }
        sum
    } else {
        // r^{-1/2} Σ_n exp(-π (s - n)² / r)
        let pi = std::f64::consts::PI;
        let s0 = s - s.round();
        let g = |u: f64| (-pi * u * u / r).exp();
        let sum = sum_pairs(ctx, |n| {
            if n == 0 {
                return (g(s0), 0.0);
            }
            let nf = n as f64;
            (g(s0 - nf), g(s0 + nf))
        });
        sum / r.sqrt()
    }
}
