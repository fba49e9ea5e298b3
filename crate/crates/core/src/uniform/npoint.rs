//! n-point functions of the uniform measure
//!
//! ```text
//! F(t_1, ..., t_n) = (q;q)_∞ Σ_λ q^{|λ|} Π_k Σ_i t_k^{λ_i - i + 1/2}
//! ```
//!
//! evaluated either by direct summation over partitions or by the
//! theta-determinant formula (a sum over permutations of `n × n`
//! determinants in `Θ^{(k)}`). Arguments are positive reals.

use crate::error::{Error, Result};
use crate::uniform::theta::{qpochhammer, theta11_reduced, ThetaContext};

/// Evaluation points and `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct NPointRequest {
    pub ts: Vec<f64>,
    pub q: f64,
}

impl NPointRequest {
    pub fn new(ts: Vec<f64>, q: f64) -> Self {
        NPointRequest { ts, q }
    }

    /// Domain of absolute convergence of the partition sum:
    /// `t_i > 1` and `t_1 ⋯ t_n < 1/q`.
    pub fn check_direct_domain(&self) -> Result<()> {
        if self.ts.is_empty() {
            return Err(Error::domain("at least one evaluation point is required"));
        }
        if !(0.0..1.0).contains(&self.q) {
            return Err(Error::domain(format!("q = {} is outside [0, 1)", self.q)));
        }
        if let Some(t) = self.ts.iter().find(|&&t| !(t > 1.0 && t.is_finite())) {
            return Err(Error::domain(format!("direct summation needs every t > 1, got {t}")));
        }
        let prod: f64 = self.ts.iter().product();
        if self.q * prod >= 1.0 {
            return Err(Error::domain(format!(
                "direct summation needs t_1⋯t_n < 1/q, got product {prod} with q = {}",
                self.q
            )));
        }
        Ok(())
    }
}

/// A value with its truncation error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NPointValue {
    pub value: f64,
    pub error_estimate: f64,
}

/// Direct evaluation over partitions.
///
/// Each `λ` is written as a first row `a ≥ μ_1` on top of a partition `μ`.
/// Rows below `λ` are summed as a closed geometric tail, and the first row is
/// summed over all `a ≥ μ_1` in closed form. Every `μ` with `|μ| ≤ cutoff`
/// is visited, so all `λ` with `|λ| ≤ cutoff` are included exactly, along
/// with every longer first row above them.
pub fn npoint_direct(req: &NPointRequest, cutoff: usize) -> Result<NPointValue> {
    req.check_direct_domain()?;
    let ctx = ThetaContext::new(req.q)?;
    let n = req.ts.len();
    let subsets = 1usize << n;
    // Per subset S: Π_{k∈S} t_k^{-1/2} and R_S = q Π_{k∈S} t_k.
    let mut head_factor = vec![1.0; subsets];
    let mut ratio = vec![req.q; subsets];
    for (mask, (hf, r)) in head_factor.iter_mut().zip(ratio.iter_mut()).enumerate() {
        for (k, &t) in req.ts.iter().enumerate() {
            if mask & (1 << k) != 0 {
                *hf /= t.sqrt();
                *r *= t;
            }
        }
    }
    let mut walker = Walker {
        ts: &req.ts,
        q: req.q,
        cutoff,
        head_factor,
        ratio,
        total: 0.0,
        shell: 0.0,
        row_sums: vec![0.0; n],
        parts: Vec::new(),
    };
    walker.visit(0, usize::MAX);
    let poch = qpochhammer(&ctx);
    let q = req.q;
    let decay = if q == 0.0 { 0.0 } else { q / (1.0 - q) };
    Ok(NPointValue {
        value: poch * walker.total,
        error_estimate: poch * walker.shell.abs() * decay,
    })
}

struct Walker<'a> {
    ts: &'a [f64],
    q: f64,
    cutoff: usize,
    head_factor: Vec<f64>,
    ratio: Vec<f64>,
    total: f64,
    /// Contributions with `|μ| = cutoff`, for the error estimate.
    shell: f64,
    /// `Σ_{i=1}^{ℓ(μ)} t_k^{μ_i - i - 1/2}` per argument.
    row_sums: Vec<f64>,
    parts: Vec<usize>,
}

impl Walker<'_> {
    fn visit(&mut self, size: usize, max_part: usize) {
        self.accumulate(size);
        let first = self.parts.first().copied();
        let limit = match first {
            Some(_) => (self.cutoff - size).min(max_part),
            None => self.cutoff,
        };
        for part in (1..=limit).rev() {
            let row = self.parts.len() + 1;
            let exponent = part as f64 - row as f64 - 0.5;
            // Restoring the saved sums (rather than subtracting) keeps
            // rounding from drifting across the traversal.
            let saved = self.row_sums.clone();
            for (k, &t) in self.ts.iter().enumerate() {
                self.row_sums[k] += t.powf(exponent);
            }
            self.parts.push(part);
            self.visit(size + part, part);
            self.parts.pop();
            self.row_sums = saved;
        }
    }

    fn accumulate(&mut self, size: usize) {
        let len = self.parts.len() as f64;
        let m1 = self.parts.first().copied().unwrap_or(0);
        // c_k: rows 2, 3, ... of λ, including the geometric tail.
        let c: Vec<f64> = self
            .ts
            .iter()
            .zip(&self.row_sums)
            .map(|(&t, &head)| head + t.powf(-len - 1.5) / (1.0 - 1.0 / t))
            .collect();
        let mut sum = 0.0;
        for mask in 0..self.head_factor.len() {
            let mut term = self.head_factor[mask];
            for (k, ck) in c.iter().enumerate() {
                if mask & (1 << k) == 0 {
                    term *= ck;
                }
            }
            let r = self.ratio[mask];
            sum += term * r.powi(m1 as i32) / (1.0 - r);
        }
        let contribution = self.q.powi(size as i32) * sum;
        self.total += contribution;
        if size == self.cutoff {
            self.shell += contribution;
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn det(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut result = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .expect("nonempty");
        if m[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
            result = -result;
        }
        result *= m[col][col];
        let (top, rest) = m.split_at_mut(col + 1);
        let pivot_row = &top[col];
        for row in rest.iter_mut() {
            let f = row[col] / pivot_row[col];
            for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * p;
            }
        }
    }
    result
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Theta-determinant formula
///
/// ```text
/// F = Σ_σ det[Θ^{(j-i+1)}(t_σ(1)⋯t_σ(n-j)) / (j-i+1)!] / Π_m Θ(t_σ(1)⋯t_σ(m))
/// ```
///
/// with `1/(-k)! = 0`. The expression is homogeneous of degree zero in `Θ`,
/// so the reduced theta series is used throughout.
pub fn npoint_theta_with(ts: &[f64], ctx: &ThetaContext) -> Result<f64> {
    let n = ts.len();
    if n == 0 {
        return Ok(1.0);
    }
    if let Some(t) = ts.iter().find(|&&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::domain(format!("theta formula needs positive real arguments, got {t}")));
    }
    if n as u32 > ctx.max_derivative {
        return Err(Error::domain(format!("n = {n} exceeds the derivative cap")));
    }
    let mut total = 0.0;
    for sigma in permutations(n) {
        // prefix[m] = t_σ(1) ⋯ t_σ(m)
        let mut prefix = vec![1.0; n + 1];
        for m in 1..=n {
            prefix[m] = prefix[m - 1] * ts[sigma[m - 1]];
        }
        let mut denom = 1.0;
        for &p in &prefix[1..] {
            let th = theta11_reduced(0, p, ctx);
            if th.abs() < ctx.pole_tol {
                return Err(Error::numeric(format!(
                    "Θ({p}) = {th:e} is within the pole tolerance {:e}",
                    ctx.pole_tol
                )));
            }
            denom *= th;
        }
        let matrix: Vec<Vec<f64>> = (1..=n)
            .map(|i| {
                (1..=n)
                    .map(|j| {
                        let k = j as i64 - i as i64 + 1;
                        if k < 0 {
                            0.0
                        } else {
                            theta11_reduced(k as u32, prefix[n - j], ctx) / factorial(k as u32)
                        }
                    })
                    .collect()
            })
            .collect();
        total += det(matrix) / denom;
    }
    Ok(total)
}

pub fn npoint_theta(req: &NPointRequest) -> Result<f64> {
    npoint_theta_with(&req.ts, &ThetaContext::new(req.q)?)
}

/// `|F(q t_1, t_2, ...) - RHS|` for the q-difference equation
///
/// ```text
/// F(q t_1, t_2, ..., t_n) = -q^{1/2} t_1⋯t_n Σ_{s=0}^{n-1} (-1)^s
///     Σ_{1<i_1<...<i_s≤n} F(t_1 t_{i_1}⋯t_{i_s}, ..., t̂_{i_1}, ..., t̂_{i_s}, ...)
/// ```
///
/// with both sides from the theta formula.
pub fn qdiff_residual_with(ts: &[f64], ctx: &ThetaContext) -> Result<f64> {
    if ctx.q == 0.0 {
        return Err(Error::domain("q = 0 leaves the q-difference regime (F(0·t) is undefined)"));
    }
    let n = ts.len();
    if n == 0 {
        return Err(Error::domain("at least one argument is required"));
    }
    let mut shifted = ts.to_vec();
    shifted[0] *= ctx.q;
    let lhs = npoint_theta_with(&shifted, ctx)?;
    let prod: f64 = ts.iter().product();
    let mut sum = 0.0;
    for mask in 0usize..(1 << (n - 1)) {
        let mut merged = ts[0];
        let mut rest = Vec::with_capacity(n);
        for (idx, &t) in ts.iter().enumerate().skip(1) {
            if mask & (1 << (idx - 1)) != 0 {
                merged *= t;
            } else {
                rest.push(t);
            }
        }
        let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        let mut args = vec![merged];
        args.extend(rest);
        sum += sign * npoint_theta_with(&args, ctx)?;
    }
    let rhs = -ctx.q.sqrt() * prod * sum;
    Ok((lhs - rhs).abs())
}

pub fn qdiff_residual(req: &NPointRequest) -> Result<f64> {
    qdiff_residual_with(&req.ts, &ThetaContext::new(req.q)?)
}

/// `(t^{1/2} - t^{-1/2}) F(t, rest...)` at `t = 1 + h`.
pub fn residue_factor(h: f64, rest: &[f64], ctx: &ThetaContext) -> Result<f64> {
    let t = 1.0 + h;
    let mut args = vec![t];
    args.extend_from_slice(rest);
    Ok((t.sqrt() - 1.0 / t.sqrt()) * npoint_theta_with(&args, ctx)?)
}

/// Limit of [`residue_factor`] as `t → 1`, by Richardson extrapolation over
/// `h = 10^{-3}, 10^{-4}` assuming a linear leading error.
pub fn extrapolated_residue(rest: &[f64], ctx: &ThetaContext) -> Result<f64> {
    let coarse = residue_factor(1e-3, rest, ctx)?;
    let fine = residue_factor(1e-4, rest, ctx)?;
    Ok((10.0 * fine - coarse) / 9.0)
}
