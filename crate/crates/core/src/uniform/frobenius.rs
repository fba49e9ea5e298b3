//! Frobenius-coordinate correlations `ϱ(X, q) = (q;q)_∞ Σ_{Fr λ ⊇ X} q^{|λ|}`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::partitions::{enumerate_partitions, HalfInt};
use crate::uniform::theta::{qpochhammer, theta3_circle, ThetaContext};

/// Relative agreement between successive trapezoid refinements.
pub const QUADRATURE_TOL: f64 = 1e-14;
const MIN_NODES: usize = 16;
const MAX_NODES: usize = 1 << 22;

/// `∫_{-1/2}^{1/2} Π_{x∈X} e^{sgn(x)π(is - rx)} / (2 cosh π(is - rx)) · Θ₃(e^{2πis}, e^{-2πr}) ds`
/// by the periodic trapezoid rule, doubling the node count until two
/// successive values agree.
pub fn frobenius_corr_integral(xs: &[HalfInt], ctx: &ThetaContext) -> f64 {
    let r = ctx.r();
    let pi = std::f64::consts::PI;
    let integrand = |s: f64| -> f64 {
        let mut prod = Complex64::new(theta3_circle(s, ctx), 0.0);
        for &x in xs {
            let xf = x.to_f64();
            let w = Complex64::new(-r * xf, s) * pi;
            let sign = if x.is_positive() { 1.0 } else { -1.0 };
            prod *= (w * sign).exp() / (w.cosh() * 2.0);
        }
        prod.re
    };
    // Nodes at s = -1/2 + k/m; refinement reuses the previous nodes.
    let mut m = MIN_NODES;
    let mut sum: f64 = (0..m).map(|k| integrand(-0.5 + k as f64 / m as f64)).sum();
    let mut value = sum / m as f64;
    while m < MAX_NODES {
        let fresh: f64 = (0..m)
            .into_par_iter()
            .map(|k| integrand(-0.5 + (k as f64 + 0.5) / m as f64))
            .collect::<Vec<_>>()
            .iter()
            .sum();
        sum += fresh;
        m *= 2;
        let next = sum / m as f64;
        let done = (next - value).abs() <= QUADRATURE_TOL * next.abs().max(1e-300);
        value = next;
        if done {
            break;
        }
    }
    value
}

/// Number of partitions of each size `n ≤ cutoff` whose Frobenius coordinates
/// contain each `X`.
pub fn frobenius_counts(sets: &[Vec<HalfInt>], cutoff: usize) -> Vec<Vec<u64>> {
    let per_size: Vec<Vec<u64>> = (0..=cutoff)
        .into_par_iter()
        .map(|n| {
            let mut counts = vec![0u64; sets.len()];
            for lambda in enumerate_partitions(n) {
                let fr = lambda.frobenius();
                for (c, xs) in counts.iter_mut().zip(sets) {
                    if fr.contains_all(xs) {
                        *c += 1;
                    }
                }
            }
            counts
        })
        .collect();
    (0..sets.len())
        .map(|i| per_size.iter().map(|row| row[i]).collect())
        .collect()
}

/// Enumeration over `|λ| ≤ cutoff` for several sets at once.
pub fn frobenius_corr_enum_many(sets: &[Vec<HalfInt>], ctx: &ThetaContext, cutoff: usize) -> Vec<f64> {
    let poch = qpochhammer(ctx);
    frobenius_counts(sets, cutoff)
        .into_iter()
        .map(|counts| {
            // Horner from the top keeps small terms from being swamped.
            let tail = counts.iter().rev().fold(0.0, |acc, &c| acc * ctx.q + c as f64);
            poch * tail
        })
        .collect()
}

pub fn frobenius_corr_enum(xs: &[HalfInt], ctx: &ThetaContext, cutoff: usize) -> f64 {
    frobenius_corr_enum_many(&[xs.to_vec()], ctx, cutoff)[0]
}
