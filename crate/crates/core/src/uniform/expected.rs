//! Expected size under `M_q`: `N(q) = Σ_{n≥1} σ₁(n) qⁿ`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::uniform::theta::ThetaContext;

/// `σ₁(n)` for `n = 1..=nmax`, by a divisor sieve.
pub fn sigma1(nmax: usize) -> Vec<u64> {
    let mut sigma = vec![0u64; nmax + 1];
    for d in 1..=nmax {
        for m in (d..=nmax).step_by(d) {
            sigma[m] += d as u64;
        }
    }
    sigma.remove(0);
    sigma
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpectedSize {
    /// `σ₁(1), ..., σ₁(nmax)`.
    pub coefficients: Vec<u64>,
    pub value: f64,
}

/// Lambert form `Σ_k k q^k / (1 - q^k)`, summed until terms drop below
/// `tail_eps` relative to the running total.
pub fn lambert_value(ctx: &ThetaContext) -> f64 {
    let q = ctx.q;
    let mut sum = 0.0;
    let mut qk = 1.0;
    for k in 1..=ctx.max_terms {
        qk *= q;
        let term = k as f64 * qk / (1.0 - qk);
        sum += term;
        // Terms decrease once k q^k does; the tail is below term · q/(1-q)².
        if term <= ctx.tail_eps * sum * (1.0 - q) * (1.0 - q) && (k as f64 + 1.0) * q < k as f64 {
            break;
        }
    }
    sum
}

pub fn expected_size(ctx: &ThetaContext, nmax: usize) -> Result<ExpectedSize> {
    if nmax == 0 {
        return Err(Error::domain("nmax must be at least 1"));
    }
    Ok(ExpectedSize { coefficients: sigma1(nmax), value: lambert_value(ctx) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::partition_counts;

    #[test]
    fn divisor_sums() {
        assert_eq!(sigma1(6), vec![1, 3, 4, 7, 6, 12]);
        assert_eq!(sigma1(12)[11], 28);
    }

    #[test]
    fn matches_partition_oracle() {
        // (q;q)_∞ Σ_n n p(n) qⁿ as exact integer series through q^20.
        let n = 20;
        let p = partition_counts(n);
        let mut euler = vec![0i128; n + 1];
        euler[0] = 1;
        for k in 1..=n {
            for m in (k..=n).rev() {
                euler[m] -= euler[m - k];
            }
        }
        let weighted: Vec<i128> = (0..=n).map(|m| m as i128 * p[m] as i128).collect();
        let product: Vec<i128> = (0..=n).map(|m| (0..=m).map(|j| euler[j] * weighted[m - j]).sum()).collect();
        let sigma = sigma1(n);
        for m in 1..=n {
            assert_eq!(product[m], sigma[m - 1] as i128, "q^{m}");
        }
    }

    #[test]
    fn value_matches_coefficient_sum() {
        let ctx = ThetaContext::new(0.3).unwrap();
        let e = expected_size(&ctx, 80).unwrap();
        let series: f64 = e.coefficients.iter().enumerate().map(|(i, &c)| c as f64 * 0.3f64.powi(i as i32 + 1)).sum();
        assert!((series - e.value).abs() < 1e-13);
        assert!(expected_size(&ctx, 0).is_err());
        assert_eq!(lambert_value(&ThetaContext::new(0.0).unwrap()), 0.0);
    }
}
