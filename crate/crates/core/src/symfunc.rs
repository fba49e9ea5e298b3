//! Symmetric functions in Miwa coordinates `t_k = (1/k) Σ x_i^k`.
//!
//! Complete homogeneous functions come from `exp(Σ t_k z^k) = Σ h_n z^n`,
//! Schur functions from the Jacobi–Trudi determinant
//! `s_{λ/μ} = det(h_{λ_i - μ_j + j - i})`, and characters of the symmetric
//! group from the Murnaghan–Nakayama rule.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::partitions::{Partition, PartitionIter};
use crate::series::{determinant, rational, Monomial, TruncSeries, Var};

/// Numeric Miwa parameters; unlisted `t_k` are zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MiwaParams {
    values: BTreeMap<u32, BigRational>,
}

impl MiwaParams {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(values: impl IntoIterator<Item = (u32, BigRational)>) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (k, v) in values {
            if k == 0 {
                return Err(Error::domain("Miwa indices start at 1"));
            }
            if !v.is_zero() {
                out.insert(k, v);
            }
        }
        Ok(MiwaParams { values: out })
    }

    /// `t_1, t_2, ...` from a list.
    pub fn from_list(values: Vec<BigRational>) -> Self {
        let values = values
            .into_iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (i as u32 + 1, v))
            .collect();
        MiwaParams { values }
    }

    pub fn get(&self, k: u32) -> BigRational {
        self.values.get(&k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn max_index(&self) -> u32 {
        self.values.keys().next_back().copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &BigRational)> {
        self.values.iter().map(|(k, v)| (*k, v))
    }
}

/// `t_k = (1/k) Σ_i x_i^k` for `1 ≤ k ≤ kmax`.
pub fn miwa_from_alphabet(x: &[BigRational], kmax: u32) -> MiwaParams {
    let values = (1..=kmax).map(|k| {
        let power_sum = x.iter().fold(BigRational::zero(), |acc, xi| {
            acc + num_traits::pow(xi.clone(), k as usize)
        });
        (k, power_sum / BigRational::from_integer(BigInt::from(k)))
    });
    MiwaParams::new(values).expect("indices are positive")
}

/// Which family of formal times a symbolic parameter set uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `t_k`
    T,
    /// `t'_k`
    U,
}

impl Family {
    fn var(self, k: u16) -> Var {
        match self {
            Family::T => Var::T(k),
            Family::U => Var::U(k),
        }
    }
}

/// Miwa times as series `t_1, t_2, ...`, each of valuation at least `k`,
/// so that every symmetric function of degree `n` has valuation `≥ n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Times {
    order: u32,
    values: Vec<TruncSeries>,
}

impl Times {
    pub fn zero(order: u32) -> Self {
        Times { order, values: Vec::new() }
    }

    /// Formal `t_k` (or `t'_k`) for `k ≤ kmax`; higher times vanish.
    pub fn symbolic(family: Family, kmax: u32, order: u32) -> Self {
        let values = (1..=kmax.min(order))
            .map(|k| TruncSeries::var(family.var(k as u16), order))
            .collect();
        Times { order, values }
    }

    /// Numeric times graded by the formal variable `s`: `t_k = c_k s^k`.
    /// Setting `s = 1` in any result recovers the numeric value.
    pub fn graded(params: &MiwaParams, order: u32) -> Self {
        let values = (1..=params.max_index().min(order))
            .map(|k| {
                let m = Monomial::one().with(Var::S, k as u16);
                TruncSeries::monomial(m, params.get(k), order)
            })
            .collect();
        Times { order, values }
    }

    /// Arbitrary series times; rejects `t_k` with valuation below `k`.
    pub fn from_series(values: Vec<TruncSeries>, order: u32) -> Result<Self> {
        for (i, v) in values.iter().enumerate() {
            let k = i as u32 + 1;
            if let Some(val) = v.valuation() {
                if val < k {
                    return Err(Error::domain(format!(
                        "t_{k} has valuation {val} < {k}; the weighted truncation would be inexact"
                    )));
                }
            }
        }
        let values = values
            .into_iter()
            .take(order as usize)
            .map(|v| v.with_order(order))
            .collect();
        Ok(Times { order, values })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn get(&self, k: u32) -> TruncSeries {
        k.checked_sub(1)
            .and_then(|i| self.values.get(i as usize))
            .cloned()
            .unwrap_or_else(|| TruncSeries::zero(self.order))
    }

    /// Number of stored times (higher ones are zero).
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.iter().all(TruncSeries::is_zero)
    }

    pub fn negated(&self) -> Self {
        Times { order: self.order, values: self.values.iter().map(|v| -v).collect() }
    }
}

/// `h_0, ..., h_D` with `Σ h_n z^n = exp(Σ t_k z^k)`, via
/// `n h_n = Σ_{k=1}^{n} k t_k h_{n-k}`.
pub fn h_coeffs(t: &Times) -> Vec<TruncSeries> {
    let d = t.order() as usize;
    let mut h = Vec::with_capacity(d + 1);
    h.push(TruncSeries::one(t.order()));
    for n in 1..=d {
        let mut acc = TruncSeries::zero(t.order());
        for k in 1..=n.min(t.len()) {
            let tk = t.get(k as u32);
            if tk.is_zero() {
                continue;
            }
            acc += &(&tk * &h[n - k]).scale(&rational(k as i64, 1));
        }
        h.push(acc.scale(&rational(1, n as i64)));
    }
    h
}

/// Rational `h_0, ..., h_D` for numeric times.
pub fn h_coeffs_numeric(t: &MiwaParams, d: usize) -> Vec<BigRational> {
    let mut h = vec![BigRational::one()];
    for n in 1..=d {
        let mut acc = BigRational::zero();
        for k in 1..=n {
            let tk = t.get(k as u32);
            if !tk.is_zero() {
                acc += tk * &h[n - k] * BigRational::from_integer(BigInt::from(k));
            }
        }
        h.push(acc / BigRational::from_integer(BigInt::from(n)));
    }
    h
}

fn h_at(h: &[TruncSeries], n: i64, order: u32) -> TruncSeries {
    if n < 0 {
        return TruncSeries::zero(order);
    }
    h.get(n as usize).cloned().unwrap_or_else(|| TruncSeries::zero(order))
}

/// Skew Schur function `s_{λ/μ}`; zero unless `μ ⊆ λ`.
pub fn skew_schur(lambda: &Partition, mu: &Partition, t: &Times) -> TruncSeries {
    let order = t.order();
    if !lambda.contains_diagram(mu) {
        return TruncSeries::zero(order);
    }
    let h = h_coeffs(t);
    skew_schur_with(lambda, mu, &h, order)
}

pub(crate) fn skew_schur_with(
    lambda: &Partition,
    mu: &Partition,
    h: &[TruncSeries],
    order: u32,
) -> TruncSeries {
    let n = lambda.len();
    let matrix: Vec<Vec<TruncSeries>> = (1..=n)
        .map(|i| {
            (1..=n)
                .map(|j| {
                    let idx = lambda.part(i) as i64 - mu.part(j) as i64 + j as i64 - i as i64;
                    h_at(h, idx, order)
                })
                .collect()
        })
        .collect();
    determinant(&matrix, order)
}

/// Schur polynomial `s_λ(t)`; requires `|λ| ≤ D` so truncation cannot
/// silently zero it.
pub fn schur(lambda: &Partition, t: &Times) -> Result<TruncSeries> {
    if lambda.size() > t.order() as usize {
        return Err(Error::domain(format!(
            "|λ| = {} exceeds the truncation degree {}",
            lambda.size(),
            t.order()
        )));
    }
    Ok(skew_schur(lambda, &Partition::empty(), t))
}

/// Batch version of [`schur`] sharing one `h` table.
pub fn schur_many<'a>(
    lambdas: impl IntoIterator<Item = &'a Partition>,
    t: &Times,
) -> Result<Vec<TruncSeries>> {
    let h = h_coeffs(t);
    let empty = Partition::empty();
    lambdas
        .into_iter()
        .map(|l| {
            if l.size() > t.order() as usize {
                Err(Error::domain(format!("|λ| = {} exceeds degree {}", l.size(), t.order())))
            } else {
                Ok(skew_schur_with(l, &empty, &h, t.order()))
            }
        })
        .collect()
}

/// Character `χ^λ_ρ` of the symmetric group by the Murnaghan–Nakayama rule.
pub fn character(lambda: &Partition, rho: &Partition) -> Result<i64> {
    if lambda.size() != rho.size() {
        return Err(Error::domain(format!(
            "character needs |λ| = |ρ|, got {} and {}",
            lambda.size(),
            rho.size()
        )));
    }
    Ok(mn_recurse(lambda, rho.parts()))
}

fn mn_recurse(lambda: &Partition, cycles: &[usize]) -> i64 {
    let Some((&first, rest)) = cycles.split_first() else {
        return 1;
    };
    lambda
        .removable_rim_hooks(first)
        .into_iter()
        .map(|(mu, height)| {
            let sign = if height % 2 == 0 { 1 } else { -1 };
            sign * mn_recurse(&mu, rest)
        })
        .sum()
}

/// `p_ρ / z_ρ = Π_k t_k^{r_k} / r_k!` where `r_k` counts parts equal to `k`.
pub fn power_sum_over_z(rho: &Partition, order: u32) -> TruncSeries {
    let mut mult: BTreeMap<usize, u16> = BTreeMap::new();
    for &p in rho.parts() {
        *mult.entry(p).or_default() += 1;
    }
    let mut m = Monomial::one();
    let mut denom: i64 = 1;
    for (&k, &r) in &mult {
        m = m.with(Var::T(k as u16), r);
        denom *= (1..=r as i64).product::<i64>();
    }
    TruncSeries::monomial(m, rational(1, denom), order)
}

/// `Σ_{ρ ⊢ |λ|} χ^λ_ρ p_ρ / z_ρ` in formal `t`.
pub fn character_expansion(lambda: &Partition, order: u32) -> Result<TruncSeries> {
    let mut out = TruncSeries::zero(order);
    for rho in PartitionIter::new(lambda.size()) {
        let chi = character(lambda, &rho)?;
        if chi != 0 {
            out += &power_sum_over_z(&rho, order).scale(&rational(chi, 1));
        }
    }
    Ok(out)
}
