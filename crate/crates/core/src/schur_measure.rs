//! The Schur measure `M(λ) = s_λ(t) s_λ(t') / Z` with `Z = exp(Σ k t_k t'_k)`,
//! its correlation kernel and a brute-force correlation oracle.
//!
//! The kernel is
//!
//! ```text
//! K(i, j) = Σ_{k ∈ ℤ≥0 + 1/2} J_{i+k}(t, t') J_{-j-k}(-t, -t')
//! ```
//!
//! where `J_n` are the Laurent coefficients of
//! `J(z) = exp(Σ t_k z^k - Σ t'_k z^{-k})`, and the correlation functions
//! are `ρ(X) = det[K(x_i, x_j)]`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::partitions::{partitions_up_to, HalfInt, Partition};
use crate::series::{determinant, rational, Monomial, TruncSeries, Var};
use crate::symfunc::{h_coeffs, skew_schur_with, Family, MiwaParams, Times};

/// Parameters `(t, t')` of a Schur measure, truncated at degree `D`.
#[derive(Clone, Debug, PartialEq)]
pub struct SchurParams {
    t: Times,
    tp: Times,
}

impl SchurParams {
    pub fn new(t: Times, tp: Times) -> Result<Self> {
        if t.order() != tp.order() {
            return Err(Error::domain(format!(
                "t and t' truncated at different degrees ({} vs {})",
                t.order(),
                tp.order()
            )));
        }
        Ok(SchurParams { t, tp })
    }

    /// Formal `t_1..t_kmax` and `t'_1..t'_kmax`.
    pub fn symbolic(kmax: u32, order: u32) -> Self {
        SchurParams {
            t: Times::symbolic(Family::T, kmax, order),
            tp: Times::symbolic(Family::U, kmax, order),
        }
    }

    /// Numeric parameters, graded by `s` (`t_k → t_k s^k`); evaluate at
    /// `s = 1` to recover numbers.
    pub fn numeric(t: &MiwaParams, tp: &MiwaParams, order: u32) -> Self {
        SchurParams { t: Times::graded(t, order), tp: Times::graded(tp, order) }
    }

    pub fn order(&self) -> u32 {
        self.t.order()
    }

    pub fn t(&self) -> &Times {
        &self.t
    }

    pub fn tp(&self) -> &Times {
        &self.tp
    }

    /// `(-t, -t')`.
    pub fn negated(&self) -> Self {
        SchurParams { t: self.t.negated(), tp: self.tp.negated() }
    }

    /// `(t', t)`; the measure itself is unchanged.
    pub fn swapped(&self) -> Self {
        SchurParams { t: self.tp.clone(), tp: self.t.clone() }
    }

    /// `((-1)^{k-1} t_k, (-1)^{k-1} t'_k)`: the image of the measure under
    /// conjugation `λ → λ'`.
    pub fn conjugated(&self) -> Self {
        let flip = |times: &Times| {
            let values = (1..=times.len() as u32)
                .map(|k| {
                    let v = times.get(k);
                    if k % 2 == 0 {
                        -v
                    } else {
                        v
                    }
                })
                .collect();
            Times::from_series(values, times.order()).expect("valuations are preserved")
        };
        SchurParams { t: flip(&self.t), tp: flip(&self.tp) }
    }

    /// `log Z = Σ k t_k t'_k`.
    pub fn log_partition_function(&self) -> TruncSeries {
        let d = self.order();
        let mut acc = TruncSeries::zero(d);
        for k in 1..=self.t.len().min(self.tp.len()) as u32 {
            let term = &self.t.get(k) * &self.tp.get(k);
            acc += &term.scale(&rational(k as i64, 1));
        }
        acc
    }

    /// `Z = exp(Σ k t_k t'_k)`.
    pub fn partition_function(&self) -> TruncSeries {
        self.log_partition_function().exp()
    }

    /// `1/Z`, computed as `exp(-Σ k t_k t'_k)`.
    pub fn inverse_partition_function(&self) -> TruncSeries {
        (-self.log_partition_function()).exp()
    }
}

/// Plancherel measure in the formal variable `s = ξ^{1/2}`: `t = t' = (s, 0, ...)`.
pub fn plancherel_params(order: u32) -> SchurParams {
    let s = || Times::from_series(vec![TruncSeries::var(Var::S, order)], order).expect("valuation 1");
    SchurParams { t: s(), tp: s() }
}

/// z-measure in `s = ξ^{1/2}`: `t_k = z s^k / k`, `t'_k = z' s^k / k`.
pub fn z_measure_params(z: &BigRational, zp: &BigRational, order: u32) -> SchurParams {
    let times = |c: &BigRational| {
        let values = (1..=order)
            .map(|k| {
                let m = Monomial::one().with(Var::S, k as u16);
                TruncSeries::monomial(m, c / BigRational::from_integer(k.into()), order)
            })
            .collect();
        Times::from_series(values, order).expect("t_k has valuation k")
    };
    SchurParams { t: times(z), tp: times(zp) }
}

/// `M(λ) = s_λ(t) s_λ(t') / Z`.
pub fn weight(params: &SchurParams, lambda: &Partition) -> Result<TruncSeries> {
    let d = params.order();
    if lambda.size() > d as usize {
        return Err(Error::domain(format!("|λ| = {} exceeds degree {d}", lambda.size())));
    }
    let empty = Partition::empty();
    let s = skew_schur_with(lambda, &empty, &h_coeffs(params.t()), d);
    let sp = skew_schur_with(lambda, &empty, &h_coeffs(params.tp()), d);
    Ok(&(&s * &sp) * &params.inverse_partition_function())
}

/// Laurent coefficients `J_n`, `|n| ≤ D`, of `J(z) = exp(Σ t_k z^k - Σ t'_k z^{-k})`.
#[derive(Clone, Debug, PartialEq)]
pub struct JCoeffs {
    order: u32,
    table: BTreeMap<i64, TruncSeries>,
}

impl JCoeffs {
    /// `J_n`; zero outside `[-D, D]` because `J_n` has valuation `≥ |n|`.
    pub fn get(&self, n: i64) -> TruncSeries {
        self.table.get(&n).cloned().unwrap_or_else(|| TruncSeries::zero(self.order))
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &TruncSeries)> {
        self.table.iter().map(|(n, s)| (*n, s))
    }

    fn get_ref(&self, n: i64) -> Option<&TruncSeries> {
        self.table.get(&n).filter(|s| !s.is_zero())
    }
}

/// Product of the one-sided expansions `γ(z, t) = Σ h_a(t) z^a` and
/// `γ(z^{-1}, t')^{-1} = Σ h_b(-t') z^{-b}`.
pub fn j_coeffs(params: &SchurParams) -> JCoeffs {
    let d = params.order();
    let ht = h_coeffs(params.t());
    let htp = h_coeffs(&params.tp().negated());
    let mut table = BTreeMap::new();
    for n in -(d as i64)..=(d as i64) {
        let mut acc = TruncSeries::zero(d);
        for b in 0..=d as i64 {
            let a = n + b;
            if a < 0 || a + b > d as i64 {
                continue;
            }
            acc += &(&ht[a as usize] * &htp[b as usize]);
        }
        table.insert(n, acc);
    }
    JCoeffs { order: d, table }
}

/// The kernel `K`, with both coefficient tables cached.
#[derive(Clone, Debug)]
pub struct Kernel {
    plus: JCoeffs,
    minus: JCoeffs,
}

impl Kernel {
    pub fn new(params: &SchurParams) -> Self {
        Kernel { plus: j_coeffs(params), minus: j_coeffs(&params.negated()) }
    }

    pub fn from_tables(plus: JCoeffs, minus: JCoeffs) -> Self {
        Kernel { plus, minus }
    }

    pub fn order(&self) -> u32 {
        self.plus.order
    }

    /// `J_n(t, t')`.
    pub fn j_plus(&self) -> &JCoeffs {
        &self.plus
    }

    /// `J_n(-t, -t')`.
    pub fn j_minus(&self) -> &JCoeffs {
        &self.minus
    }

    pub fn entry(&self, i: HalfInt, j: HalfInt) -> TruncSeries {
        let d = self.order() as i64;
        let mut acc = TruncSeries::zero(self.order());
        let mut k = HalfInt::plus_half(0);
        loop {
            let a = i.add_half(k);
            let b = -j.add_half(k);
            if a > d || b < -d {
                break;
            }
            if let (Some(ja), Some(jb)) = (self.plus.get_ref(a), self.minus.get_ref(b)) {
                acc += &(ja * jb);
            }
            k = k.shift(1);
        }
        acc
    }

    pub fn matrix(&self, xs: &[HalfInt]) -> Vec<Vec<TruncSeries>> {
        xs.iter()
            .map(|&x| xs.iter().map(|&y| self.entry(x, y)).collect())
            .collect()
    }

    /// `ρ(X) = det[K(x_i, x_j)]`.
    pub fn correlation(&self, xs: &[HalfInt]) -> TruncSeries {
        let xs = normalize_set(xs);
        determinant(&self.matrix(&xs), self.order())
    }
}

fn normalize_set(xs: &[HalfInt]) -> Vec<HalfInt> {
    let mut v = xs.to_vec();
    v.sort_unstable_by(|a, b| b.cmp(a));
    v.dedup();
    v
}

pub fn kernel_entry(params: &SchurParams, i: HalfInt, j: HalfInt) -> TruncSeries {
    Kernel::new(params).entry(i, j)
}

/// `ρ(X)` from the determinantal formula.
pub fn correlation(params: &SchurParams, xs: &[HalfInt]) -> TruncSeries {
    Kernel::new(params).correlation(xs)
}

/// `ρ(X)` by direct summation of `s_λ(t) s_λ(t') / Z` over `|λ| ≤ D` with
/// `X ⊂ S(λ)`.
pub fn correlation_oracle(params: &SchurParams, xs: &[HalfInt]) -> TruncSeries {
    let d = params.order();
    let ht = h_coeffs(params.t());
    let htp = h_coeffs(params.tp());
    let empty = Partition::empty();
    let lambdas: Vec<Partition> = partitions_up_to(d as usize)
        .filter(|l| xs.iter().all(|&x| l.contains(x)))
        .collect();
    let sum = lambdas
        .par_iter()
        .map(|l| {
            let s = skew_schur_with(l, &empty, &ht, d);
            if s.is_zero() {
                return s;
            }
            &s * &skew_schur_with(l, &empty, &htp, d)
        })
        .reduce(|| TruncSeries::zero(d), |a, b| a + b);
    &sum * &params.inverse_partition_function()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn h(twice: i64) -> HalfInt {
        HalfInt::from_twice(twice).unwrap()
    }

    fn s_pow(n: u16, c: BigRational, d: u32) -> TruncSeries {
        TruncSeries::monomial(Monomial::one().with(Var::S, n), c, d)
    }

    fn part(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn weight_examples() {
        let d = 6;
        let p = SchurParams::symbolic(3, d);
        let zinv = p.inverse_partition_function();
        assert_eq!(weight(&p, &Partition::empty()).unwrap(), zinv);
        let t1u1 = &TruncSeries::var(Var::T(1), d) * &TruncSeries::var(Var::U(1), d);
        assert_eq!(weight(&p, &part(&[1])).unwrap(), &t1u1 * &zinv);
        assert!(weight(&p, &part(&[4, 3])).is_err());
    }

    #[test]
    fn plancherel_weights() {
        let d = 10;
        let p = plancherel_params(d);
        let e = (-TruncSeries::monomial(Monomial::one().with(Var::S, 2), BigRational::one(), d)).exp();
        assert_eq!(weight(&p, &Partition::empty()).unwrap(), e);
        assert_eq!(weight(&p, &part(&[1])).unwrap(), &s_pow(2, rational(1, 1), d) * &e);
        assert_eq!(weight(&p, &part(&[2, 1])).unwrap(), &s_pow(6, rational(1, 9), d) * &e);
    }

    #[test]
    fn j_coeff_examples() {
        let d = 5;
        let zero = SchurParams::symbolic(0, d);
        let j = j_coeffs(&zero);
        for n in -5..=5 {
            let expect = if n == 0 { TruncSeries::one(d) } else { TruncSeries::zero(d) };
            assert_eq!(j.get(n), expect);
        }

        let p = SchurParams::new(Times::symbolic(Family::T, 5, d), Times::zero(d)).unwrap();
        let j = j_coeffs(&p);
        let hs = h_coeffs(p.t());
        for n in 0..=5 {
            assert_eq!(j.get(n), hs[n as usize]);
            assert!(j.get(-n - 1).is_zero());
        }

        let j = j_coeffs(&plancherel_params(5));
        let expect = s_pow(1, rational(1, 1), 5) + s_pow(3, rational(-1, 2), 5) + s_pow(5, rational(1, 12), 5);
        assert_eq!(j.get(1), expect);
    }

    #[test]
    fn kernel_at_zero_params() {
        let k = Kernel::new(&SchurParams::symbolic(0, 4));
        for a in [-5, -3, -1, 1, 3] {
            for b in [-5, -3, -1, 1, 3] {
                let v = k.entry(h(a), h(b));
                let expect = if a == b && a < 0 { TruncSeries::one(4) } else { TruncSeries::zero(4) };
                assert_eq!(v, expect, "K({a}/2,{b}/2)");
            }
        }
    }

    #[test]
    fn kernel_lowest_terms() {
        let d = 4;
        let k = Kernel::new(&SchurParams::symbolic(2, d));
        let v = k.entry(h(1), h(-1));
        assert_eq!(v.lowest_term(), Some((Monomial::var(Var::T(1)), BigRational::one())));
        // Plancherel: K(1/2,1/2) = Σ_{m≥1} J_m(2s)² = (1 - J_0(2s)²)/2 = s^2 - 3/4 s^4 + ...
        let k = Kernel::new(&plancherel_params(4));
        let v = k.entry(h(1), h(1));
        assert_eq!(v, s_pow(2, rational(1, 1), 4) + s_pow(4, rational(-3, 4), 4));
    }

    #[test]
    fn correlation_examples() {
        let d = 6;
        let zero = SchurParams::symbolic(0, d);
        assert_eq!(correlation(&zero, &[]), TruncSeries::one(d));
        assert_eq!(correlation(&zero, &[h(-1)]), TruncSeries::one(d));
        assert!(correlation(&zero, &[h(1)]).is_zero());
        // Plancherel: 1/2 ∈ S(λ) iff λ_i = i for some i; through s^6 only
        // (1), (1,1), (1,1,1) qualify, giving e^{-s²}(s² + s⁴/4 + s⁶/36).
        let p = plancherel_params(d);
        let expect = s_pow(2, rational(1, 1), d) + s_pow(4, rational(-3, 4), d) + s_pow(6, rational(5, 18), d);
        assert_eq!(correlation(&p, &[h(1)]), expect);
        assert_eq!(correlation_oracle(&p, &[h(1)]), expect);
    }

    #[test]
    fn oracle_examples() {
        let d = 6;
        let p = SchurParams::symbolic(2, d);
        assert_eq!(correlation_oracle(&p, &[]), TruncSeries::one(d));
        let zero = SchurParams::symbolic(0, d);
        assert_eq!(correlation_oracle(&zero, &[h(-1)]), TruncSeries::one(d));
        let x = [h(1), h(-3)];
        assert_eq!(correlation_oracle(&p, &x), correlation(&p, &x));
    }

    #[test]
    fn z_measure_weights() {
        let d = 8;
        let z = rational(3, 2);
        let zp = rational(-2, 5);
        let p = z_measure_params(&z, &zp, d);
        let zz = &z * &zp;
        // (1 - s^2)^{zz'} as a series.
        let mut binom = TruncSeries::zero(d);
        let mut c = BigRational::one();
        for m in 0..=4u16 {
            binom += &s_pow(2 * m, c.clone(), d);
            c = -c * (&zz - BigRational::from_integer(m.into())) / BigRational::from_integer((m + 1).into());
        }
        assert_eq!(weight(&p, &Partition::empty()).unwrap(), binom);
        assert_eq!(weight(&p, &part(&[1])).unwrap(), &s_pow(2, zz.clone(), d) * &binom);
        let hc = |w: &BigRational| w * (w + BigRational::one()) / BigRational::from_integer(2.into());
        assert_eq!(
            weight(&p, &part(&[2])).unwrap(),
            &s_pow(4, hc(&z) * hc(&zp), d) * &binom
        );
    }

    #[test]
    fn cached_kernel_matches_direct() {
        let p = SchurParams::symbolic(2, 5);
        let cached = Kernel::from_tables(j_coeffs(&p), j_coeffs(&p.negated()));
        for a in [-3, -1, 1, 3] {
            for b in [-3, -1, 1, 3] {
                assert_eq!(cached.entry(h(a), h(b)), kernel_entry(&p, h(a), h(b)));
            }
        }
    }

    #[test]
    fn deep_tail_is_occupied() {
        let d = 5;
        let p = SchurParams::symbolic(2, d);
        let rho = correlation(&p, &[h(-13)]);
        assert_eq!(rho.constant_term(), BigRational::one());
        assert_eq!(rho, TruncSeries::one(d));
    }
}
