//! Exact multivariate power series truncated at a weighted degree.
//!
//! Variables are the Miwa times `t_k` and `t'_k` (written `t1, t2, ...` and
//! `u1, u2, ...`, each of weight `k`) plus one grading variable `s` of
//! weight 1 used by specialized measures. Coefficients are arbitrary
//! precision rationals; every operation is exact and drops monomials whose
//! weighted degree exceeds the series order.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A formal variable of the series ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    /// Grading variable, weight 1 (`s = ξ^{1/2}` for the Plancherel and z-measures).
    S,
    /// `t_k`, weight `k`.
    T(u16),
    /// `t'_k`, weight `k`.
    U(u16),
}

impl Var {
    fn code(self) -> usize {
        match self {
            Var::S => 0,
            Var::T(k) => 2 * k as usize - 1,
            Var::U(k) => 2 * k as usize,
        }
    }

    fn from_code(code: usize) -> Var {
        match code {
            0 => Var::S,
            c if c % 2 == 1 => Var::T(c.div_ceil(2) as u16),
            c => Var::U((c / 2) as u16),
        }
    }

    pub fn weight(self) -> u32 {
        match self {
            Var::S => 1,
            Var::T(k) | Var::U(k) => k as u32,
        }
    }

    pub fn name(self) -> String {
        match self {
            Var::S => "s".to_string(),
            Var::T(k) => format!("t{k}"),
            Var::U(k) => format!("u{k}"),
        }
    }

    pub fn parse(name: &str) -> Result<Var> {
        let index = |rest: &str| -> Result<u16> {
            match rest.parse::<u16>() {
                Ok(k) if k >= 1 => Ok(k),
                _ => Err(Error::parse(format!("bad variable name {name:?}"))),
            }
        };
        if name == "s" {
            Ok(Var::S)
        } else if let Some(rest) = name.strip_prefix('t') {
            Ok(Var::T(index(rest)?))
        } else if let Some(rest) = name.strip_prefix('u') {
            Ok(Var::U(index(rest)?))
        } else {
            Err(Error::parse(format!("bad variable name {name:?}")))
        }
    }
}

/// Exponent vector indexed by variable code, without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<u16>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial::one().with(v, 1)
    }

    /// Sets the exponent of `v`.
    pub fn with(mut self, v: Var, power: u16) -> Self {
        let c = v.code();
        if self.0.len() <= c {
            self.0.resize(c + 1, 0);
        }
        self.0[c] = power;
        self.trim();
        self
    }

    fn trim(&mut self) {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
    }

    pub fn exponent(&self, v: Var) -> u16 {
        self.0.get(v.code()).copied().unwrap_or(0)
    }

    pub fn weight(&self) -> u32 {
        self.0
            .iter()
            .enumerate()
            .map(|(c, &e)| e as u32 * Var::from_code(c).weight())
            .sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = (Var, u16)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(c, &e)| (Var::from_code(c), e))
    }

    fn product(&self, other: &Monomial) -> Monomial {
        let (long, short) = if self.0.len() >= other.0.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = long.0.clone();
        for (o, s) in out.iter_mut().zip(&short.0) {
            *o += *s;
        }
        Monomial(out)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (v, e) in self.vars() {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "{}", v.name())?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Exact series truncated at weighted degree `order`.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncSeries {
    order: u32,
    terms: BTreeMap<Monomial, BigRational>,
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl TruncSeries {
    pub fn zero(order: u32) -> Self {
        TruncSeries { order, terms: BTreeMap::new() }
    }

    pub fn one(order: u32) -> Self {
        Self::constant(BigRational::one(), order)
    }

    pub fn constant(c: BigRational, order: u32) -> Self {
        Self::monomial(Monomial::one(), c, order)
    }

    pub fn var(v: Var, order: u32) -> Self {
        Self::monomial(Monomial::var(v), BigRational::one(), order)
    }

    pub fn monomial(m: Monomial, c: BigRational, order: u32) -> Self {
        let mut s = Self::zero(order);
        if m.weight() <= order && !c.is_zero() {
            s.terms.insert(m, c);
        }
        s
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// No stored terms; the same as [`TruncSeries::is_zero`].
    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn coeff(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.coeff(&Monomial::one())
    }

    /// Lowest weighted degree carrying a nonzero coefficient.
    pub fn valuation(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::weight).min()
    }

    /// Drops everything above `order` and lowers the truncation order.
    pub fn truncate(&self, order: u32) -> Self {
        let order = order.min(self.order);
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.weight() <= order)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        TruncSeries { order, terms }
    }

    /// The same coefficients viewed at a different truncation order.
    pub fn with_order(&self, order: u32) -> Self {
        if order <= self.order {
            self.truncate(order)
        } else {
            TruncSeries { order, terms: self.terms.clone() }
        }
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() || m.weight() > self.order {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.order);
        }
        let terms = self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect();
        TruncSeries { order: self.order, terms }
    }

    /// Partial derivative with respect to `v`; the result keeps the order of
    /// `self` minus the weight of `v`, since higher terms are unknown.
    pub fn derivative(&self, v: Var) -> Self {
        let order = self.order.saturating_sub(v.weight());
        let mut out = Self::zero(order);
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e == 0 {
                continue;
            }
            let dm = m.clone().with(v, e - 1);
            out.add_term(dm, c * BigRational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Substitutes a rational value for `v`.
    pub fn evaluate(&self, v: Var, value: &BigRational) -> Self {
        let mut out = Self::zero(self.order);
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            let rest = m.clone().with(v, 0);
            let mut factor = BigRational::one();
            for _ in 0..e {
                factor *= value;
            }
            out.add_term(rest, c * factor);
        }
        out
    }

    /// Splits into homogeneous parts by weighted degree, index = degree.
    pub fn homogeneous_parts(&self) -> Vec<TruncSeries> {
        let mut parts: Vec<TruncSeries> =
            (0..=self.order).map(|_| Self::zero(self.order)).collect();
        for (m, c) in &self.terms {
            parts[m.weight() as usize]
                .terms
                .insert(m.clone(), c.clone());
        }
        parts
    }

    /// `exp(self)`; requires a zero constant term.
    pub fn exp(&self) -> Self {
        assert!(
            self.constant_term().is_zero(),
            "exp of a series with nonzero constant term"
        );
        let f = self.homogeneous_parts();
        let n_max = self.order as usize;
        let mut e: Vec<TruncSeries> = Vec::with_capacity(n_max + 1);
        e.push(Self::one(self.order));
        for n in 1..=n_max {
            let mut acc = Self::zero(self.order);
            for k in 1..=n {
                if f[k].is_zero() || e[n - k].is_zero() {
                    continue;
                }
                let term = (&f[k] * &e[n - k]).scale(&BigRational::from_integer(k.into()));
                acc += &term;
            }
            e.push(acc.scale(&rational(1, n as i64)));
        }
        e.into_iter().fold(Self::zero(self.order), |acc, x| acc + x)
    }

    /// True when both series agree on every monomial of degree `≤ deg`.
    pub fn agrees_through(&self, other: &TruncSeries, deg: u32) -> bool {
        self.first_difference(other, deg).is_none()
    }

    /// Lowest-degree monomial (degree `≤ deg`) where the two series differ.
    pub fn first_difference(&self, other: &TruncSeries, deg: u32) -> Option<(Monomial, BigRational)> {
        let diff = (self - other).truncate(deg);
        diff.lowest_term()
    }

    /// Nonzero term of lowest weighted degree (ties broken by monomial order).
    pub fn lowest_term(&self) -> Option<(Monomial, BigRational)> {
        self.terms
            .iter()
            .min_by_key(|(m, _)| (m.weight(), (*m).clone()))
            .map(|(m, c)| (m.clone(), c.clone()))
    }

    pub fn to_records(&self) -> Vec<SeriesRecord> {
        self.terms
            .iter()
            .map(|(m, c)| SeriesRecord {
                exponents: m.vars().map(|(v, e)| (v.name(), e as u32)).collect(),
                num: c.numer().to_string(),
                den: c.denom().to_string(),
            })
            .collect()
    }

    pub fn from_records(records: &[SeriesRecord], order: u32) -> Result<Self> {
        let mut s = Self::zero(order);
        for r in records {
            let mut m = Monomial::one();
            for (name, &e) in &r.exponents {
                let e = u16::try_from(e).map_err(|_| Error::parse("exponent too large"))?;
                m = m.with(Var::parse(name)?, e);
            }
            let num: BigInt = r
                .num
                .parse()
                .map_err(|_| Error::parse(format!("bad numerator {:?}", r.num)))?;
            let den: BigInt = r
                .den
                .parse()
                .map_err(|_| Error::parse(format!("bad denominator {:?}", r.den)))?;
            if den.is_zero() {
                return Err(Error::parse("zero denominator"));
            }
            if m.weight() > order {
                return Err(Error::parse(format!("monomial {m} exceeds order {order}")));
            }
            s.add_term(m, BigRational::new(num, den));
        }
        Ok(s)
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson { order: self.order, terms: self.to_records() }
    }

    pub fn from_json(json: &SeriesJson) -> Result<Self> {
        Self::from_records(&json.terms, json.order)
    }
}

/// One monomial of the shared serialization format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub exponents: BTreeMap<String, u32>,
    pub num: String,
    pub den: String,
}

/// A serialized series: truncation order plus its monomial records.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub order: u32,
    pub terms: Vec<SeriesRecord>,
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut sorted: Vec<_> = self.terms.iter().collect();
        sorted.sort_by_key(|(m, _)| (m.weight(), (*m).clone()));
        for (i, (m, c)) in sorted.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        write!(f, " + O({})", self.order + 1)
    }
}

impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl AddAssign<&TruncSeries> for TruncSeries {
    fn add_assign(&mut self, rhs: &TruncSeries) {
        if rhs.order < self.order {
            *self = self.truncate(rhs.order);
        }
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&TruncSeries> for TruncSeries {
    fn sub_assign(&mut self, rhs: &TruncSeries) {
        if rhs.order < self.order {
            *self = self.truncate(rhs.order);
        }
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl Add<&TruncSeries> for &TruncSeries {
    type Output = TruncSeries;
    fn add(self, rhs: &TruncSeries) -> TruncSeries {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for TruncSeries {
    type Output = TruncSeries;
    fn add(mut self, rhs: TruncSeries) -> TruncSeries {
        self += &rhs;
        self
    }
}

impl Sub<&TruncSeries> for &TruncSeries {
    type Output = TruncSeries;
    fn sub(self, rhs: &TruncSeries) -> TruncSeries {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for TruncSeries {
    type Output = TruncSeries;
    fn sub(mut self, rhs: TruncSeries) -> TruncSeries {
        self -= &rhs;
        self
    }
}

impl Neg for &TruncSeries {
    type Output = TruncSeries;
    fn neg(self) -> TruncSeries {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect();
        TruncSeries { order: self.order, terms }
    }
}

impl Neg for TruncSeries {
    type Output = TruncSeries;
    fn neg(self) -> TruncSeries {
        -&self
    }
}

impl Mul<&TruncSeries> for &TruncSeries {
    type Output = TruncSeries;
    fn mul(self, rhs: &TruncSeries) -> TruncSeries {
        let order = self.order.min(rhs.order);
        let mut out = TruncSeries::zero(order);
        let rhs_terms: Vec<_> = rhs.terms.iter().map(|(m, c)| (m, m.weight(), c)).collect();
        for (ma, ca) in &self.terms {
            let wa = ma.weight();
            if wa > order {
                continue;
            }
            for &(mb, wb, cb) in &rhs_terms {
                if wa + wb > order {
                    continue;
                }
                out.add_term(ma.product(mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for TruncSeries {
    type Output = TruncSeries;
    fn mul(self, rhs: TruncSeries) -> TruncSeries {
        &self * &rhs
    }
}

/// Determinant of a square matrix of series by expansion over column
/// subsets (exact, division free; `2^n · n` products).
pub fn determinant(matrix: &[Vec<TruncSeries>], order: u32) -> TruncSeries {
    let n = matrix.len();
    if n == 0 {
        return TruncSeries::one(order);
    }
    assert!(n <= 20, "determinant of size {n} is out of range");
    assert!(matrix.iter().all(|row| row.len() == n), "matrix must be square");
    let mut dp: Vec<Option<TruncSeries>> = vec![None; 1 << n];
    dp[0] = Some(TruncSeries::one(order));
    for mask in 0usize..(1 << n) {
        let Some(partial) = dp[mask].take() else { continue };
        let row = mask.count_ones() as usize;
        if row == n {
            dp[mask] = Some(partial);
            continue;
        }
        if partial.is_zero() {
            dp[mask] = Some(partial);
            continue;
        }
        for col in 0..n {
            if mask & (1 << col) != 0 || matrix[row][col].is_zero() {
                continue;
            }
            let inversions = (mask >> (col + 1)).count_ones();
            let mut term = &partial * &matrix[row][col];
            if inversions % 2 == 1 {
                term = -term;
            }
            let slot = &mut dp[mask | (1 << col)];
            match slot {
                Some(acc) => *acc += &term,
                None => *slot = Some(term),
            }
        }
        dp[mask] = Some(partial);
    }
    dp[(1 << n) - 1]
        .take()
        .unwrap_or_else(|| TruncSeries::zero(order))
        .with_order(order)
}
