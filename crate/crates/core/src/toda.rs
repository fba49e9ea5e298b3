//! Tau functions `τ_n = Z ρ(X - n)` and the Toda lattice equation in
//! bilinear form
//!
//! ```text
//! τ_n ∂²τ_n/∂t_1∂t'_1 - ∂τ_n/∂t_1 · ∂τ_n/∂t'_1 = τ_{n+1} τ_{n-1}
//! ```
//!
//! which is total even where `τ_n` has zero constant term.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::partitions::HalfInt;
use crate::schur_measure::{correlation_oracle, Kernel, SchurParams};
use crate::series::{Monomial, TruncSeries, Var};

/// How `ρ(X - n)` is evaluated when building a tau sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorrelationSource {
    Kernel,
    Oracle,
}

#[derive(Clone, Debug)]
pub struct TauSequence {
    xs: Vec<HalfInt>,
    order: u32,
    taus: BTreeMap<i64, TruncSeries>,
}

impl TauSequence {
    pub fn xs(&self) -> &[HalfInt] {
        &self.xs
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn range(&self) -> (i64, i64) {
        let lo = *self.taus.keys().next().expect("nonempty range");
        let hi = *self.taus.keys().next_back().expect("nonempty range");
        (lo, hi)
    }

    pub fn get(&self, n: i64) -> Option<&TruncSeries> {
        self.taus.get(&n)
    }
}

/// `X - n`.
pub fn translate(xs: &[HalfInt], n: i64) -> Vec<HalfInt> {
    xs.iter().map(|x| x.shift(-n)).collect()
}

pub fn tau_sequence(
    params: &SchurParams,
    xs: &[HalfInt],
    n_min: i64,
    n_max: i64,
    source: CorrelationSource,
) -> Result<TauSequence> {
    if n_min > n_max {
        return Err(Error::domain(format!("empty range {n_min}..={n_max}")));
    }
    let z = params.partition_function();
    let kernel = matches!(source, CorrelationSource::Kernel).then(|| Kernel::new(params));
    let taus = (n_min..=n_max)
        .map(|n| {
            let shifted = translate(xs, n);
            let rho = match &kernel {
                Some(k) => k.correlation(&shifted),
                None => correlation_oracle(params, &shifted),
            };
            (n, &z * &rho)
        })
        .collect();
    Ok(TauSequence { xs: xs.to_vec(), order: params.order(), taus })
}

/// The bilinear residual at `n`, exact through degree `D - 2`.
pub fn toda_bilinear_check(seq: &TauSequence, n: i64) -> Result<TruncSeries> {
    let get = |m: i64| {
        seq.get(m).ok_or_else(|| {
            let (lo, hi) = seq.range();
            Error::domain(format!("τ_{m} is outside the computed range {lo}..={hi}"))
        })
    };
    let (prev, tau, next) = (get(n - 1)?, get(n)?, get(n + 1)?);
    let order = seq.order.saturating_sub(2);
    let d_t = tau.derivative(Var::T(1));
    let d_u = tau.derivative(Var::U(1));
    let d_tu = d_t.derivative(Var::U(1));
    let lhs = &(tau * &d_tu) - &(&d_t * &d_u);
    let rhs = next * prev;
    Ok((&lhs - &rhs).truncate(order))
}

/// Outcome of one bilinear check, with the first nonzero residual monomial.
#[derive(Clone, Debug)]
pub struct TodaReport {
    pub n: i64,
    pub through_degree: u32,
    pub first_residual: Option<(Monomial, num_rational::BigRational)>,
}

impl TodaReport {
    pub fn passed(&self) -> bool {
        self.first_residual.is_none()
    }
}

pub fn toda_report(seq: &TauSequence, n: i64) -> Result<TodaReport> {
    let residual = toda_bilinear_check(seq, n)?;
    Ok(TodaReport {
        n,
        through_degree: residual.order(),
        first_residual: residual.lowest_term(),
    })
}
