//! Command-line surface. Every subcommand is a thin wrapper over one library
//! operation and renders a JSON (or CSV) report.
//!
//! Half-integers cross this boundary as odd doubled integers: `--X 1,-3`
//! means `{1/2, -3/2}`.

use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::partitions::{HalfInt, DEFAULT_ENUMERATION_LIMIT};
use crate::schur_measure::{correlation, correlation_oracle, j_coeffs, plancherel_params, SchurParams};
use crate::series::{SeriesJson, TruncSeries};
use crate::symfunc::MiwaParams;
use crate::toda::{tau_sequence, toda_report, CorrelationSource};
use crate::uniform::expected::expected_size;
use crate::uniform::frobenius::{frobenius_corr_enum, frobenius_corr_integral};
use crate::uniform::limit::{bulk_limit, vershik};
use crate::uniform::npoint::{npoint_direct, npoint_theta_with, NPointRequest};
use crate::uniform::sampler::{sample_many, UniformSampler, DEFAULT_TAIL_EPS};
use crate::uniform::theta::{theta11_product, theta3, theta3_product, theta_deriv, ThetaContext};

pub const DEFAULT_DEGREE: u32 = 6;

#[derive(Debug, Parser)]
#[command(name = "infwedge", version, about = "Schur measures, the uniform measure on partitions, and their correlation functions")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Add a wall-clock `timestamp` field (breaks byte-for-byte reproducibility).
    #[arg(long, global = true)]
    pub timestamp: bool,
    /// Worker threads for oracle sums, quadrature and sampling.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Series truncation threshold for q-series and the sampler's part cutoff.
    #[arg(long, global = true, env = "INFWEDGE_TAIL_EPS")]
    pub tail_eps: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Correlation function ρ(X) of a Schur measure as an exact series.
    SchurCorr(SchurCorrArgs),
    /// n-point function of the uniform measure.
    Npoint(NPointArgs),
    /// Exact samples from the uniform measure, one JSON array per line.
    Sample(SampleArgs),
    /// Bilinear Toda check for τ_n = Z ρ(X - n).
    TodaCheck(TodaArgs),
    /// Θ₁₁ (and its x d/dx derivatives) or Θ₃ at a real point.
    Theta(ThetaArgs),
    /// Frobenius-coordinate correlation ϱ(X, q).
    FrobeniusCorr(FrobeniusArgs),
    /// Expected size N(q) = Σ σ₁(n) qⁿ.
    ExpectedSize(ExpectedArgs),
    /// Vershik limit shape and the bulk limit at u.
    LimitShape(LimitArgs),
    /// Coefficients J_n(t, t') as exact series.
    JCoeffs(JArgs),
}

/// Parameter family for Schur-measure commands. Without a choice, `t` and
/// `t'` are numeric lists (zero when omitted).
#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Numeric t_1, t_2, ... as rationals ("1,0,1/3").
    #[arg(long = "t", value_delimiter = ',', allow_hyphen_values = true, conflicts_with_all = ["plancherel", "symbolic"])]
    pub t: Vec<String>,
    /// Numeric t'_1, t'_2, ...
    #[arg(long = "tp", value_delimiter = ',', allow_hyphen_values = true, conflicts_with_all = ["plancherel", "symbolic"])]
    pub tp: Vec<String>,
    /// Plancherel specialization t = t' = (s, 0, ...).
    #[arg(long, conflicts_with = "symbolic")]
    pub plancherel: bool,
    /// Formal t_1..t_K and t'_1..t'_K (named t1.., u1..).
    #[arg(long, value_name = "K")]
    pub symbolic: Option<u32>,
}

#[derive(Debug, Args)]
pub struct SchurCorrArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// X as odd doubled half-integers.
    #[arg(long = "X", value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Vec<i64>,
    /// Truncation degree.
    #[arg(long = "D", env = "INFWEDGE_DEGREE", default_value_t = DEFAULT_DEGREE)]
    pub degree: u32,
    /// Also evaluate by summation over partitions and compare.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NPointMethod {
    Direct,
    Theta,
    Both,
}

#[derive(Debug, Args)]
pub struct NPointArgs {
    #[arg(long = "t", value_delimiter = ',', required = true)]
    pub t: Vec<f64>,
    #[arg(long)]
    pub q: f64,
    #[arg(long, value_enum, default_value_t = NPointMethod::Direct)]
    pub method: NPointMethod,
    #[arg(long, default_value_t = 60)]
    pub cutoff: usize,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub q: f64,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Source {
    Kernel,
    Oracle,
}

#[derive(Debug, Args)]
pub struct TodaArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long = "X", value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Vec<i64>,
    #[arg(long = "D", env = "INFWEDGE_DEGREE", default_value_t = DEFAULT_DEGREE)]
    pub degree: u32,
    #[arg(long, default_value_t = -2, allow_hyphen_values = true)]
    pub n_min: i64,
    #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
    pub n_max: i64,
    #[arg(long, value_enum, default_value_t = Source::Kernel)]
    pub source: Source,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    #[value(name = "11")]
    Odd,
    #[value(name = "3")]
    Three,
}

#[derive(Debug, Args)]
pub struct ThetaArgs {
    #[arg(long, value_enum, default_value_t = Which::Odd)]
    pub which: Which,
    #[arg(long)]
    pub x: f64,
    #[arg(long)]
    pub q: f64,
    /// Order k of (x d/dx)^k, Θ₁₁ only.
    #[arg(long, default_value_t = 0)]
    pub deriv: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FrobeniusMethod {
    Integral,
    Enum,
    Both,
}

#[derive(Debug, Args)]
pub struct FrobeniusArgs {
    #[arg(long = "X", value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Vec<i64>,
    #[arg(long)]
    pub q: f64,
    #[arg(long, value_enum, default_value_t = FrobeniusMethod::Integral)]
    pub method: FrobeniusMethod,
    #[arg(long, default_value_t = 50)]
    pub cutoff: usize,
}

#[derive(Debug, Args)]
pub struct ExpectedArgs {
    #[arg(long)]
    pub q: f64,
    #[arg(long, default_value_t = 30)]
    pub nmax: usize,
}

#[derive(Debug, Args)]
pub struct LimitArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub u: f64,
}

#[derive(Debug, Args)]
pub struct JArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long = "D", env = "INFWEDGE_DEGREE", default_value_t = DEFAULT_DEGREE)]
    pub degree: u32,
    /// Smallest n (defaults to -D).
    #[arg(long, allow_hyphen_values = true)]
    pub n_min: Option<i64>,
    /// Largest n (defaults to D).
    #[arg(long, allow_hyphen_values = true)]
    pub n_max: Option<i64>,
}

#[derive(Debug, Serialize)]
pub struct NamedSeries {
    pub name: String,
    pub text: String,
    pub series: SeriesJson,
}

impl NamedSeries {
    fn new(name: impl Into<String>, s: &TruncSeries) -> Self {
        NamedSeries { name: name.into(), text: s.to_string(), series: s.to_json() }
    }
}

#[derive(Debug, Serialize)]
pub struct SeriesReport {
    pub command: String,
    pub inputs: Value,
    pub order: u32,
    pub series: Vec<NamedSeries>,
    #[serde(rename = "match", skip_serializing_if = "Option::is_none")]
    pub matches: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

#[derive(Debug, Serialize)]
pub struct ValueReport {
    pub command: String,
    pub inputs: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_diff: Option<f64>,
    /// Secondary values, e.g. each method's result in `both` mode.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<(String, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl ValueReport {
    fn new(command: &str, inputs: Value, value: f64) -> Self {
        ValueReport {
            command: command.into(),
            inputs,
            method: None,
            value,
            error_estimate: None,
            abs_diff: None,
            components: Vec::new(),
            coefficients: None,
            timestamp: None,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ResidualTerm {
    pub monomial: String,
    pub num: String,
    pub den: String,
}

#[derive(Debug, Serialize)]
pub struct CheckEntry {
    pub n: i64,
    pub through_degree: u32,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_residual: Option<ResidualTerm>,
}

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub command: String,
    pub inputs: Value,
    pub passed: bool,
    pub checks: Vec<CheckEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

#[derive(Debug, Serialize)]
pub struct Stat {
    pub stat: String,
    pub value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Serialize)]
pub struct SampleSummary {
    pub count: usize,
    pub mean_size: f64,
    #[serde(rename = "N_q")]
    pub n_q: f64,
    pub z_score: f64,
    pub stats: Vec<Stat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

/// A finished run, ready to be rendered.
#[derive(Debug)]
pub enum Report {
    Series(SeriesReport),
    Value(ValueReport),
    Check(CheckReport),
    Samples { parts: Vec<Vec<usize>>, summary: SampleSummary },
}

fn halfints(xs: &[i64]) -> Result<Vec<HalfInt>> {
    let mut out = xs.iter().map(|&x| HalfInt::from_twice(x)).collect::<Result<Vec<_>>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

fn rationals(list: &[String]) -> Result<Vec<BigRational>> {
    list.iter()
        .map(|s| BigRational::from_str(s.trim()).map_err(|_| Error::parse(format!("{s:?} is not a rational number"))))
        .collect()
}

fn schur_params(args: &ParamArgs, degree: u32) -> Result<(SchurParams, Value)> {
    if degree == 0 {
        return Err(Error::domain("truncation degree D must be at least 1"));
    }
    if args.plancherel {
        return Ok((plancherel_params(degree), json!({"family": "plancherel"})));
    }
    if let Some(k) = args.symbolic {
        if k == 0 || k > degree {
            return Err(Error::domain(format!("--symbolic {k} must lie in 1..=D")));
        }
        return Ok((SchurParams::symbolic(k, degree), json!({"family": "symbolic", "k": k})));
    }
    let t = MiwaParams::from_list(rationals(&args.t)?);
    let tp = MiwaParams::from_list(rationals(&args.tp)?);
    let inputs = json!({"family": "numeric", "t": args.t, "tp": args.tp});
    Ok((SchurParams::numeric(&t, &tp, degree), inputs))
}

fn theta_ctx(q: f64, global: &GlobalArgs) -> Result<ThetaContext> {
    let ctx = ThetaContext::new(q)?;
    Ok(match global.tail_eps {
        Some(eps) if eps > 0.0 => ctx.with_tail_eps(eps),
        Some(eps) => return Err(Error::domain(format!("tail_eps {eps} must be positive"))),
        None => ctx,
    })
}

fn residual_term(t: Option<(crate::series::Monomial, BigRational)>) -> Option<ResidualTerm> {
    t.map(|(m, c)| ResidualTerm { monomial: m.to_string(), num: c.numer().to_string(), den: c.denom().to_string() })
}

/// Runs a command without rendering it.
pub fn run(command: &Command, global: &GlobalArgs) -> Result<Report> {
    match command {
        Command::SchurCorr(a) => {
            let (params, mut inputs) = schur_params(&a.params, a.degree)?;
            let xs = halfints(&a.x)?;
            inputs["X"] = json!(a.x);
            let rho = correlation(&params, &xs);
            let mut series = vec![NamedSeries::new("correlation", &rho)];
            let mut matches = None;
            if a.oracle {
                if a.degree as usize > DEFAULT_ENUMERATION_LIMIT {
                    return Err(Error::domain(format!(
                        "oracle enumeration is limited to D <= {DEFAULT_ENUMERATION_LIMIT}"
                    )));
                }
                let oracle = correlation_oracle(&params, &xs);
                matches = Some(oracle == rho);
                series.push(NamedSeries::new("oracle", &oracle));
            }
            Ok(Report::Series(SeriesReport {
                command: "schur-corr".into(),
                inputs,
                order: a.degree,
                series,
                matches,
                timestamp: None,
            }))
        }
        Command::JCoeffs(a) => {
            let (params, inputs) = schur_params(&a.params, a.degree)?;
            let d = i64::from(a.degree);
            let (lo, hi) = (a.n_min.unwrap_or(-d), a.n_max.unwrap_or(d));
            if lo > hi {
                return Err(Error::domain(format!("empty range {lo}..={hi}")));
            }
            let table = j_coeffs(&params);
            let series = (lo..=hi).map(|n| NamedSeries::new(format!("J[{n}]"), &table.get(n))).collect();
            Ok(Report::Series(SeriesReport {
                command: "j-coeffs".into(),
                inputs,
                order: a.degree,
                series,
                matches: None,
                timestamp: None,
            }))
        }
        Command::TodaCheck(a) => {
            let (params, mut inputs) = schur_params(&a.params, a.degree)?;
            let xs = halfints(&a.x)?;
            inputs["X"] = json!(a.x);
            if a.n_min > a.n_max {
                return Err(Error::domain(format!("empty range {}..={}", a.n_min, a.n_max)));
            }
            if a.degree < 2 {
                return Err(Error::domain("the bilinear check needs D >= 2"));
            }
            let source = match a.source {
                Source::Kernel => CorrelationSource::Kernel,
                Source::Oracle => CorrelationSource::Oracle,
            };
            let seq = tau_sequence(&params, &xs, a.n_min - 1, a.n_max + 1, source)?;
            let checks = (a.n_min..=a.n_max)
                .map(|n| {
                    let r = toda_report(&seq, n)?;
                    Ok(CheckEntry {
                        n,
                        through_degree: r.through_degree,
                        passed: r.passed(),
                        first_residual: residual_term(r.first_residual),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Report::Check(CheckReport {
                command: "toda-check".into(),
                inputs,
                passed: checks.iter().all(|c| c.passed),
                checks,
                timestamp: None,
            }))
        }
        Command::Npoint(a) => {
            let ctx = theta_ctx(a.q, global)?;
            let req = NPointRequest::new(a.t.clone(), a.q);
            let inputs = json!({"t": a.t, "q": a.q, "cutoff": a.cutoff});
            let mut report = match a.method {
                NPointMethod::Direct => {
                    let v = npoint_direct(&req, a.cutoff)?;
                    let mut r = ValueReport::new("npoint", inputs, v.value);
                    r.error_estimate = Some(v.error_estimate);
                    r
                }
                NPointMethod::Theta => ValueReport::new("npoint", inputs, npoint_theta_with(&a.t, &ctx)?),
                NPointMethod::Both => {
                    let direct = npoint_direct(&req, a.cutoff)?;
                    let theta = npoint_theta_with(&a.t, &ctx)?;
                    let mut r = ValueReport::new("npoint", inputs, theta);
                    r.error_estimate = Some(direct.error_estimate);
                    r.abs_diff = Some((theta - direct.value).abs());
                    r.components = vec![("direct".into(), direct.value), ("theta".into(), theta)];
                    r
                }
            };
            report.method = Some(format!("{:?}", a.method).to_lowercase());
            Ok(Report::Value(report))
        }
        Command::Theta(a) => {
            let ctx = theta_ctx(a.q, global)?;
            let inputs = json!({"x": a.x, "q": a.q, "deriv": a.deriv});
            let report = match a.which {
                Which::Odd => {
                    let value = theta_deriv(a.deriv, a.x, &ctx)?;
                    let mut r = ValueReport::new("theta", inputs, value);
                    r.method = Some("theta11".into());
                    if a.deriv == 0 {
                        let p = theta11_product(a.x, &ctx)?;
                        r.abs_diff = Some((p - value).abs());
                        r.components = vec![("product".into(), p)];
                    }
                    r
                }
                Which::Three => {
                    if a.deriv != 0 {
                        return Err(Error::domain("--deriv applies to theta 11 only"));
                    }
                    let value = theta3(a.x, &ctx)?;
                    let p = theta3_product(a.x, &ctx)?;
                    let mut r = ValueReport::new("theta", inputs, value);
                    r.method = Some("theta3".into());
                    r.abs_diff = Some((p - value).abs());
                    r.components = vec![("product".into(), p)];
                    r
                }
            };
            Ok(Report::Value(report))
        }
        Command::FrobeniusCorr(a) => {
            let ctx = theta_ctx(a.q, global)?;
            let xs = halfints(&a.x)?;
            let inputs = json!({"X": a.x, "q": a.q, "cutoff": a.cutoff});
            let needs_integral = a.method != FrobeniusMethod::Enum;
            if needs_integral && a.q == 0.0 {
                return Err(Error::domain("the contour integral needs q > 0"));
            }
            if a.cutoff > DEFAULT_ENUMERATION_LIMIT && a.method != FrobeniusMethod::Integral {
                return Err(Error::domain(format!("enumeration cutoff is limited to {DEFAULT_ENUMERATION_LIMIT}")));
            }
            let mut report = match a.method {
                FrobeniusMethod::Integral => ValueReport::new("frobenius-corr", inputs, frobenius_corr_integral(&xs, &ctx)),
                FrobeniusMethod::Enum => ValueReport::new("frobenius-corr", inputs, frobenius_corr_enum(&xs, &ctx, a.cutoff)),
                FrobeniusMethod::Both => {
                    let i = frobenius_corr_integral(&xs, &ctx);
                    let e = frobenius_corr_enum(&xs, &ctx, a.cutoff);
                    let mut r = ValueReport::new("frobenius-corr", inputs, i);
                    r.abs_diff = Some((i - e).abs());
                    r.components = vec![("integral".into(), i), ("enum".into(), e)];
                    r
                }
            };
            report.method = Some(format!("{:?}", a.method).to_lowercase());
            Ok(Report::Value(report))
        }
        Command::ExpectedSize(a) => {
            let ctx = theta_ctx(a.q, global)?;
            let e = expected_size(&ctx, a.nmax)?;
            let mut r = ValueReport::new("expected-size", json!({"q": a.q, "nmax": a.nmax}), e.value);
            if a.q > 0.0 {
                let rr = ctx.r();
                r.components = vec![("leading_asymptotic".into(), 1.0 / (24.0 * rr * rr))];
            }
            r.coefficients = Some(e.coefficients);
            Ok(Report::Value(r))
        }
        Command::LimitShape(a) => {
            let (upsilon, slope) = vershik(a.u);
            let mut r = ValueReport::new("limit-shape", json!({"u": a.u}), upsilon);
            r.components = vec![
                ("slope".into(), slope),
                ("bulk_limit".into(), bulk_limit(&[a.u])),
            ];
            Ok(Report::Value(r))
        }
        Command::Sample(a) => {
            if a.count == 0 {
                return Err(Error::domain("--count must be at least 1"));
            }
            let eps = global.tail_eps.unwrap_or(DEFAULT_TAIL_EPS);
            let sampler = UniformSampler::new(a.q, eps)?;
            let samples = sample_many(&sampler, a.count, a.seed);
            let sizes: Vec<f64> = samples.iter().map(|p| p.size() as f64).collect();
            let n = sizes.len() as f64;
            let mean = sizes.iter().sum::<f64>() / n;
            let var = if sizes.len() > 1 {
                sizes.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            let se = (var / n).sqrt();
            let n_q = expected_size(&ThetaContext::new(a.q)?, 1)?.value;
            let z_score = if se > 0.0 { (mean - n_q) / se } else { 0.0 };
            let empty = samples.iter().filter(|p| p.is_empty()).count() as f64 / n;
            let empty_se = (empty * (1.0 - empty) / n).sqrt();
            let summary = SampleSummary {
                count: a.count,
                mean_size: mean,
                n_q,
                z_score,
                stats: vec![
                    Stat { stat: "mean_size".into(), value: mean, ci_low: mean - 1.96 * se, ci_high: mean + 1.96 * se },
                    Stat {
                        stat: "empty_fraction".into(),
                        value: empty,
                        ci_low: empty - 1.96 * empty_se,
                        ci_high: empty + 1.96 * empty_se,
                    },
                ],
                timestamp: None,
            };
            let parts = samples.into_iter().map(Vec::from).collect();
            Ok(Report::Samples { parts, summary })
        }
    }
}

fn now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::parse(format!("output: {e}"))
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::numeric(format!("serialization: {e}")))
}

fn csv_text(rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    for row in rows {
        w.write_record(&row).map_err(io_err)?;
    }
    let bytes = w.into_inner().map_err(io_err)?;
    String::from_utf8(bytes).map_err(io_err)
}

fn series_rows(report: &SeriesReport) -> Vec<Vec<String>> {
    let mut rows = vec![vec!["name".into(), "monomial".into(), "num".into(), "den".into()]];
    for named in &report.series {
        for rec in &named.series.terms {
            let monomial = if rec.exponents.is_empty() {
                "1".to_string()
            } else {
                rec.exponents
                    .iter()
                    .map(|(v, e)| if *e == 1 { v.clone() } else { format!("{v}^{e}") })
                    .collect::<Vec<_>>()
                    .join("*")
            };
            rows.push(vec![named.name.clone(), monomial, rec.num.clone(), rec.den.clone()]);
        }
    }
    rows
}

/// Renders a report in the requested format. `timestamp` is only added when
/// asked for, so default output is a pure function of the arguments.
pub fn render(report: Report, format: Format, timestamp: bool) -> Result<String> {
    let stamp = timestamp.then(now);
    let mut out = match (report, format) {
        (Report::Series(mut r), Format::Json) => {
            r.timestamp = stamp;
            to_json(&r)?
        }
        (Report::Series(r), Format::Csv) => csv_text(series_rows(&r))?,
        (Report::Value(mut r), Format::Json) => {
            r.timestamp = stamp;
            to_json(&r)?
        }
        (Report::Value(r), Format::Csv) => {
            let mut rows = vec![vec!["key".to_string(), "value".to_string()]];
            rows.push(vec!["value".into(), r.value.to_string()]);
            for (k, v) in [("error_estimate", r.error_estimate), ("abs_diff", r.abs_diff)] {
                if let Some(v) = v {
                    rows.push(vec![k.into(), v.to_string()]);
                }
            }
            for (k, v) in &r.components {
                rows.push(vec![k.clone(), v.to_string()]);
            }
            for (i, c) in r.coefficients.iter().flatten().enumerate() {
                rows.push(vec![format!("sigma1[{}]", i + 1), c.to_string()]);
            }
            csv_text(rows)?
        }
        (Report::Check(mut r), Format::Json) => {
            r.timestamp = stamp;
            to_json(&r)?
        }
        (Report::Check(r), Format::Csv) => {
            let mut rows = vec![vec!["n".to_string(), "through_degree".into(), "passed".into(), "first_residual".into()]];
            for c in &r.checks {
                let residual = c
                    .first_residual
                    .as_ref()
                    .map(|t| format!("{}/{} {}", t.num, t.den, t.monomial))
                    .unwrap_or_default();
                rows.push(vec![c.n.to_string(), c.through_degree.to_string(), c.passed.to_string(), residual]);
            }
            csv_text(rows)?
        }
        (Report::Samples { parts, mut summary }, Format::Json) => {
            summary.timestamp = stamp;
            let mut s = String::new();
            for p in &parts {
                s.push_str(&serde_json::to_string(p).map_err(io_err)?);
                s.push('\n');
            }
            s.push_str(&serde_json::to_string(&json!({ "summary": summary })).map_err(io_err)?);
            s
        }
        (Report::Samples { parts, summary }, Format::Csv) => {
            let mut rows = vec![vec!["index".to_string(), "size".into(), "parts".into()]];
            for (i, p) in parts.iter().enumerate() {
                let joined = p.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
                rows.push(vec![i.to_string(), p.iter().sum::<usize>().to_string(), joined]);
            }
            rows.push(vec!["stat".into(), "value".into(), "ci_low".into(), "ci_high".into()]);
            rows.push(vec!["z_score".into(), summary.z_score.to_string(), String::new(), String::new()]);
            rows.push(vec!["N_q".into(), summary.n_q.to_string(), String::new(), String::new()]);
            for st in &summary.stats {
                rows.push(vec![st.stat.clone(), st.value.to_string(), st.ci_low.to_string(), st.ci_high.to_string()]);
            }
            csv_text(rows)?
        }
    };
    if !out.ends_with('\n') {
        out.push('\n');
    }
    Ok(out)
}

/// Full CLI run: thread setup, command, rendering, output.
pub fn execute(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.global.threads {
        // A second initialization (e.g. in tests) keeps the existing pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let report = run(&cli.command, &cli.global)?;
    let text = render(report, cli.global.format, cli.global.timestamp)?;
    match &cli.global.output {
        Some(path) => std::fs::write(path, text).map_err(io_err),
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(io_err),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Result<String> {
        let cli = Cli::try_parse_from(std::iter::once("infwedge").chain(args.iter().copied()))
            .map_err(|e| Error::Parse(e.to_string()))?;
        render(run(&cli.command, &cli.global)?, cli.global.format, cli.global.timestamp)
    }

    fn json_of(args: &[&str]) -> Value {
        serde_json::from_str(&run_args(args).unwrap()).unwrap()
    }

    #[test]
    fn zero_params_series_is_one() {
        let v = json_of(&["schur-corr", "--t", "0", "--tp", "0", "--X", "-1"]);
        assert_eq!(v["series"][0]["text"], "1 + O(7)");
        assert_eq!(v["series"][0]["series"]["terms"], json!([{"exponents": {}, "num": "1", "den": "1"}]));
    }

    #[test]
    fn plancherel_matches_oracle() {
        let v = json_of(&["schur-corr", "--plancherel", "--X", "1", "--D", "6", "--oracle"]);
        assert_eq!(v["match"], true);
    }

    #[test]
    fn emitted_series_round_trips() {
        let v = json_of(&["schur-corr", "--symbolic", "2", "--X", "1,-3", "--D", "5"]);
        let parsed: SeriesJson = serde_json::from_value(v["series"][0]["series"].clone()).unwrap();
        let s = TruncSeries::from_json(&parsed).unwrap();
        let p = SchurParams::symbolic(2, 5);
        let xs = [HalfInt::from_twice(1).unwrap(), HalfInt::from_twice(-3).unwrap()];
        assert_eq!(s, correlation(&p, &xs));
    }

    #[test]
    fn error_codes() {
        assert_eq!(run_args(&["schur-corr", "--X", "2"]).unwrap_err().code(), 2);
        assert_eq!(run_args(&["schur-corr", "--t", "x"]).unwrap_err().code(), 2);
        assert_eq!(run_args(&["npoint", "--q", "0.3", "--t", "0.5"]).unwrap_err().code(), 3);
        assert_eq!(run_args(&["sample", "--q", "1.5"]).unwrap_err().code(), 3);
        assert_eq!(run_args(&["npoint", "--q", "0.5", "--t", "1", "--method", "theta"]).unwrap_err().code(), 4);
    }

    #[test]
    fn npoint_reports() {
        let v = json_of(&["npoint", "--q", "0", "--t", "1.5"]);
        let t: f64 = 1.5;
        assert!((v["value"].as_f64().unwrap() - 1.0 / (t.sqrt() - 1.0 / t.sqrt())).abs() < 1e-14);
        let v = json_of(&["npoint", "--q", "0.5", "--t", "1.5", "--method", "both"]);
        assert!(v["abs_diff"].as_f64().unwrap() < 1e-9);
    }

    #[test]
    fn sample_is_deterministic() {
        let a = run_args(&["sample", "--q", "0.5", "--count", "50", "--seed", "3"]).unwrap();
        let b = run_args(&["sample", "--q", "0.5", "--count", "50", "--seed", "3"]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.lines().count(), 51);
        assert!(a.lines().last().unwrap().starts_with("{\"summary\""));
    }

    #[test]
    fn csv_outputs() {
        let s = run_args(&["j-coeffs", "--symbolic", "1", "--D", "2", "--n-min", "0", "--n-max", "1", "--format", "csv"]).unwrap();
        assert!(s.starts_with("name,monomial,num,den\n"));
        assert!(s.contains("J[1],t1,1,1"));
        let s = run_args(&["toda-check", "--symbolic", "1", "--X", "-1", "--D", "4", "--format", "csv"]).unwrap();
        assert_eq!(s.lines().count(), 6);
    }

    #[test]
    fn toda_and_limits() {
        let v = json_of(&["toda-check", "--symbolic", "2", "--X", "1,-3", "--D", "5", "--n-min", "0", "--n-max", "1"]);
        assert_eq!(v["passed"], true);
        let v = json_of(&["limit-shape", "--u", "0"]);
        assert_eq!(v["components"][1][1], 0.5);
        let v = json_of(&["expected-size", "--q", "0.3", "--nmax", "6"]);
        assert_eq!(v["coefficients"], json!([1, 3, 4, 7, 6, 12]));
        let v = json_of(&["theta", "--which", "3", "--x", "0.8", "--q", "0.5"]);
        assert!(v["abs_diff"].as_f64().unwrap() < 1e-12);
        let v = json_of(&["frobenius-corr", "--X", "1", "--q", "0.3", "--method", "both", "--cutoff", "40"]);
        assert!(v["abs_diff"].as_f64().unwrap() < 1e-8);
    }
}
