//! Serializable report sections. Field elements and polynomials are written
//! in their text forms, big integers as decimal strings.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::bounds::{decimal, BoundsLedger, ConstantsLedger};
use crate::cover::{CoverPoint, CurveParam, RankCert, WitnessReport};
use crate::error::Error;
use crate::field::Field;
use crate::polar::{ContactFlags, ContactReport, SearchStats};
use crate::workbench::config::Config;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorEntry {
    pub stage: String,
    pub code: String,
    pub message: String,
}

impl ErrorEntry {
    pub fn new(stage: &str, e: &Error) -> Self {
        let message = match e {
            Error::Degenerate { flag, msg } => format!("{flag}: {msg}"),
            other => other.to_string(),
        };
        ErrorEntry { stage: stage.to_string(), code: e.code().to_string(), message }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsSection {
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ledger: Option<ConstantsLedger>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub refusal: Option<ErrorEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContactSection {
    pub eta: Vec<String>,
    pub xi: Vec<String>,
    pub restricted: Option<String>,
    pub contact_order: Option<u32>,
    pub a: Option<String>,
    pub b: Option<String>,
    pub t_beta: Option<String>,
    pub beta: Option<Vec<String>>,
    pub beta_on_b: Option<bool>,
    pub flags: ContactFlags,
}

impl ContactSection {
    pub fn new<F: Field>(rep: &ContactReport<F>, beta_on_b: Option<bool>) -> Self {
        ContactSection {
            eta: rep.eta.to_strings(),
            xi: rep.xi.to_strings(),
            restricted: rep.restricted.as_ref().map(|u| u.poly.to_poly("t").to_string()),
            contact_order: rep.contact_order,
            a: rep.a.as_ref().map(|x| x.to_string()),
            b: rep.b.as_ref().map(|x| x.to_string()),
            t_beta: rep.t_beta.as_ref().map(|x| x.to_string()),
            beta: rep.beta.as_ref().map(|x| x.to_strings()),
            beta_on_b,
            flags: rep.flags,
        }
    }
}

/// A rational function of `tau` as numerator and denominator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalFunction {
    pub num: String,
    pub den: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverPointSection {
    pub tau: String,
    pub base: Vec<String>,
    pub w: String,
    pub chart: usize,
    pub on_cover: bool,
}

impl CoverPointSection {
    pub fn new<F: Field>(tau: &F, pt: &CoverPoint<F>, on_cover: bool) -> Self {
        CoverPointSection { tau: tau.to_string(), base: pt.base.to_strings(), w: pt.w.to_string(), chart: pt.chart, on_cover }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveSection {
    pub chart: usize,
    pub xi: Vec<String>,
    pub t_of_tau: RationalFunction,
    pub w_of_tau: RationalFunction,
    pub c: String,
    pub t_beta: String,
    pub identity_ok: bool,
    pub on_cover_ok: bool,
    pub samples: Vec<CoverPointSection>,
}

impl CurveSection {
    pub fn new<F: Field>(cp: &CurveParam<F>, samples: Vec<CoverPointSection>) -> Self {
        let (tn, td) = cp.t_of_tau.to_text("tau");
        let (wn, wd) = cp.w_of_tau.to_text("tau");
        CurveSection {
            chart: cp.chart,
            xi: cp.xi.to_strings(),
            t_of_tau: RationalFunction { num: tn, den: td },
            w_of_tau: RationalFunction { num: wn, den: wd },
            c: cp.c.to_string(),
            t_beta: cp.t_beta.to_string(),
            identity_ok: cp.identity_ok,
            on_cover_ok: cp.on_cover_ok,
            samples,
        }
    }
}

pub const CERTIFICATE_LABEL: &str = "probabilistic";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankSection {
    pub which: String,
    pub rank: usize,
    pub rank_alt: usize,
    pub rank_stacked: usize,
    pub constraint_rank: usize,
    pub expected: usize,
    pub pass: bool,
    pub label: String,
    pub characteristic: u64,
    pub sz_degree: u64,
    /// `sz_degree / p`
    pub failure_bound: f64,
    pub extra: String,
    pub jacobian: Vec<Vec<String>>,
}

impl RankSection {
    pub fn new<F: Field>(c: &RankCert<F>) -> Self {
        RankSection {
            which: c.which.name().to_string(),
            rank: c.rank,
            rank_alt: c.rank_alt,
            rank_stacked: c.rank_stacked,
            constraint_rank: c.constraint_rank,
            expected: c.expected,
            pass: c.pass(),
            label: CERTIFICATE_LABEL.to_string(),
            characteristic: c.characteristic,
            sz_degree: c.sz_degree,
            failure_bound: c.failure_bound(),
            extra: c.extra.to_string(),
            jacobian: c.jacobian.to_strings(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationSection {
    pub l0_basis: Vec<Vec<String>>,
    pub frame_adapted: bool,
    pub terms: usize,
    pub contains_l0: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub branch: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiSection {
    pub residual_ok: bool,
    pub pure_tilde_free: bool,
    pub degrees: Vec<Option<u32>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: usize,
    /// Seed of the attempt that produced the record.
    pub seed: String,
    pub attempts: usize,
    /// `ok`, `flagged` or `error`.
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub flag: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<ErrorEntry>,
    /// Sampling failures that triggered a retry.
    pub retries: Vec<ErrorEntry>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub generation: Option<GenerationSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub phi: Option<PhiSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub search: Option<SearchStats>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub contact: Option<ContactSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub curve: Option<CurveSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub omega_consistent: Option<bool>,
    pub ranks: Vec<RankSection>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankSummary {
    pub which: String,
    pub expected: usize,
    pub min: Option<usize>,
    pub max: Option<usize>,
    pub full: usize,
    pub max_failure_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineSection {
    pub p: u64,
    pub trials: usize,
    pub unflagged: usize,
    pub flagged: usize,
    pub errors: usize,
    pub passed: usize,
    pub unflagged_fraction: f64,
    pub required_fraction: f64,
    pub contact_order_expected: u32,
    pub rank_summary: Vec<RankSummary>,
    pub certificate_note: String,
    pub records: Vec<TrialRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberConditionSection {
    pub order: u32,
    pub condition: String,
    pub var: Option<String>,
    pub exponent: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessSection {
    pub d: u32,
    pub frame: Vec<String>,
    pub bstar: String,
    pub eta_star: Vec<String>,
    pub beta_star: Vec<String>,
    pub fiber_system: Vec<FiberConditionSection>,
    pub eta_index: Option<usize>,
    pub index_convention: String,
    pub triangular: bool,
    pub unique: bool,
    #[serde(with = "decimal")]
    pub multiplicity: BigInt,
    #[serde(with = "decimal")]
    pub expected_multiplicity: BigInt,
    pub multiplicity_matches: bool,
    pub eta_on_b: bool,
    pub beta_on_b: bool,
    pub beta_on_polars: bool,
    pub pass: bool,
}

impl WitnessSection {
    pub fn new(w: &WitnessReport) -> Self {
        let unique = w.unique;
        let names: Vec<String> = (0..w.bstar.nvars()).map(|i| format!("eta{i}")).collect();
        WitnessSection {
            d: w.d,
            frame: w.bstar.frame().names().to_vec(),
            bstar: w.bstar.to_string(),
            eta_star: w.eta_star.to_strings(),
            beta_star: w.beta_star.to_strings(),
            fiber_system: w
                .fiber_system
                .iter()
                .map(|c| FiberConditionSection {
                    order: c.order,
                    condition: c.condition.to_string(),
                    var: names.get(c.var).cloned(),
                    exponent: c.exponent,
                })
                .collect(),
            eta_index: unique.then_some(w.eta_index),
            index_convention: if unique {
                format!("zero-based: the fibre system leaves only coordinate {} free, so eta* = e_{}", w.eta_index, w.eta_index)
            } else {
                "undetermined: the fibre system does not single out one coordinate".to_string()
            },
            triangular: w.triangular,
            unique,
            multiplicity: w.multiplicity.clone(),
            expected_multiplicity: w.expected_multiplicity.clone(),
            multiplicity_matches: w.multiplicity == w.expected_multiplicity,
            eta_on_b: w.eta_on_b,
            beta_on_b: w.beta_on_b,
            beta_on_polars: w.beta_on_polars,
            pass: w.pass(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamSection {
    pub field: String,
    pub frame: Vec<String>,
    pub branch: String,
    pub contact: ContactSection,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub curve: Option<CurveSection>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Wall-clock milliseconds per stage; excluded from determinism guarantees.
pub type Timings = BTreeMap<String, u128>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: Config,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub constants: Option<ConstantsSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bounds: Option<BoundsLedger>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pipeline: Option<PipelineSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<WitnessSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub param: Option<ParamSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub selftest: Option<Vec<CheckEntry>>,
    pub errors: Vec<ErrorEntry>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timings: Option<Timings>,
}

impl Report {
    pub fn new(command: &str, config: &Config) -> Self {
        Report {
            tool: "polarcover".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config: config.clone(),
            constants: None,
            bounds: None,
            pipeline: None,
            witness: None,
            param: None,
            selftest: None,
            errors: Vec::new(),
            verdict: Verdict::Fail,
            timings: None,
        }
    }

    /// Process exit status: 0 pass, 1 fail, 3 when sampling was exhausted.
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Pass => 0,
            Verdict::Fail if self.errors.iter().any(|e| e.code == "sampling-exhausted") => 3,
            Verdict::Fail => 1,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(s: &str) -> Result<Report, Error> {
        serde_json::from_str(s).map_err(|e| Error::Parse { pos: e.column(), msg: e.to_string() })
    }
}
