//! `key = value` configuration files.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bounds::MultiDegree;
use crate::error::Error;
use crate::field::{FieldSpec, PrimeField};

pub const DEFAULT_RETRIES: usize = 16;
pub const DEFAULT_SEARCH_TRIALS: usize = 64;

/// Coefficient field of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldChoice {
    Rationals,
    Prime { p: u64 },
}

impl FieldChoice {
    pub fn spec(&self) -> FieldSpec {
        match *self {
            FieldChoice::Rationals => FieldSpec::Rationals,
            FieldChoice::Prime { p } => FieldSpec::PrimeField { p },
        }
    }
}

impl fmt::Display for FieldChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldChoice::Rationals => write!(f, "rationals"),
            FieldChoice::Prime { p } => write!(f, "prime:{p}"),
        }
    }
}

/// An explicit curve problem for the `param` command.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveInput {
    pub branch: String,
    pub eta: Vec<String>,
    pub xi: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Config {
    pub d: u32,
    pub r: usize,
    pub q: usize,
    pub field: FieldChoice,
    #[serde(with = "u64_text")]
    pub seed: u64,
    pub trials: usize,
    /// Multidegree for the bounds ledger; `(2d)` when absent.
    pub dbar: Option<MultiDegree>,
    pub c_external: Option<u64>,
    pub q_external: Option<u64>,
    /// Fresh sub-seeds tried per pipeline trial after a sampling failure.
    pub retries: usize,
    /// Attempts inside one point search.
    pub search_trials: usize,
    /// Sample values of `τ` for `param`.
    pub taus: Vec<i64>,
    pub curve: Option<CurveInput>,
    /// Include the generated branch forms in pipeline reports.
    pub emit_forms: bool,
    /// Add a wall-clock section to reports (the only nondeterministic part).
    pub timings: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            d: 3,
            r: 8,
            q: 4,
            field: FieldChoice::Prime { p: 10007 },
            seed: 0,
            trials: 1,
            dbar: None,
            c_external: None,
            q_external: None,
            retries: DEFAULT_RETRIES,
            search_trials: DEFAULT_SEARCH_TRIALS,
            taus: vec![2, 3],
            curve: None,
            emit_forms: false,
            timings: false,
        }
    }
}

/// 64-bit seeds as decimal strings, safe for consumers with 53-bit numbers.
mod u64_text {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

fn parse_num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T, Error> {
    v.parse().map_err(|_| Error::Config(format!("line {line}: `{key}` expects an integer, got `{v}`")))
}

fn parse_bool(line: usize, key: &str, v: &str) -> Result<bool, Error> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("line {line}: `{key}` expects true or false, got `{v}`"))),
    }
}

fn parse_list(v: &str) -> Vec<String> {
    let v = v.trim().trim_start_matches('(').trim_end_matches(')');
    v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

fn parse_field(line: usize, v: &str) -> Result<FieldChoice, Error> {
    if v == "rationals" || v == "Q" {
        return Ok(FieldChoice::Rationals);
    }
    let p = v
        .strip_prefix("prime:")
        .or_else(|| v.strip_prefix("prime "))
        .or_else(|| v.strip_prefix("F_"))
        .ok_or_else(|| Error::Config(format!("line {line}: field must be `rationals` or `prime:<p>`, got `{v}`")))?;
    let p: u64 = parse_num(line, "field", p.trim())?;
    Ok(FieldChoice::Prime { p })
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, Error> {
        let mut cfg = Config::default();
        let (mut branch, mut eta, mut xi) = (None, None, None);
        let mut seen = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap().trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {line}: expected `key = value`")))?;
            let (key, value) = (key.trim(), value.trim());
            if seen.contains(&key.to_string()) {
                return Err(Error::Config(format!("line {line}: duplicate key `{key}`")));
            }
            seen.push(key.to_string());
            match key {
                "d" => cfg.d = parse_num(line, key, value)?,
                "r" => cfg.r = parse_num(line, key, value)?,
                "q" => cfg.q = parse_num(line, key, value)?,
                "field" => cfg.field = parse_field(line, value)?,
                "p" => cfg.field = FieldChoice::Prime { p: parse_num(line, key, value)? },
                "seed" => cfg.seed = parse_num(line, key, value)?,
                "trials" => cfg.trials = parse_num(line, key, value)?,
                "dbar" => {
                    let degs = parse_list(value)
                        .iter()
                        .map(|s| parse_num::<u32>(line, key, s))
                        .collect::<Result<Vec<_>, _>>()?;
                    cfg.dbar = Some(MultiDegree::new(degs).map_err(|e| Error::Config(format!("line {line}: {e}")))?);
                }
                "c_external" | "c" => cfg.c_external = Some(parse_num(line, key, value)?),
                "q_external" => cfg.q_external = Some(parse_num(line, key, value)?),
                "retries" => cfg.retries = parse_num(line, key, value)?,
                "search_trials" => cfg.search_trials = parse_num(line, key, value)?,
                "taus" => {
                    cfg.taus = parse_list(value).iter().map(|s| parse_num(line, key, s)).collect::<Result<_, _>>()?;
                }
                "branch" => branch = Some(value.to_string()),
                "eta" => eta = Some(parse_list(value)),
                "xi" => xi = Some(parse_list(value)),
                "emit_forms" => cfg.emit_forms = parse_bool(line, key, value)?,
                "timings" => cfg.timings = parse_bool(line, key, value)?,
                _ => return Err(Error::Config(format!("line {line}: unknown key `{key}`"))),
            }
        }
        cfg.curve = match (branch, eta, xi) {
            (None, None, None) => None,
            (Some(branch), Some(eta), Some(xi)) => Some(CurveInput { branch, eta, xi }),
            _ => return Err(Error::Config("`branch`, `eta` and `xi` must be given together".into())),
        };
        cfg.validate_common()?;
        Ok(cfg)
    }

    /// Checks shared by every command.
    pub fn validate_common(&self) -> Result<(), Error> {
        if let FieldChoice::Prime { p } = self.field {
            PrimeField::new(p)?;
        }
        if self.q == 0 || self.q >= self.r {
            return Err(Error::Config(format!("need 0 < q < r, got q = {}, r = {}", self.q, self.r)));
        }
        Ok(())
    }

    /// Extra constraints for end-to-end pipelines.
    pub fn validate_pipeline(&self) -> Result<u64, Error> {
        let p = match self.field {
            FieldChoice::Prime { p } => p,
            FieldChoice::Rationals => return Err(Error::Config("pipelines run over a prime field".into())),
        };
        if self.d < 2 {
            return Err(Error::Config(format!("pipelines need d >= 2, got {}", self.d)));
        }
        let top = 2 * self.d as usize - 2;
        if self.q < top {
            return Err(Error::Config(format!(
                "q = {} is too small: the base plane through e_0..e_{top} must lie in L0, so q >= 2d-2 = {top}",
                self.q
            )));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be positive".into()));
        }
        Ok(p)
    }

    pub fn dbar(&self) -> MultiDegree {
        self.dbar.clone().unwrap_or_else(|| MultiDegree::single(2 * self.d))
    }
}
