//! Seeded end-to-end runs: configuration, the individual commands and their
//! JSON reports.

pub mod config;
pub mod report;
pub mod seed;

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use crate::bounds::{constants, gen_fiber_generic, ledger, MultiDegree};
use crate::cover::{on_cover, omega_map, parametrize_curve, rank_certificate, specialization_witness, DoubleCover, Target};
use crate::error::Error;
use crate::field::{Field, Fp, PrimeField, Rational, Q};
use crate::frames::{adapt_frame, projective_frame, ProjPoint, Subspace};
use crate::linalg::Matrix;
use crate::polar::{contact_analysis, find_point_f_eta_star, phi_decomposition};
use crate::poly::Poly;

pub use config::{Config, CurveInput, FieldChoice};
use report::*;
pub use report::{Report, Verdict};
pub use seed::SeedTree;

/// Fraction of unflagged pipeline trials required for a pass.
pub const REQUIRED_UNFLAGGED: f64 = 0.99;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Bounds,
    Pipeline,
    Witness,
    Param,
    Selftest,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Bounds => "bounds",
            Command::Pipeline => "pipeline",
            Command::Witness => "witness",
            Command::Param => "param",
            Command::Selftest => "selftest",
        }
    }
}

/// Runs a command. Configuration problems are returned as errors (exit code
/// 2); everything else is recorded in the report.
pub fn run(command: Command, cfg: &Config) -> Result<Report, Error> {
    let start = Instant::now();
    let mut report = match command {
        Command::Bounds => cmd_bounds(cfg)?,
        Command::Pipeline => cmd_pipeline(cfg)?,
        Command::Witness => cmd_witness(cfg)?,
        Command::Param => cmd_param(cfg)?,
        Command::Selftest => cmd_selftest(cfg)?,
    };
    if cfg.timings {
        report.timings = Some([("total_ms".to_string(), start.elapsed().as_millis())].into_iter().collect());
    }
    Ok(report)
}

pub fn cmd_bounds(cfg: &Config) -> Result<Report, Error> {
    cfg.validate_common()?;
    let mut report = Report::new("bounds", cfg);
    report.constants = Some(match constants(cfg.d as u64, cfg.c_external, cfg.q_external) {
        Ok(l) => ConstantsSection { status: "ok".into(), ledger: Some(l), refusal: None },
        Err(e) if cfg.d < 3 => ConstantsSection { status: "refused".into(), ledger: None, refusal: Some(ErrorEntry::new("constants", &e)) },
        Err(e) => return Err(e),
    });
    let dbar = cfg.dbar();
    let b = ledger(cfg.r as u64, cfg.q as u64, cfg.d as u64, &dbar).map_err(|e| Error::Config(e.to_string()))?;
    let ok = b.trdeg_identity_ok;
    report.bounds = Some(b);
    report.verdict = Verdict::from_bool(ok);
    Ok(report)
}

pub fn cmd_witness(cfg: &Config) -> Result<Report, Error> {
    let w = specialization_witness(cfg.d)?;
    let mut report = Report::new("witness", cfg);
    report.verdict = Verdict::from_bool(w.pass());
    report.witness = Some(WitnessSection::new(&w));
    Ok(report)
}

enum Attempt {
    Done(Box<TrialRecord>),
    /// Error worth retrying with a fresh seed.
    Retry(Error),
}

fn retryable(e: &Error) -> bool {
    matches!(e, Error::Sampling { .. } | Error::Resample(_) | Error::InvalidSubspace(_) | Error::Singular)
}

fn nonzero<R: Rng + ?Sized>(ctx: &PrimeField, rng: &mut R) -> Fp {
    loop {
        let x = Fp::random(ctx, rng);
        if !x.is_zero() {
            return x;
        }
    }
}

fn empty_record(index: usize, tree: &SeedTree) -> TrialRecord {
    TrialRecord {
        index,
        seed: tree.seed().to_string(),
        attempts: 0,
        status: "error".into(),
        flag: None,
        error: None,
        retries: Vec::new(),
        generation: None,
        phi: None,
        search: None,
        contact: None,
        curve: None,
        omega_consistent: None,
        ranks: Vec::new(),
        pass: false,
    }
}

/// One attempt at a pipeline trial.
fn pipeline_attempt(cfg: &Config, ctx: &PrimeField, index: usize, tree: &SeedTree) -> Attempt {
    let mut rec = empty_record(index, tree);
    match pipeline_stages(cfg, ctx, tree, &mut rec) {
        Ok(()) => Attempt::Done(Box::new(rec)),
        Err(e) if retryable(&e) => Attempt::Retry(e),
        Err(e) => {
            rec.status = "error".into();
            rec.error = Some(ErrorEntry::new("pipeline", &e));
            Attempt::Done(Box::new(rec))
        }
    }
}

fn pipeline_stages(cfg: &Config, ctx: &PrimeField, tree: &SeedTree, rec: &mut TrialRecord) -> Result<(), Error> {
    let (d, r, q) = (cfg.d, cfg.r, cfg.q);
    let top = 2 * d as usize - 2;
    // L0: a random q-plane, moved to {Y = 0}
    let mut rng = tree.child(seed::stage::FRAME).rng();
    let rows: Vec<Vec<Fp>> = (0..=q).map(|_| (0..=r).map(|_| Fp::random(ctx, &mut rng)).collect()).collect();
    let l0 = Subspace::new(Matrix::from_rows(ctx, r + 1, rows))?;
    let t = adapt_frame(&l0, q, r)?;
    let plane = Subspace::<Fp>::coordinate(ctx, r, &(0..=q).collect::<Vec<_>>())?;
    let frame_adapted = plane.contains_subspace(&l0.transform(&t));
    let mut rng = tree.child(seed::stage::FORM).rng();
    let b = gen_fiber_generic(&plane, &MultiDegree::single(2 * d), &mut rng)?.remove(0);
    let contains_l0 = plane.annihilates(&b);
    rec.generation = Some(GenerationSection {
        l0_basis: l0.basis().to_strings(),
        frame_adapted,
        terms: b.num_terms(),
        contains_l0,
        branch: cfg.emit_forms.then(|| b.to_text()),
    });
    // η on the plane through e_0..e_{2d-2}
    let mut rng = tree.child(seed::stage::BASE_POINT).rng();
    let params: Vec<Fp> = (0..top).map(|_| Fp::random(ctx, &mut rng)).collect();
    let eta = crate::cover::eta_from_params(ctx, r, &params)?;
    let phi = phi_decomposition(&b, &eta, q)?;
    rec.phi = Some(PhiSection {
        residual_ok: phi.residual_ok,
        pure_tilde_free: phi.pure_tilde_free,
        degrees: phi.phis.iter().map(|p| p.homogeneous_degree()).collect(),
    });
    let mut rng = tree.child(seed::stage::SEARCH).rng();
    let (xi, stats) = find_point_f_eta_star(&phi, &mut rng, cfg.search_trials)?;
    rec.search = Some(stats);
    let contact = contact_analysis(&b, &eta, &xi)?;
    let beta_on_b = contact.beta.as_ref().map(|x| b.eval(x.coords()).is_zero());
    rec.contact = Some(ContactSection::new(&contact, beta_on_b));
    if let Some(flag) = contact.flags.name() {
        rec.status = "flagged".into();
        rec.flag = Some(flag.to_string());
        return Ok(());
    }
    let cover = DoubleCover::new(b.clone())?;
    let cp = parametrize_curve(&cover, &contact)?;
    let mut rng = tree.child(seed::stage::TAU).rng();
    let tau = loop {
        let x = nonzero(ctx, &mut rng);
        if x.square() != cp.c {
            break x;
        }
    };
    let pt = cp.point(&tau)?;
    let pt_ok = on_cover(&cover, &pt)?;
    let omega = omega_map(&b, &params, &xi, &tau)?;
    rec.omega_consistent = Some(omega == pt);
    rec.curve = Some(CurveSection::new(&cp, vec![CoverPointSection::new(&tau, &pt, pt_ok)]));
    let mut rng = tree.child(seed::stage::CERT).rng();
    let t_sample = nonzero(ctx, &mut rng);
    for which in Target::ALL {
        let extra = if which == Target::Alpha { t_sample } else { tau };
        let cert = rank_certificate(&b, &eta, &xi, &extra, which)?;
        rec.ranks.push(RankSection::new(&cert));
    }
    rec.status = "ok".into();
    rec.pass = frame_adapted
        && contains_l0
        && phi.residual_ok
        && phi.pure_tilde_free
        && contact.contact_order == Some(2 * d - 1)
        && beta_on_b == Some(true)
        && cp.identity_ok
        && cp.on_cover_ok
        && pt_ok
        && omega == pt
        && rec.ranks.iter().all(|r| r.pass);
    Ok(())
}

/// A pipeline trial with bounded retries on sampling failures.
pub fn pipeline_trial(cfg: &Config, ctx: &PrimeField, index: usize) -> TrialRecord {
    let trial = SeedTree::new(cfg.seed).child(seed::stage::PIPELINE).child(index as u64);
    let mut log = Vec::new();
    for attempt in 0..=cfg.retries {
        let tree = trial.child(attempt as u64);
        match pipeline_attempt(cfg, ctx, index, &tree) {
            Attempt::Done(mut rec) => {
                rec.attempts = attempt + 1;
                rec.retries = log;
                return *rec;
            }
            Attempt::Retry(e) => log.push(ErrorEntry::new(&format!("attempt {attempt}"), &e)),
        }
    }
    let mut rec = empty_record(index, &trial);
    rec.attempts = cfg.retries + 1;
    let last = log.last().map(|e| e.message.clone()).unwrap_or_default();
    rec.error = Some(ErrorEntry::new(
        "pipeline",
        &Error::Sampling { trials: cfg.retries + 1, msg: format!("retries exhausted; last failure: {last}") },
    ));
    rec.retries = log;
    rec
}

pub fn cmd_pipeline(cfg: &Config) -> Result<Report, Error> {
    cfg.validate_common()?;
    let p = cfg.validate_pipeline()?;
    let ctx = PrimeField::new(p)?;
    let records: Vec<TrialRecord> = (0..cfg.trials).into_par_iter().map(|i| pipeline_trial(cfg, &ctx, i)).collect();
    let mut report = Report::new("pipeline", cfg);
    for rec in &records {
        if let Some(e) = &rec.error {
            report.errors.push(ErrorEntry { stage: format!("trial {}", rec.index), ..e.clone() });
        }
    }
    let unflagged = records.iter().filter(|r| r.status == "ok").count();
    let flagged = records.iter().filter(|r| r.status == "flagged").count();
    let passed = records.iter().filter(|r| r.pass).count();
    let fraction = unflagged as f64 / cfg.trials as f64;
    let rank_summary = Target::ALL
        .iter()
        .map(|w| {
            let ranks: Vec<&RankSection> = records.iter().flat_map(|r| r.ranks.iter()).filter(|s| s.which == w.name()).collect();
            RankSummary {
                which: w.name().to_string(),
                expected: if *w == Target::Beta { cfg.r - 1 } else { cfg.r },
                min: ranks.iter().map(|s| s.rank).min(),
                max: ranks.iter().map(|s| s.rank).max(),
                full: ranks.iter().filter(|s| s.pass).count(),
                max_failure_bound: ranks.iter().map(|s| s.failure_bound).fold(0.0, f64::max),
            }
        })
        .collect();
    let ok = report.errors.is_empty() && fraction >= REQUIRED_UNFLAGGED && passed == unflagged;
    report.pipeline = Some(PipelineSection {
        p,
        trials: cfg.trials,
        unflagged,
        flagged,
        errors: report.errors.len(),
        passed,
        unflagged_fraction: fraction,
        required_fraction: REQUIRED_UNFLAGGED,
        contact_order_expected: 2 * cfg.d - 1,
        rank_summary,
        certificate_note: format!(
            "{CERTIFICATE_LABEL}: a full rank at a random point over F_p is wrong with probability at most sz_degree/p"
        ),
        records,
    });
    report.verdict = Verdict::from_bool(ok);
    Ok(report)
}

fn parse_point<F: Field>(ctx: &F::Context, coords: &[String]) -> Result<ProjPoint<F>, Error> {
    let v = coords
        .iter()
        .map(|s| F::parse(ctx, s).map_err(|m| Error::Config(format!("bad coordinate `{s}`: {m}"))))
        .collect::<Result<Vec<_>, _>>()?;
    ProjPoint::new(v).map_err(|e| Error::Config(e.to_string()))
}

fn param_section<F: Field>(ctx: &F::Context, field: &FieldChoice, input: &CurveInput, taus: &[i64]) -> Result<ParamSection, Error> {
    let eta = parse_point::<F>(ctx, &input.eta)?;
    let xi = parse_point::<F>(ctx, &input.xi)?;
    let b = if input.branch.trim_start().starts_with("vars:") {
        Poly::parse_text(ctx, &input.branch.replace(';', "\n"))
    } else {
        Poly::parse(ctx, &projective_frame(eta.ambient()), &input.branch)
    }
    .map_err(|e| Error::Config(format!("branch form: {e}")))?;
    let cover = DoubleCover::new(b.clone()).map_err(|e| Error::Config(e.to_string()))?;
    let contact = contact_analysis(&b, &eta, &xi).map_err(|e| Error::Config(e.to_string()))?;
    let beta_on_b = contact.beta.as_ref().map(|x| b.eval(x.coords()).is_zero());
    let mut section = ParamSection {
        field: field.to_string(),
        frame: b.frame().names().to_vec(),
        branch: b.to_string(),
        contact: ContactSection::new(&contact, beta_on_b),
        curve: None,
        pass: false,
    };
    if contact.is_flagged() {
        return Ok(section);
    }
    let cp = parametrize_curve(&cover, &contact)?;
    let mut samples = Vec::new();
    for &t in taus {
        let tau = F::from_i64(ctx, t);
        if let Ok(pt) = cp.point(&tau) {
            let ok = on_cover(&cover, &pt)?;
            samples.push(CoverPointSection::new(&tau, &pt, ok));
        }
    }
    section.pass = cp.identity_ok && cp.on_cover_ok && samples.iter().all(|s| s.on_cover) && beta_on_b == Some(true);
    section.curve = Some(CurveSection::new(&cp, samples));
    Ok(section)
}

/// The curve over one contact line: either the explicit problem in the
/// configuration or the first pipeline trial.
pub fn cmd_param(cfg: &Config) -> Result<Report, Error> {
    cfg.validate_common()?;
    let mut report = Report::new("param", cfg);
    let section = match (&cfg.curve, cfg.field) {
        (Some(input), FieldChoice::Rationals) => param_section::<Rational>(&Q, &cfg.field, input, &cfg.taus),
        (Some(input), FieldChoice::Prime { p }) => param_section::<Fp>(&PrimeField::new(p)?, &cfg.field, input, &cfg.taus),
        (None, _) => {
            let p = cfg.validate_pipeline()?;
            let ctx = PrimeField::new(p)?;
            let single = Config { trials: 1, emit_forms: true, ..cfg.clone() };
            let rec = pipeline_trial(&single, &ctx, 0);
            if let Some(e) = &rec.error {
                report.errors.push(e.clone());
            }
            match (rec.contact, rec.generation) {
                (Some(contact), Some(generation)) => Ok(ParamSection {
                    field: cfg.field.to_string(),
                    frame: crate::poly::Frame::adapted(cfg.q, cfg.r).names().to_vec(),
                    branch: generation.branch.unwrap_or_default(),
                    contact,
                    pass: rec.pass,
                    curve: rec.curve,
                }),
                _ => {
                    report.verdict = Verdict::Fail;
                    return Ok(report);
                }
            }
        }
    };
    match section {
        Ok(s) => {
            report.verdict = Verdict::from_bool(s.pass && report.errors.is_empty());
            report.param = Some(s);
        }
        Err(e @ Error::Config(_)) => return Err(e),
        Err(e) => report.errors.push(ErrorEntry::new("param", &e)),
    }
    Ok(report)
}

fn check(name: &str, result: Result<(bool, String), Error>) -> CheckEntry {
    match result {
        Ok((pass, detail)) => CheckEntry { name: name.into(), pass, detail },
        Err(e) => CheckEntry { name: name.into(), pass: false, detail: e.to_string() },
    }
}

/// Small fixed problems exercising every layer.
pub fn cmd_selftest(cfg: &Config) -> Result<Report, Error> {
    let mut checks = Vec::new();
    checks.push(check("constants-d3", (|| {
        let l = constants(3, None, None)?;
        let ok = l.q_dbar.value() == Some(&25.into()) && l.rho_dprime.value() == Some(&26.into());
        Ok((ok, format!("q = {}, rho'' = {}, rho1 = {}", l.q_dbar, l.rho_dprime, l.rho1)))
    })()));
    checks.push(check("witness-d3", (|| {
        let w = specialization_witness(3)?;
        Ok((w.pass(), format!("multiplicity {}", w.multiplicity)))
    })()));
    checks.push(check("quartic-curve", (|| {
        let input = CurveInput {
            branch: "X1^4 - X0*X1^3 + X0^3*X2".into(),
            eta: vec!["1".into(), "0".into(), "0".into()],
            xi: vec!["0".into(), "1".into(), "0".into()],
        };
        let s = param_section::<Rational>(&Q, &FieldChoice::Rationals, &input, &[2, 3])?;
        let t = s.curve.as_ref().map(|c| c.t_of_tau.clone());
        Ok((s.pass, format!("t(tau) = {t:?}")))
    })()));
    checks.push(check("small-pipeline", (|| {
        let small = Config { d: 2, r: 5, q: 2, field: FieldChoice::Prime { p: 10007 }, trials: 4, ..cfg.clone() };
        let rep = cmd_pipeline(&small)?;
        let s = rep.pipeline.as_ref().unwrap();
        Ok((rep.verdict == Verdict::Pass, format!("{}/{} trials passed", s.passed, s.trials)))
    })()));
    let mut report = Report::new("selftest", cfg);
    report.verdict = Verdict::from_bool(checks.iter().all(|c| c.pass));
    report.selftest = Some(checks);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_report_for_cubic_surfaces() {
        let cfg = Config::parse("d = 3\nr = 3\nq = 1\ndbar = 3").unwrap();
        let rep = cmd_bounds(&cfg).unwrap();
        assert_eq!(rep.bounds.as_ref().unwrap().incidence_dim, 19.into());
        assert_eq!(rep.constants.as_ref().unwrap().status, "ok");
        let json = rep.to_json();
        assert!(json.contains("\"incidence_dim\": \"19\""));
        assert_eq!(Report::from_json(&json).unwrap(), rep);
    }

    #[test]
    fn bounds_refuse_theorem_constants_below_three() {
        let cfg = Config::parse("d = 2\nr = 5\nq = 2").unwrap();
        let rep = cmd_bounds(&cfg).unwrap();
        assert_eq!(rep.constants.as_ref().unwrap().status, "refused");
        assert!(rep.bounds.is_some());
    }

    #[test]
    fn small_pipeline_passes_and_is_deterministic() {
        let cfg = Config::parse("d = 2\nr = 5\nq = 2\nseed = 5\ntrials = 6").unwrap();
        let a = cmd_pipeline(&cfg).unwrap();
        let b = cmd_pipeline(&cfg).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.verdict, Verdict::Pass, "{}", a.to_json());
        for rec in &a.pipeline.as_ref().unwrap().records {
            if rec.status == "ok" {
                let ranks: Vec<usize> = rec.ranks.iter().map(|r| r.rank).collect();
                assert_eq!(ranks, vec![4, 5, 5]);
            }
        }
    }

    #[test]
    fn adding_trials_keeps_earlier_ones() {
        let few = Config::parse("d = 2\nr = 5\nq = 2\nseed = 9\ntrials = 2").unwrap();
        let more = Config { trials: 4, ..few.clone() };
        let a = cmd_pipeline(&few).unwrap().pipeline.unwrap().records;
        let b = cmd_pipeline(&more).unwrap().pipeline.unwrap().records;
        assert_eq!(a[..], b[..2]);
    }

    #[test]
    fn param_on_the_quartic_example() {
        let cfg = Config::parse("field = rationals\nbranch = X1^4 - X0*X1^3 + X0^3*X2\neta = 1,0,0\nxi = 0,1,0").unwrap();
        let rep = cmd_param(&cfg).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
        let c = rep.param.unwrap().curve.unwrap();
        assert_eq!(c.t_of_tau.num, "1");
        assert_eq!(c.t_of_tau.den, "-tau^2 + 1");
    }

    #[test]
    fn witness_and_selftest() {
        let rep = cmd_witness(&Config { d: 4, ..Config::default() }).unwrap();
        assert_eq!(rep.witness.unwrap().multiplicity, 5040.into());
        assert!(matches!(cmd_witness(&Config { d: 9, ..Config::default() }), Err(Error::Config(_))));
        assert_eq!(cmd_selftest(&Config::default()).unwrap().verdict, Verdict::Pass);
    }
}
