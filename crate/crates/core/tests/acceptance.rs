//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Every numeric target is recomputed here by a route that
//! does not go through the code under test where that is possible.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use polarcover_core::bounds::{constants, gen_fiber_generic, gen_fiber_transcendental, ledger, linear_coefficient_rows, min_r_linear, predonzan_ok, MultiDegree};
use polarcover_core::cover::{parametrize_curve, rank_certificate, specialization_witness, DoubleCover, Target};
use polarcover_core::frames::{restrict_vectors, ProjPoint, Subspace};
use polarcover_core::polar::{contact_analysis, find_point_f_eta_star, phi_decomposition, polars};
use polarcover_core::workbench::{cmd_pipeline, Config, Verdict};
use polarcover_core::field::factorial as factorial_of;
use polarcover_core::{Error, Field, Fp, Frame, Matrix, Poly, PrimeField, RatFn, Rational, Q};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// `n choose k` by the factorial formula, independent of the library's
/// multiplicative loop.
fn naive_binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let fact = |m: u64| (1..=m).fold(BigInt::one(), |a, i| a * i);
    fact(n) / (fact(k) * fact(n - k))
}

/// Number of monomials of degree `deg` in `n` variables, by enumeration.
fn count_monomials(n: usize, deg: u32) -> u64 {
    if n == 1 {
        return 1;
    }
    (0..=deg).map(|e| count_monomials(n - 1, deg - e)).sum()
}

fn criterion_1() -> Outcome {
    let l = constants(3, None, None).map_err(|e| e.to_string())?;
    ensure(l.n == 4, format!("n = {}", l.n))?;
    ensure(l.q_dbar.is_exact() && l.q_dbar.value() == Some(&BigInt::from(25)), format!("q(3) = {}", l.q_dbar))?;
    ensure(l.rho_dprime.value() == Some(&BigInt::from(26)), format!("rho'' = {}", l.rho_dprime))?;
    // smallest r with (r - 26) * 27 >= C(32, 26), by linear scan
    let need = naive_binomial(32, 26);
    let mut r = 27u64;
    while BigInt::from(r - 26) * 27 < need {
        r += 1;
    }
    let rho1 = l.rho1.value().cloned().unwrap_or_default();
    ensure(rho1 == BigInt::from(r), format!("rho1 = {rho1}, scan gives {r}"))?;
    ensure(min_r_linear(26, &MultiDegree::single(6)).ok() == Some(r), "min_r_linear disagrees")?;
    Ok(format!("n = 4, q(3) = 25, rho'' = 26, rho1 = {r} (two evaluations agree)"))
}

fn criterion_2() -> Outcome {
    let cubic = MultiDegree::single(3);
    ensure(min_r_linear(1, &cubic).ok() == Some(3), "min_r_linear(1,(3)) != 3")?;
    ensure(predonzan_ok(2, 1, &cubic).ok() == Some(false), "threshold holds at r = 2")?;
    ensure(predonzan_ok(3, 1, &cubic).ok() == Some(true), "threshold fails at r = 3")?;
    let l = ledger(3, 1, 3, &cubic).map_err(|e| e.to_string())?;
    // (r-q)(q+1) + (monomials of degree 3 in 4 vars) - (in 2 vars) - 1
    let oracle = 2 * 2 + count_monomials(4, 3) as i64 - count_monomials(2, 3) as i64 - 1;
    ensure(l.incidence_dim == BigInt::from(oracle) && oracle == 19, format!("incidence_dim = {}", l.incidence_dim))?;
    Ok("min_r_linear(1,(3)) = 3, fails at r = 2, holds at r = 3, incidence_dim = 19".into())
}

fn random_form<F: Field, R: Rng>(ctx: &F::Context, rng: &mut R, nvars: usize, deg: u32) -> Poly<F> {
    let frame = Frame::indexed("X", nvars);
    let mut g = Poly::zero(ctx, &frame);
    let terms = rng.random_range(1..=12);
    for _ in 0..terms {
        let mut e = vec![0u32; nvars];
        for _ in 0..deg {
            e[rng.random_range(0..nvars)] += 1;
        }
        let c = F::from_i64(ctx, rng.random_range(-50..=50));
        g = &g + &Poly::monomial(ctx, &frame, &e, c);
    }
    g
}

fn polar_identities<F: Field>(ctx: &F::Context, seed: u64, count: usize) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    while checked < count {
        let n = rng.random_range(1..=8u32);
        let nv = rng.random_range(1..=6usize);
        let g = random_form::<F, _>(ctx, &mut rng, nv, n);
        if g.is_zero() {
            continue;
        }
        let eta: Vec<F> = (0..nv).map(|_| F::from_i64(ctx, rng.random_range(-9..=9))).collect();
        let xi: Vec<F> = (0..nv).map(|_| F::from_i64(ctx, rng.random_range(-9..=9))).collect();
        let pe = polars(&g, &eta, n).map_err(|e| e.to_string())?;
        let px = polars(&g, &xi, n).map_err(|e| e.to_string())?;
        // Taylor: g(η + tξ) = Σ t^j / j! Δ^j_η(ξ), against direct substitution
        let line = restrict_vectors(&g, &eta, &xi);
        for j in 0..=n as usize {
            let lhs = line.coeff(j) * factorial_of::<F>(ctx, j as u32);
            let rhs = pe[j].eval(&xi);
            ensure(lhs == rhs, format!("Taylor identity fails for {g} at j = {j}"))?;
        }
        // symmetry: (n-j)! Δ^j_η(ξ) = j! Δ^{n-j}_ξ(η)
        for j in 0..=n {
            let lhs = pe[j as usize].eval(&xi) * factorial_of::<F>(ctx, n - j);
            let rhs = px[(n - j) as usize].eval(&eta) * factorial_of::<F>(ctx, j);
            ensure(lhs == rhs, format!("symmetry fails for {g} at j = {j}"))?;
        }
        checked += 1;
    }
    Ok(checked)
}

fn criterion_3() -> Outcome {
    let p = PrimeField::new(10007).unwrap();
    let a = polar_identities::<Fp>(&p, 3, 100)?;
    let b = polar_identities::<Rational>(&Q, 4, 100)?;
    Ok(format!("{} forms checked ({a} over F_10007, {b} over Q)", a + b))
}

fn parse_list(p: &PrimeField, v: &[String]) -> Vec<Fp> {
    v.iter().map(|s| Fp::parse(p, s).unwrap()).collect()
}

/// Recomputes `w(τ)^2 - G(η + t(τ) ξ)` by polynomial substitution in `τ`.
fn curve_identity(b: &Poly<Fp>, eta: &[Fp], xi: &[Fp], c: &polarcover_core::workbench::report::CurveSection, d: u32) -> bool {
    let p = *b.context();
    let tau = Frame::new(["tau"]);
    let parse = |s: &str| Poly::<Fp>::parse(&p, &tau, s).unwrap();
    let (tn, td, wn, wd) = (parse(&c.t_of_tau.num), parse(&c.t_of_tau.den), parse(&c.w_of_tau.num), parse(&c.w_of_tau.den));
    let images: Vec<Poly<Fp>> = eta.iter().zip(xi).map(|(e, x)| &td.scale(e) + &tn.scale(x)).collect();
    let g = b.substitute(&images).unwrap();
    // w^2 = G(x) with x = (η td + tn ξ)/td:  wn^2 td^{2d} = G(η td + tn ξ) wd^2
    &wn.pow(2) * &td.pow(2 * d) == &g * &wd.pow(2)
}

struct PipelineRun {
    json: String,
    ok: Vec<String>,
    ranks: Vec<String>,
    elapsed: Duration,
}

fn criteria_4_5() -> (Outcome, Outcome, Option<PipelineRun>) {
    let cfg = Config::parse("d = 3\nr = 8\nq = 4\nfield = prime:10007\nseed = 42\ntrials = 100\nemit_forms = true").unwrap();
    let start = Instant::now();
    let rep = match cmd_pipeline(&cfg) {
        Ok(r) => r,
        Err(e) => return (Err(e.to_string()), Err("pipeline did not run".into()), None),
    };
    let elapsed = start.elapsed();
    let p = PrimeField::new(10007).unwrap();
    let frame = Frame::adapted(4, 8);
    let sec = rep.pipeline.as_ref().unwrap();
    let mut c4 = Vec::new();
    let mut c5 = Vec::new();
    let mut unflagged = 0;
    for rec in &sec.records {
        if rec.status != "ok" {
            if rec.flag.is_none() && rec.error.is_none() {
                c4.push(format!("trial {} is neither flagged nor errored", rec.index));
            }
            continue;
        }
        unflagged += 1;
        let b = Poly::<Fp>::parse_text(&p, rec.generation.as_ref().unwrap().branch.as_ref().unwrap()).unwrap();
        if b.frame().names() != frame.names() {
            c4.push(format!("trial {}: branch stored in an unexpected frame", rec.index));
        }
        let contact = rec.contact.as_ref().unwrap();
        let curve = rec.curve.as_ref().unwrap();
        if contact.contact_order != Some(5) {
            c4.push(format!("trial {}: contact order {:?}", rec.index, contact.contact_order));
        }
        let beta = parse_list(&p, contact.beta.as_ref().unwrap());
        if !b.eval(&beta).is_zero() {
            c4.push(format!("trial {}: beta off B", rec.index));
        }
        let eta = parse_list(&p, &contact.eta);
        // the curve is stored with its chart-normalized direction
        let xi = parse_list(&p, &curve.xi);
        if !curve_identity(&b, &eta, &xi, curve, 3) {
            c4.push(format!("trial {}: curve identity fails", rec.index));
        }
        let expected = [("beta", 7), ("alpha", 8), ("omega", 8)];
        for (name, want) in expected {
            match rec.ranks.iter().find(|s| s.which == name) {
                Some(s) if s.rank == want && s.rank_alt == want && s.rank_stacked == want && s.label == "probabilistic" && s.failure_bound > 0.0 && s.failure_bound < 1.0 => {}
                Some(s) => c5.push(format!("trial {}: {name} rank {} (alt {}, stacked {})", rec.index, s.rank, s.rank_alt, s.rank_stacked)),
                None => c5.push(format!("trial {}: no {name} certificate", rec.index)),
            }
        }
    }
    if unflagged < 99 {
        c4.push(format!("only {unflagged}/100 trials unflagged"));
    }
    if elapsed > Duration::from_secs(300) {
        c4.push(format!("took {elapsed:?}"));
    }
    if rep.verdict != Verdict::Pass {
        c4.push("pipeline verdict FAIL".into());
    }
    let bound = sec.rank_summary.iter().map(|s| s.max_failure_bound).fold(0.0, f64::max);
    let run = PipelineRun { json: rep.to_json(), ok: c4.clone(), ranks: c5.clone(), elapsed };
    let r4 = if c4.is_empty() {
        Ok(format!("{unflagged}/100 unflagged, contact order 5, beta on B, curve identity exact"))
    } else {
        Err(c4.join("; "))
    };
    let r5 = if c5.is_empty() {
        Ok(format!("ranks 7/8/8 at all {unflagged} unflagged samples, three elimination orders agree, bound <= {bound:.4}"))
    } else {
        Err(c5.join("; "))
    };
    (r4, r5, Some(run))
}

fn criterion_6() -> Outcome {
    let mut out = Vec::new();
    for (d, want) in [(3u32, 120u64), (4, 5040), (5, 362880)] {
        let w = specialization_witness(d).map_err(|e| e.to_string())?;
        let n = 2 * d as usize;
        let r = n - 1;
        // oracle: Δ^j_η(B*)(e_r) = ∂_Y^j B* at η, restricted to Y = 0
        let mut exps = Vec::new();
        let mut g = w.bstar.clone();
        for j in 1..=n - 2 {
            g = g.diff(r).unwrap();
            let cond = g.partial_eval(&[(r, Rational::integer(0))]);
            ensure(cond.num_terms() == 1, format!("d = {d}: order {j} condition {cond} is not a monomial"))?;
            let (m, _) = cond.terms().next().unwrap();
            let vars: Vec<usize> = (0..=r).filter(|&i| m.exp(i) > 0).collect();
            ensure(vars.len() == 1, format!("d = {d}: order {j} condition is not a pure power"))?;
            exps.push((vars[0], m.exp(vars[0])));
        }
        let mut vars: Vec<usize> = exps.iter().map(|e| e.0).collect();
        vars.sort_unstable();
        vars.dedup();
        ensure(vars.len() == n - 2, format!("d = {d}: conditions not in distinct coordinates"))?;
        let free: Vec<usize> = (0..=n - 2).filter(|i| !vars.contains(i)).collect();
        ensure(free == vec![n - 2], format!("d = {d}: free coordinates {free:?}"))?;
        let mult: u64 = exps.iter().map(|e| e.1 as u64).product();
        let fact: u64 = (1..n as u64).product();
        ensure(mult == want && fact == want, format!("d = {d}: multiplicity {mult}"))?;
        ensure(w.pass() && w.eta_index == n - 2 && w.multiplicity == BigInt::from(want), format!("d = {d}: witness report disagrees"))?;
        out.push(format!("d={d}: e_{} x{want}", n - 2));
    }
    Ok(out.join(", "))
}

fn criterion_7() -> Outcome {
    let (ctx, mut forms) = gen_fiber_transcendental(2, 5, &MultiDegree::single(4)).map_err(|e| e.to_string())?;
    let b = forms.remove(0);
    let coords: Vec<RatFn> = [1, 2, -3, 0, 0, 0].iter().map(|&c| RatFn::from_i64(&ctx, c)).collect();
    let eta = ProjPoint::new(coords).map_err(|e| e.to_string())?;
    let phi = phi_decomposition(&b, &eta, 2).map_err(|e| e.to_string())?;
    ensure(phi.residual_ok, "reconstruction fails")?;
    // coefficient map: square, full rank over Q, and inverted by T^{-1}
    let rows = linear_coefficient_rows(&phi.transformed).ok_or("coefficients are not linear in the symbols")?;
    let n = ctx.symbols().len();
    ensure(rows.len() == n, format!("{} coefficients for {n} symbols", rows.len()))?;
    let m = Matrix::from_rows(&Q, n, rows);
    ensure(m.rank() == n && m.rank_alt() == n, "coefficient map is singular")?;
    let back = phi.transform.inverse().apply_poly(&phi.transformed).map_err(|e| e.to_string())?;
    ensure(back == b, "round trip through T^{-1} does not restore the form")?;
    // Φ1, Φ2 have no monomial in Z1, Z2 alone
    for s in 1..=2 {
        let pure = phi.phi(s).terms().filter(|(m, _)| (3..=5).all(|i| m.exp(i) == 0)).count();
        ensure(pure == 0, format!("Phi_{s} has {pure} pure monomials"))?;
    }
    ensure(phi.pure_tilde_free, "library flag disagrees")?;
    Ok(format!("{n}x{n} coefficient map invertible, round trip exact, Phi_1 and Phi_2 free of pure Z~ monomials"))
}

#[derive(Default)]
struct FuzzTally {
    cases: usize,
    flagged: usize,
    errors: usize,
    panics: usize,
    silent: usize,
}

/// Every degenerate input must end in a flag or an error.
fn fuzz_case(t: &mut FuzzTally, b: &Poly<Fp>, eta: &ProjPoint<Fp>, xi: &ProjPoint<Fp>, tau: Fp) {
    t.cases += 1;
    let res = catch_unwind(AssertUnwindSafe(|| -> Result<bool, Error> {
        let rep = contact_analysis(b, eta, xi)?;
        if !rep.is_flagged() {
            return Ok(false);
        }
        let cover = DoubleCover::new(b.clone())?;
        if parametrize_curve(&cover, &rep).is_ok() {
            return Ok(false);
        }
        for which in Target::ALL {
            if rank_certificate(b, eta, xi, &tau, which).is_ok() {
                return Ok(false);
            }
        }
        Ok(true)
    }));
    match res {
        Err(_) => t.panics += 1,
        Ok(Err(_)) => t.errors += 1,
        Ok(Ok(true)) => t.flagged += 1,
        Ok(Ok(false)) => t.silent += 1,
    }
}

/// Subtracts `G(ξ)/m(ξ) * m` (or the same with an extra `Z0`) so that the
/// top coefficient (resp. the next one) of `G(η + tξ)` vanishes; `η = e_0`
/// keeps the lower polar conditions untouched.
fn kill_coefficient(b: &Poly<Fp>, xi: &[Fp], with_z0: bool, rng: &mut ChaCha8Rng) -> Option<Poly<Fp>> {
    let ctx = *b.context();
    let n = b.nvars();
    let d2 = b.total_degree().unwrap();
    let target = if with_z0 {
        let mut e = vec![0u32; n];
        e[0] = d2 - 1;
        let _ = e;
        // coefficient of t^{2d-1}: terms of degree 1 in Z0
        let z0 = b.coefficients_in(0);
        z0.get(1).map(|c| c.eval(xi)).unwrap_or(Fp::zero(&ctx))
    } else {
        b.eval(xi)
    };
    // a monomial with a Y factor not vanishing at ξ
    let ys: Vec<usize> = (1..n).filter(|&i| !xi[i].is_zero()).collect();
    let y = *ys.iter().rev().find(|&&i| i > (n - 1) / 2)?;
    let other = ys[rng.random_range(0..ys.len())];
    let deg = if with_z0 { d2 - 1 } else { d2 };
    let mut e = vec![0u32; n];
    e[y] += 1;
    e[other] += deg - 1;
    if with_z0 {
        e[0] += 1;
    }
    let mut ex = e.clone();
    ex[0] = 0;
    let mval = Poly::monomial(&ctx, b.frame(), &ex, Fp::one(&ctx)).eval(xi);
    let c = target * mval.inv()?;
    Some(b - &Poly::monomial(&ctx, b.frame(), &e, c))
}

fn criterion_8(first: Option<&PipelineRun>) -> Outcome {
    // determinism
    let cfg = Config::parse("d = 3\nr = 8\nq = 4\nfield = prime:10007\nseed = 42\ntrials = 100\nemit_forms = true").unwrap();
    let again = cmd_pipeline(&cfg).map_err(|e| e.to_string())?.to_json();
    let first = first.ok_or("criterion 4 run missing")?;
    ensure(first.json == again, "same configuration produced different reports")?;
    let small = Config::parse("d = 2\nr = 5\nq = 2\nseed = 77\ntrials = 10").unwrap();
    ensure(
        cmd_pipeline(&small).unwrap().to_json() == cmd_pipeline(&small).unwrap().to_json(),
        "small configuration is not deterministic",
    )?;
    // fuzzing degenerate inputs
    let p = PrimeField::new(10007).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut t = FuzzTally::default();
    let shapes = [(2u32, 5usize, 2usize), (2, 6, 3), (3, 8, 4)];
    let mut round = 0;
    while t.cases < 10_000 {
        let (d, r, q) = shapes[if round % 10 == 9 { 2 } else { round % 2 }];
        round += 1;
        let top = 2 * d as usize - 2;
        let plane = Subspace::<Fp>::coordinate(&p, r, &(0..=q).collect::<Vec<_>>()).unwrap();
        let b = gen_fiber_generic(&plane, &MultiDegree::single(2 * d), &mut rng).unwrap().remove(0);
        let e0 = ProjPoint::<Fp>::unit(&p, r, 0);
        let tau = Fp::random(&p, &mut rng);
        // η = ξ
        let mut eta_c = vec![Fp::zero(&p); r + 1];
        eta_c[0] = Fp::one(&p);
        for c in eta_c.iter_mut().take(top + 1).skip(1) {
            *c = Fp::random(&p, &mut rng);
        }
        let eta = ProjPoint::new(eta_c).unwrap();
        fuzz_case(&mut t, &b, &eta, &eta, tau);
        // ξ in L0*: the line stays inside L0 ⊂ B
        for _ in 0..8 {
            let mut x = vec![Fp::zero(&p); r + 1];
            for c in x.iter_mut().take(q + 1).skip(1) {
                *c = Fp::random(&p, &mut rng);
            }
            if let Ok(xi) = ProjPoint::new(x) {
                fuzz_case(&mut t, &b, &eta, &xi, tau);
            }
        }
        // ξ on the polars at e_0, then B(ξ) = 0 or a = 0 forced
        let Ok(phi) = phi_decomposition(&b, &e0, q) else { continue };
        let Ok((xi, _)) = find_point_f_eta_star(&phi, &mut rng, 16) else { continue };
        for with_z0 in [false, true] {
            if let Some(b2) = kill_coefficient(&b, xi.coords(), with_z0, &mut rng) {
                fuzz_case(&mut t, &b2, &e0, &xi, tau);
            }
        }
        // ξ on B but off the polars
        let line = restrict_vectors(&b, xi.coords(), eta.coords());
        if let Some((s, _)) = Fp::roots(&line).into_iter().next() {
            let pt: Vec<Fp> = xi.coords().iter().zip(eta.coords()).map(|(x, e)| *x + s * e).collect();
            if let Ok(on_b) = ProjPoint::new(pt) {
                fuzz_case(&mut t, &b, &eta, &on_b, tau);
            }
        }
        // random points near misses: a random direction in the hyperplane
        let rnd: Vec<Fp> = (0..=r).map(|i| if i == 0 { Fp::zero(&p) } else { Fp::random(&p, &mut rng) }).collect();
        if let Ok(xi) = ProjPoint::new(rnd) {
            fuzz_case(&mut t, &b, &eta, &xi, tau);
        }
    }
    ensure(t.panics == 0, format!("{} panics", t.panics))?;
    ensure(t.silent == 0, format!("{} degenerate inputs passed silently", t.silent))?;
    Ok(format!(
        "byte-identical reports; {} fuzzed inputs: {} flagged, {} errors, 0 panics, 0 silent passes",
        t.cases, t.flagged, t.errors
    ))
}

fn report(n: usize, name: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
    line(n, name, limit, start.elapsed(), res)
}

fn line(n: usize, name: &str, limit: Duration, elapsed: Duration, res: Outcome) -> bool {
    let res = match res {
        Ok(_) if elapsed > limit => Err(format!("took {elapsed:.1?}, limit {limit:?}")),
        other => other,
    };
    match &res {
        Ok(msg) => println!("criterion {n} [{name}]: PASS - {msg} ({elapsed:.2?})"),
        Err(msg) => println!("criterion {n} [{name}]: FAIL - {msg} ({elapsed:.2?})"),
    }
    res.is_ok()
}

fn main() {
    let mut all = true;
    all &= report(1, "constants", Duration::from_secs(1), criterion_1);
    all &= report(2, "linear-space threshold", Duration::from_secs(1), criterion_2);
    all &= report(3, "polar identities", Duration::from_secs(30), criterion_3);
    let start = Instant::now();
    let (r4, r5, run) = catch_unwind(criteria_4_5).unwrap_or_else(|_| (Err("panicked".into()), Err("panicked".into()), None));
    let elapsed = run.as_ref().map(|r| r.elapsed).unwrap_or(start.elapsed());
    if let Some(run) = &run {
        debug_assert_eq!(run.ok.is_empty(), r4.is_ok());
        debug_assert_eq!(run.ranks.is_empty(), r5.is_ok());
    }
    all &= line(4, "contact and curve", Duration::from_secs(300), elapsed, r4);
    all &= line(5, "rank certificates", Duration::from_secs(300), elapsed, r5);
    all &= report(6, "specialization witness", Duration::from_secs(10), criterion_6);
    all &= report(7, "transcendental extraction", Duration::from_secs(10), criterion_7);
    all &= report(8, "determinism and robustness", Duration::from_secs(600), || criterion_8(run.as_ref()));
    if !all {
        std::process::exit(1);
    }
}
