use std::collections::BTreeSet;

use polarcover_core::bounds::{gen_fiber_generic, MultiDegree};
use polarcover_core::cover::{on_cover, parametrize_curve, rank_certificate, DoubleCover, Target};
use polarcover_core::polar::{contact_analysis, find_point_f_eta_star, phi_decomposition};
use polarcover_core::{Field, Fp, Frame, Matrix, Poly, PrimeField, ProjPoint, Subspace};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Sample {
    b: Poly<Fp>,
    eta: ProjPoint<Fp>,
    xi: ProjPoint<Fp>,
}

/// A branch form through `L0 = {Y = 0}`, a base point `(1, *, .., *, 0, ..)`
/// and an unflagged direction on its polar system.
fn sample(ctx: &PrimeField, d: u32, r: usize, q: usize, seed: u64) -> Sample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = 2 * d as usize - 2;
    let plane = Subspace::<Fp>::coordinate(ctx, r, &(0..=q).collect::<Vec<_>>()).unwrap();
    loop {
        let b = gen_fiber_generic(&plane, &MultiDegree::single(2 * d), &mut rng).unwrap().remove(0);
        let mut c = vec![ctx.element(0); r + 1];
        c[0] = ctx.element(1);
        for x in c.iter_mut().take(top + 1).skip(1) {
            *x = Fp::random(ctx, &mut rng);
        }
        let eta = ProjPoint::new(c).unwrap();
        let phi = phi_decomposition(&b, &eta, q).unwrap();
        let Ok((xi, _)) = find_point_f_eta_star(&phi, &mut rng, 64) else { continue };
        if contact_analysis(&b, &eta, &xi).is_ok_and(|rep| !rep.is_flagged()) {
            return Sample { b, eta, xi };
        }
    }
}

/// `G(η + tξ)` as a polynomial in `t`, by plain substitution.
fn along_line(g: &Poly<Fp>, eta: &[Fp], xi: &[Fp]) -> Vec<Fp> {
    let ctx = *g.context();
    let tf = Frame::new(["t"]);
    let t = Poly::var(&ctx, &tf, 0);
    let images: Vec<Poly<Fp>> = eta.iter().zip(xi).map(|(e, x)| &Poly::constant(&ctx, &tf, *e) + &t.scale(x)).collect();
    let line = g.substitute(&images).unwrap();
    let deg = g.total_degree().unwrap_or(0) as usize;
    (0..=deg).map(|k| line.coeff(&[k as u32])).collect()
}

/// Derivatives of the line coefficients with respect to the parameters
/// `η_1..η_top`, the free `ξ_i` and one extra slot, from
/// `∂_{η_i} G(η+tξ) = (∂_i G)(η+tξ)` and `∂_{ξ_i} G(η+tξ) = t (∂_i G)(η+tξ)`.
struct LineJacobian {
    coeffs: Vec<Fp>,
    grads: Vec<Vec<Fp>>,
    xi_slot: Vec<Option<usize>>,
    np: usize,
}

fn line_jacobian(b: &Poly<Fp>, eta: &[Fp], xi: &[Fp], top: usize) -> LineJacobian {
    let ctx = *b.context();
    let r = b.nvars() - 1;
    let n = b.total_degree().unwrap() as usize;
    let np = top + r;
    let pivot = xi.iter().position(|x| !x.is_zero()).unwrap();
    let mut xi_slot = vec![None; r + 1];
    let mut next = top;
    for (i, s) in xi_slot.iter_mut().enumerate().skip(1) {
        if i != pivot {
            *s = Some(next);
            next += 1;
        }
    }
    let coeffs = along_line(b, eta, xi);
    let mut grads = vec![vec![ctx.element(0); np]; n + 1];
    for i in 1..=r {
        let di = along_line(&b.diff(i).unwrap(), eta, xi);
        for s in 0..=n {
            if i <= top {
                grads[s][i - 1] = grads[s][i - 1] + di.get(s).copied().unwrap_or(ctx.element(0));
            }
            if let (Some(slot), true) = (xi_slot[i], s >= 1) {
                grads[s][slot] = grads[s][slot] + di.get(s - 1).copied().unwrap_or(ctx.element(0));
            }
        }
    }
    LineJacobian { coeffs, grads, xi_slot, np }
}

fn fact(ctx: &PrimeField, s: usize) -> Fp {
    (1..=s as u64).fold(ctx.element(1), |a, k| a * ctx.element(k))
}

fn axpy(a: &[Fp], c: Fp, b: &[Fp]) -> Vec<Fp> {
    a.iter().zip(b).map(|(x, y)| *x + c * *y).collect()
}

fn scaled(c: Fp, v: &[Fp]) -> Vec<Fp> {
    v.iter().map(|x| c * *x).collect()
}

/// Rows of the target map's differential, built by the chain rule.
fn target_rows(lj: &LineJacobian, eta: &[Fp], xi: &[Fp], d: u32, extra: Fp, which: Target, ctx: &PrimeField) -> Vec<Vec<Fp>> {
    let n = 2 * d as usize;
    let r = eta.len() - 1;
    let top = n - 2;
    let zero = vec![ctx.element(0); lj.np];
    let unit = |k: Option<usize>| {
        let mut v = zero.clone();
        if let Some(k) = k {
            v[k] = ctx.element(1);
        }
        v
    };
    let deta = |i: usize| unit((1..=top).contains(&i).then(|| i - 1));
    let dxi = |i: usize| unit(lj.xi_slot[i]);
    let (a, c) = (lj.coeffs[n - 1], lj.coeffs[n]);
    let (da, dc) = (&lj.grads[n - 1], &lj.grads[n]);
    // t and its differential
    let (t, dt) = match which {
        Target::Beta => {
            let ci = c.inv().unwrap();
            let t = -(a * ci);
            // d(-a/c) = -(da c - a dc) / c^2
            let dt = scaled(-(ci * ci), &axpy(&scaled(c, da), -a, dc));
            (t, dt)
        }
        Target::Alpha => (extra, unit(Some(lj.np - 1))),
        Target::Omega => {
            let den = c - extra * extra;
            let di = den.inv().unwrap();
            let mut dden = dc.clone();
            dden[lj.np - 1] = dden[lj.np - 1] - ctx.element(2) * extra;
            let t = -(a * di);
            let dt = scaled(-(di * di), &axpy(&scaled(den, da), -a, &dden));
            (t, dt)
        }
    };
    let mut rows: Vec<Vec<Fp>> = (1..=r).map(|i| axpy(&axpy(&deta(i), t, &dxi(i)), xi[i], &dt)).collect();
    if which == Target::Omega {
        // w = τ t^d
        let mut dw = scaled(extra * ctx.element(d as u64) * t.pow(d as u64 - 1), &dt);
        dw[lj.np - 1] = dw[lj.np - 1] + t.pow(d as u64);
        rows.push(dw);
    }
    rows
}

fn check_against_oracle(d: u32, r: usize, q: usize, seeds: std::ops::Range<u64>) {
    let ctx = PrimeField::new(10007).unwrap();
    let top = 2 * d as usize - 2;
    for seed in seeds {
        let s = sample(&ctx, d, r, q, seed);
        let (eta, xi) = (s.eta.coords(), s.xi.coords());
        let lj = line_jacobian(&s.b, eta, xi, top);
        let c_rows: Vec<Vec<Fp>> = (1..=top).map(|k| scaled(fact(&ctx, k), &lj.grads[k])).collect();
        let cmat = Matrix::from_rows(&ctx, lj.np, c_rows);
        let kernel = cmat.kernel_matrix();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
        for which in Target::ALL {
            let extra = loop {
                let e = Fp::random(&ctx, &mut rng);
                if e * e != lj.coeffs[2 * d as usize] {
                    break e;
                }
            };
            let cert = rank_certificate(&s.b, &s.eta, &s.xi, &extra, which).unwrap();
            let jrows = target_rows(&lj, eta, xi, d, extra, which, &ctx);
            let jmat = Matrix::from_rows(&ctx, lj.np, jrows);
            let oracle = jmat.mul(&kernel);
            assert_eq!(cert.constraint_rank, cmat.rank(), "seed {seed}");
            assert!(cert.jacobian == oracle, "seed {seed}: {} Jacobian differs from the chain-rule oracle", which.name());
            let stacked = cmat.vstack(&jmat).rank() - cmat.rank();
            assert_eq!(cert.rank, stacked, "seed {seed}: {}", which.name());
            assert!(cert.pass(), "seed {seed}: {} rank {} != {}", which.name(), cert.rank, cert.expected);
        }
    }
}

#[test]
fn rank_certificates_match_chain_rule_d2() {
    check_against_oracle(2, 5, 2, 0..6);
}

#[test]
fn rank_certificates_match_chain_rule_d3() {
    check_against_oracle(3, 8, 4, 0..3);
}

#[test]
fn curve_points_lie_on_the_cover() {
    let ctx = PrimeField::new(10007).unwrap();
    for (d, r, q) in [(2, 5, 2), (3, 8, 4)] {
        let s = sample(&ctx, d, r, q, 11);
        let rep = contact_analysis(&s.b, &s.eta, &s.xi).unwrap();
        let cover = DoubleCover::new(s.b.clone()).unwrap();
        let cp = parametrize_curve(&cover, &rep).unwrap();
        assert!(cp.identity_ok && cp.on_cover_ok);
        let mut hits = 0;
        for v in 0..200u64 {
            if let Ok(pt) = cp.point(&ctx.element(v)) {
                assert!(on_cover(&cover, &pt).unwrap(), "tau = {v}");
                hits += 1;
            }
        }
        assert!(hits >= 195);
    }
}

fn normalize(v: &[Fp]) -> Vec<u64> {
    let p = v.iter().find(|x| !x.is_zero()).unwrap().inv().unwrap();
    v.iter().map(|x| (*x * p).value()).collect()
}

/// Every point the search returns over F_7 belongs to the set found by
/// enumerating the whole hyperplane `Z0 = 0`.
#[test]
fn point_search_agrees_with_enumeration_over_f7() {
    let ctx = PrimeField::new(7).unwrap();
    let (r, q) = (5usize, 2usize);
    let mut found_any = 0;
    for seed in 0..8u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let plane = Subspace::<Fp>::coordinate(&ctx, r, &[0, 1, 2]).unwrap();
        let b = gen_fiber_generic(&plane, &MultiDegree::single(4), &mut rng).unwrap().remove(0);
        let eta = ProjPoint::new(vec![ctx.element(1), Fp::random(&ctx, &mut rng), Fp::random(&ctx, &mut rng), ctx.element(0), ctx.element(0), ctx.element(0)]).unwrap();
        let phi = phi_decomposition(&b, &eta, q).unwrap();
        let mut valid = BTreeSet::new();
        for k in 1..7u64.pow(5) {
            let mut x = vec![ctx.element(0)];
            let mut m = k;
            for _ in 0..5 {
                x.push(ctx.element(m % 7));
                m /= 7;
            }
            let y_nonzero = x[q + 1..].iter().any(|c| !c.is_zero());
            if phi.in_f_eta_star(&x) && y_nonzero && !phi.transformed.eval(&x).is_zero() {
                valid.insert(normalize(&x));
            }
        }
        for _ in 0..20 {
            if let Ok((xi, _)) = find_point_f_eta_star(&phi, &mut rng, 8) {
                assert!(valid.contains(&normalize(xi.coords())), "seed {seed}: {xi:?} not in the enumerated set");
                found_any += 1;
            }
        }
    }
    assert!(found_any > 0, "the search never succeeded over F_7");
}
