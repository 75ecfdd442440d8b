use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use polarcover_core::bounds::{gen_fiber_generic, ledger, min_r_linear, predonzan_ok, MultiDegree};
use polarcover_core::field::factorial;
use polarcover_core::frames::restrict_vectors;
use polarcover_core::polar::{f_eta, find_point_f_eta_star, phi_decomposition, polars};
use polarcover_core::{uni_root_data, Field, Fp, Frame, Poly, PrimeField, ProjPoint, Rational, Subspace, UniPoly, Q};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const P: u64 = 10007;

fn fp() -> PrimeField {
    PrimeField::new(P).unwrap()
}

fn frame3() -> Arc<Frame> {
    Frame::new(["x", "y", "z"])
}

fn terms(max_deg: u32) -> impl Strategy<Value = Vec<(Vec<u32>, i64)>> {
    prop::collection::vec((prop::collection::vec(0..=max_deg, 3), -40i64..=40), 0..8)
}

fn build<F: Field>(ctx: &F::Context, t: &[(Vec<u32>, i64)]) -> Poly<F> {
    let frame = frame3();
    t.iter().fold(Poly::zero(ctx, &frame), |acc, (e, c)| &acc + &Poly::monomial(ctx, &frame, e, F::from_i64(ctx, *c)))
}

fn homogeneous(deg: u32) -> impl Strategy<Value = Vec<(Vec<u32>, i64)>> {
    prop::collection::vec((0..=deg, 0..=deg, -40i64..=40), 1..8)
        .prop_map(move |v| v.into_iter().filter(|(a, b, _)| a + b <= deg).map(|(a, b, c)| (vec![a, b, deg - a - b], c)).collect())
}

fn linear() -> impl Strategy<Value = Vec<(Vec<u32>, i64)>> {
    prop::collection::vec(-9i64..=9, 4)
        .prop_map(|c| c.into_iter().enumerate().map(|(i, c)| ((0..3).map(|j| u32::from(i == j)).collect(), c)).collect())
}

fn point() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-30i64..=30, 3)
}

fn conv<F: Field>(ctx: &F::Context, v: &[i64]) -> Vec<F> {
    v.iter().map(|&x| F::from_i64(ctx, x)).collect()
}

/// Factorial-based binomial, independent of the library's product loop.
fn naive_binomial(n: u64, k: u64) -> BigInt {
    let fact = |m: u64| (1..=m).fold(BigInt::one(), |a, i| a * i);
    fact(n) / (fact(k) * fact(n - k))
}

proptest! {
    #[test]
    fn ring_axioms_over_fp(a in terms(4), b in terms(4), c in terms(4), x in point()) {
        let ctx = fp();
        let (a, b, c) = (build::<Fp>(&ctx, &a), build::<Fp>(&ctx, &b), build::<Fp>(&ctx, &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a + &(-&a), Poly::zero(&ctx, &frame3()));
        let x = conv::<Fp>(&ctx, &x);
        prop_assert_eq!((&a * &b).eval(&x), a.eval(&x) * b.eval(&x));
    }

    #[test]
    fn ring_axioms_over_q(a in terms(3), b in terms(3), c in terms(3), x in point()) {
        let (a, b, c) = (build::<Rational>(&Q, &a), build::<Rational>(&Q, &b), build::<Rational>(&Q, &c));
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        let x = conv::<Rational>(&Q, &x);
        prop_assert_eq!((&a + &b).eval(&x), a.eval(&x) + b.eval(&x));
        prop_assert_eq!(a.pow(3).eval(&x), a.eval(&x).pow(3));
    }

    #[test]
    fn euler_identity((deg, t) in (1u32..=6).prop_flat_map(|d| (Just(d), homogeneous(d)))) {
        let ctx = fp();
        let g = build::<Fp>(&ctx, &t);
        let frame = frame3();
        let mut euler = Poly::zero(&ctx, &frame);
        for i in 0..3 {
            euler = &euler + &(&Poly::var(&ctx, &frame, i) * &g.diff(i).unwrap());
        }
        prop_assert_eq!(euler, g.scale(&Fp::from_i64(&ctx, deg as i64)));
    }

    #[test]
    fn substitution_is_functorial(g in terms(2), h in prop::collection::vec(linear(), 3), x in point()) {
        let ctx = fp();
        let g = build::<Fp>(&ctx, &g);
        let h: Vec<Poly<Fp>> = h.iter().map(|t| build::<Fp>(&ctx, t)).collect();
        let x = conv::<Fp>(&ctx, &x);
        let hx: Vec<Fp> = h.iter().map(|p| p.eval(&x)).collect();
        prop_assert_eq!(g.substitute(&h).unwrap().eval(&x), g.eval(&hx));
        // substituting the coordinate functions is the identity
        let frame = frame3();
        let ids: Vec<Poly<Fp>> = (0..3).map(|i| Poly::var(&ctx, &frame, i)).collect();
        prop_assert_eq!(g.substitute(&ids).unwrap(), g.clone());
        // composition of affine substitutions: (g ∘ h) ∘ h = g ∘ (h ∘ h)
        let hh: Vec<Poly<Fp>> = h.iter().map(|p| p.substitute(&h).unwrap()).collect();
        prop_assert_eq!(g.substitute(&h).unwrap().substitute(&h).unwrap(), g.substitute(&hh).unwrap());
    }

    #[test]
    fn taylor_membership_matches_polar_system(seed in any::<u64>()) {
        let ctx = fp();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let plane = Subspace::<Fp>::coordinate(&ctx, 5, &[0, 1, 2]).unwrap();
        let b = gen_fiber_generic(&plane, &MultiDegree::single(4), &mut rng).unwrap().remove(0);
        let eta = ProjPoint::new(vec![ctx.element(1), Fp::random(&ctx, &mut rng), Fp::random(&ctx, &mut rng), ctx.element(0), ctx.element(0), ctx.element(0)]).unwrap();
        let sys = f_eta(&b, &eta).unwrap();
        let phi = phi_decomposition(&b, &eta, 2).unwrap();
        // Φ_s and Δ^s agree on Z0 = 0 up to s!
        let pol = polars(&b, eta.coords(), 4).unwrap();
        for s in 1..=4u32 {
            let lhs = phi.phi(s as usize).scale(&factorial::<Fp>(&ctx, s));
            prop_assert_eq!(lhs, pol[s as usize].partial_eval(&[(0, ctx.element(0))]));
        }
        let mut candidates: Vec<Vec<Fp>> = (0..4).map(|_| {
            let mut v: Vec<Fp> = (0..6).map(|_| Fp::random(&ctx, &mut rng)).collect();
            v[0] = ctx.element(0);
            v
        }).collect();
        if let Ok((x, _)) = find_point_f_eta_star(&phi, &mut rng, 32) {
            candidates.push(x.coords().to_vec());
        }
        for x in candidates {
            let line = restrict_vectors(&b, eta.coords(), &x);
            let taylor = (0..=2).all(|j| line.coeff(j).is_zero());
            prop_assert_eq!(sys.contains(&x), taylor);
            prop_assert_eq!(phi.in_f_eta_star(&x), taylor && x[0].is_zero());
        }
    }

    #[test]
    fn root_data_reconstructs(k in 0u32..4, roots in prop::collection::vec(1u64..P, 0..5), tail in prop::collection::vec(0u64..P, 0..3)) {
        let ctx = fp();
        let t = UniPoly::monomial(&ctx, ctx.element(1), 1);
        let mut f = UniPoly::monomial(&ctx, ctx.element(1), k as usize);
        for &r in &roots {
            f = &f * &(&t - &UniPoly::constant(&ctx, ctx.element(r)));
        }
        // an extra factor with nonzero constant term
        let extra: Vec<Fp> = std::iter::once(ctx.element(1)).chain(tail.iter().map(|&c| ctx.element(c))).collect();
        let f = &f * &UniPoly::from_coeffs(&ctx, extra);
        let data = uni_root_data(&f).unwrap();
        prop_assert_eq!(&data.residual * &UniPoly::monomial(&ctx, ctx.element(1), data.order_at_zero as usize), f.clone());
        prop_assert!(data.order_at_zero >= k);
        prop_assert!(!data.residual.coeff(0).is_zero());
        for &r in &roots {
            prop_assert!(data.roots.iter().any(|(x, _)| *x == ctx.element(r)));
        }
        for (x, m) in &data.roots {
            let lin = &t - &UniPoly::constant(&ctx, *x);
            let (_, rem) = data.residual.div_rem(&lin.pow(*m));
            prop_assert!(rem.is_zero());
            let (_, rem) = data.residual.div_rem(&lin.pow(m + 1));
            prop_assert!(!rem.is_zero());
        }
    }

    #[test]
    fn predonzan_threshold_is_exact(q in 1u64..6, degs in prop::collection::vec(1u32..5, 1..4)) {
        let dbar = MultiDegree::new(degs).unwrap();
        prop_assume!(!dbar.is_excluded());
        let r0 = min_r_linear(q, &dbar).unwrap();
        prop_assert!(predonzan_ok(r0, q, &dbar).unwrap());
        if r0 > q + 1 {
            prop_assert!(!predonzan_ok(r0 - 1, q, &dbar).unwrap());
        }
        for r in q + 1..r0 + 5 {
            if predonzan_ok(r, q, &dbar).unwrap() {
                prop_assert!(predonzan_ok(r + 1, q, &dbar).unwrap());
            }
        }
    }

    #[test]
    fn ledger_matches_naive_counts(r in 2u64..14, q in 1u64..13, degs in prop::collection::vec(1u32..6, 1..4), d in 2u64..5) {
        prop_assume!(q < r);
        let mut degs = degs;
        degs.sort_unstable();
        let dbar = MultiDegree::new(degs.clone()).unwrap();
        let l = ledger(r, q, d, &dbar).unwrap();
        let grass = BigInt::from((r - q) * (q + 1));
        let n: Vec<BigInt> = degs.iter().map(|&dj| naive_binomial(r + dj as u64, r) - 1).collect();
        let m: Vec<BigInt> = degs.iter().map(|&dj| naive_binomial(r + dj as u64, r) - naive_binomial(q + dj as u64, q) - 1).collect();
        let cond: BigInt = degs.iter().map(|&dj| naive_binomial(q + dj as u64, q)).sum();
        prop_assert_eq!(&l.n_j, &n);
        prop_assert_eq!(&l.m_j, &m);
        prop_assert_eq!(&l.incidence_dim, &(&grass + m.iter().sum::<BigInt>()));
        prop_assert_eq!(&l.fano_dim, &(&grass - &cond));
        prop_assert_eq!(&l.b_rd, &(&grass - naive_binomial(q + 2 * d, q)));
        prop_assert!(l.trdeg_identity_ok);
        // incidence - fano = Σ N_j
        prop_assert_eq!(&l.incidence_dim - &l.fano_dim, n.iter().sum::<BigInt>());
        if !dbar.is_excluded() {
            prop_assert_eq!(l.predonzan_ok, Some(l.fano_dim >= BigInt::zero()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn text_round_trip(t in terms(5), num in -30i64..30, den in 1i64..30) {
        let ctx = fp();
        let g = build::<Fp>(&ctx, &t);
        prop_assert_eq!(Poly::<Fp>::parse(&ctx, &frame3(), &g.to_string()).unwrap(), g.clone());
        prop_assert_eq!(Poly::<Fp>::parse_text(&ctx, &g.to_text()).unwrap(), g);
        let h = build::<Rational>(&Q, &t).scale(&Rational::frac(num, den));
        prop_assert_eq!(Poly::<Rational>::parse_text(&Q, &h.to_text()).unwrap(), h);
    }
}
