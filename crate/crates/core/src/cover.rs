//! The double cover `w^2 = G(x)` branched along `B = {G = 0}`, the rational
//! curve over a contact line, the map `(η, ξ, τ) -> ω` onto the cover, Jacobian
//! rank certificates for the maps to `β`, to the moving point `α` and to `ω`,
//! and the monomial specialization witness.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::field::{factorial, Field, Rational, Q};
use crate::frames::ProjPoint;
use crate::jet::{Jet, JetPoly};
use crate::linalg::Matrix;
use crate::polar::{contact_analysis, f_eta, half_degree, ContactReport};
use crate::poly::{Frame, Poly, UniPoly};

/// `W: w^2 = G(x)` with `deg G = 2d`.
#[derive(Clone, Debug)]
pub struct DoubleCover<F: Field> {
    branch: Poly<F>,
    d: u32,
}

impl<F: Field> DoubleCover<F> {
    pub fn new(branch: Poly<F>) -> Result<Self, Error> {
        let d = half_degree(&branch)?;
        Ok(DoubleCover { branch, d })
    }

    pub fn branch(&self) -> &Poly<F> {
        &self.branch
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn r(&self) -> usize {
        self.branch.nvars() - 1
    }

    /// `G` at the representative of `x` whose `chart` coordinate is 1.
    pub fn chart_value(&self, x: &ProjPoint<F>, chart: usize) -> Result<F, Error> {
        if x.coords().len() != self.branch.nvars() {
            return Err(Error::Usage("point dimension does not match the frame".into()));
        }
        Ok(self.branch.eval(&x.in_chart(chart)?))
    }

    /// The ramification point over a point of `B`.
    pub fn section(&self, eta: &ProjPoint<F>) -> Result<CoverPoint<F>, Error> {
        let chart = eta.pivot();
        if !self.chart_value(eta, chart)?.is_zero() {
            return Err(Error::Precondition("the point is not on the branch hypersurface".into()));
        }
        Ok(CoverPoint { base: eta.clone(), w: F::zero(&eta.context()), chart })
    }
}

/// A point `(x, w)` of the cover, `w` taken in the chart `x_chart = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverPoint<F: Field> {
    pub base: ProjPoint<F>,
    pub w: F,
    pub chart: usize,
}

pub fn on_cover<F: Field>(cover: &DoubleCover<F>, pt: &CoverPoint<F>) -> Result<bool, Error> {
    Ok(pt.w.square() == cover.chart_value(&pt.base, pt.chart)?)
}

/// A rational function of one variable with nonzero denominator.
#[derive(Clone, Debug)]
pub struct UniRational<F: Field> {
    pub num: UniPoly<F>,
    pub den: UniPoly<F>,
}

impl<F: Field> UniRational<F> {
    pub fn new(num: UniPoly<F>, den: UniPoly<F>) -> Result<Self, Error> {
        if den.is_zero() {
            return Err(Error::Usage("zero denominator".into()));
        }
        Ok(UniRational { num, den })
    }

    pub fn from_poly(p: UniPoly<F>) -> Self {
        let one = UniPoly::constant(p.context(), F::one(p.context()));
        UniRational { num: p, den: one }
    }

    pub fn mul(&self, o: &Self) -> Self {
        UniRational { num: &self.num * &o.num, den: &self.den * &o.den }
    }

    pub fn sub(&self, o: &Self) -> Self {
        UniRational { num: &(&self.num * &o.den) - &(&o.num * &self.den), den: &self.den * &o.den }
    }

    pub fn pow(&self, e: u32) -> Self {
        UniRational { num: self.num.pow(e), den: self.den.pow(e) }
    }

    pub fn scale(&self, c: &F) -> Self {
        UniRational { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `None` at a pole.
    pub fn eval(&self, x: &F) -> Option<F> {
        self.num.eval(x).checked_div(&self.den.eval(x))
    }

    /// `(numerator, denominator)` in the text format, variable `var`.
    pub fn to_text(&self, var: &str) -> (String, String) {
        (self.num.to_poly(var).to_string(), self.den.to_poly(var).to_string())
    }
}

impl<F: Field> PartialEq for UniRational<F> {
    fn eq(&self, o: &Self) -> bool {
        &self.num * &o.den == &o.num * &self.den
    }
}

/// Parametrization `τ -> (η + t(τ) ξ, w(τ))` of the double cover of the line
/// `<η, ξ>` branched at `η` and `β`, with
/// `t(τ) = -a / (c - τ^2)`, `w(τ) = τ t(τ)^d`, `c = G(ξ)`, `t_β = -a/c`.
#[derive(Clone, Debug)]
pub struct CurveParam<F: Field> {
    pub eta: ProjPoint<F>,
    /// Direction normalized so that its chart coordinate vanishes.
    pub xi: ProjPoint<F>,
    pub chart: usize,
    pub d: u32,
    pub t_of_tau: UniRational<F>,
    pub w_of_tau: UniRational<F>,
    pub a: F,
    pub c: F,
    pub t_beta: F,
    /// `w^2 = c t^{2d-1} (t - t_β)` as rational functions.
    pub identity_ok: bool,
    /// `w^2 = G(η + t ξ)` as rational functions.
    pub on_cover_ok: bool,
}

impl<F: Field> CurveParam<F> {
    /// The cover point at `τ`; `τ^2 = c` is the pole over `t = ∞`.
    pub fn point(&self, tau: &F) -> Result<CoverPoint<F>, Error> {
        let t = self.t_of_tau.eval(tau).ok_or_else(|| Error::degenerate("tau-pole", "tau^2 equals G(xi)"))?;
        let w = self.w_of_tau.eval(tau).expect("same denominator as t");
        let eta = self.eta.in_chart(self.chart)?;
        let x: Vec<F> = eta.iter().zip(self.xi.coords()).map(|(e, x)| e.clone() + t.clone() * x).collect();
        Ok(CoverPoint { base: ProjPoint::new(x)?, w, chart: self.chart })
    }
}

pub fn parametrize_curve<F: Field>(cover: &DoubleCover<F>, report: &ContactReport<F>) -> Result<CurveParam<F>, Error> {
    if let Some(flag) = report.flags.name() {
        return Err(Error::degenerate(flag, "the contact line cannot be parametrized"));
    }
    let g = cover.branch();
    let chart = report.eta.pivot();
    let mut report = report.clone();
    if !report.xi.coords()[chart].is_zero() {
        // move ξ along the line so that x(τ) stays in the chart of η
        let s = report.xi.coords()[chart].clone();
        let shifted: Vec<F> = report.xi.coords().iter().zip(report.eta.coords()).map(|(x, e)| x.clone() - s.clone() * e).collect();
        report = contact_analysis(g, &report.eta, &ProjPoint::new(shifted)?)?;
        if let Some(flag) = report.flags.name() {
            return Err(Error::degenerate(flag, "the shifted direction is degenerate"));
        }
    }
    let ctx = g.context().clone();
    let d = cover.d();
    let (a, c, t_beta) = match (&report.a, &report.b, &report.t_beta) {
        (Some(a), Some(c), Some(tb)) => (a.clone(), c.clone(), tb.clone()),
        _ => return Err(Error::degenerate("unflagged-incomplete", "contact report lacks a, b or t_beta")),
    };
    // t = -a / (c - τ^2)
    let den = UniPoly::from_coeffs(&ctx, vec![c.clone(), F::zero(&ctx), -F::one(&ctx)]);
    let t_of_tau = UniRational::new(UniPoly::constant(&ctx, -a.clone()), den)?;
    let tau = UniRational::from_poly(UniPoly::monomial(&ctx, F::one(&ctx), 1));
    let w_of_tau = tau.mul(&t_of_tau.pow(d));
    let w2 = w_of_tau.pow(2);
    let tb = UniRational::from_poly(UniPoly::constant(&ctx, t_beta.clone()));
    let rhs = t_of_tau.pow(2 * d - 1).mul(&t_of_tau.sub(&tb)).scale(&c);
    let identity_ok = w2 == rhs;
    // G(η den + num ξ) / den^{2d}
    let eta = report.eta.in_chart(chart)?;
    let values: Vec<UniPoly<F>> = eta
        .iter()
        .zip(report.xi.coords())
        .map(|(e, x)| &t_of_tau.den.scale(e) + &t_of_tau.num.scale(x))
        .collect();
    let gx = g.eval_in(&values, &UniPoly::constant(&ctx, F::one(&ctx)));
    let on_cover_ok = w2 == UniRational::new(gx, t_of_tau.den.pow(2 * d))?;
    Ok(CurveParam {
        eta: report.eta.clone(),
        xi: report.xi.clone(),
        chart,
        d,
        t_of_tau,
        w_of_tau,
        a,
        c,
        t_beta,
        identity_ok,
        on_cover_ok,
    })
}

/// `η = (1, params, 0, ..., 0)` on the `(2d-2)`-plane through `e_0..e_{2d-2}`.
pub fn eta_from_params<F: Field>(ctx: &F::Context, r: usize, params: &[F]) -> Result<ProjPoint<F>, Error> {
    if params.len() + 1 > r + 1 {
        return Err(Error::Usage("too many parameters for the ambient space".into()));
    }
    let mut coords = vec![F::zero(ctx); r + 1];
    coords[0] = F::one(ctx);
    for (i, p) in params.iter().enumerate() {
        coords[i + 1] = p.clone();
    }
    ProjPoint::new(coords)
}

/// The point of the cover over the line `<η, ξ>` at parameter `τ`.
pub fn omega_map<F: Field>(b: &Poly<F>, eta_params: &[F], xi: &ProjPoint<F>, tau: &F) -> Result<CoverPoint<F>, Error> {
    let cover = DoubleCover::new(b.clone())?;
    let top = 2 * cover.d() as usize - 2;
    if eta_params.len() != top {
        return Err(Error::Usage(format!("expected {top} coordinates for the base point, got {}", eta_params.len())));
    }
    let eta = eta_from_params(b.context(), cover.r(), eta_params)?;
    let report = contact_analysis(b, &eta, xi)?;
    parametrize_curve(&cover, &report)?.point(tau)
}

/// Which map a rank certificate is about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    /// `(η, ξ) -> β`, expected to dominate `B`.
    Beta,
    /// `(η, ξ, t) -> η + t ξ`, expected to dominate `P^r`.
    Alpha,
    /// `(η, ξ, τ) -> ω`, expected to dominate `W`.
    Omega,
}

impl Target {
    pub const ALL: [Target; 3] = [Target::Beta, Target::Alpha, Target::Omega];

    pub fn name(&self) -> &'static str {
        match self {
            Target::Beta => "beta",
            Target::Alpha => "alpha",
            Target::Omega => "omega",
        }
    }
}

/// Rank of the differential of a target map on the tangent space of
/// `S = {(η, ξ) : Δ^s_η(G)(ξ) = 0, s = 1..2d-2}` at a sample point.
#[derive(Clone, Debug)]
pub struct RankCert<F: Field> {
    pub which: Target,
    pub eta: ProjPoint<F>,
    pub xi: ProjPoint<F>,
    /// Sample value of the extra parameter (`t` for alpha, `τ` for omega).
    pub extra: F,
    /// Differential of the target map restricted to the tangent space.
    pub jacobian: Matrix<F>,
    pub constraint_rank: usize,
    pub rank: usize,
    pub rank_alt: usize,
    /// `rank([C; J]) - rank(C)` for the constraint Jacobian `C`.
    pub rank_stacked: usize,
    pub expected: usize,
    pub characteristic: u64,
    /// Degree bound for the minor whose nonvanishing certifies the rank.
    pub sz_degree: u64,
}

impl<F: Field> RankCert<F> {
    pub fn consistent(&self) -> bool {
        self.rank == self.rank_alt && self.rank == self.rank_stacked
    }

    pub fn pass(&self) -> bool {
        self.consistent() && self.rank == self.expected
    }

    /// Chance that a generically full rank looks deficient at a uniform
    /// sample: `sz_degree / p`. Zero in characteristic zero, where a full
    /// rank at one point already bounds the generic rank from below.
    pub fn failure_bound(&self) -> f64 {
        if self.characteristic == 0 {
            0.0
        } else {
            (self.sz_degree as f64 / self.characteristic as f64).min(1.0)
        }
    }
}

pub fn rank_certificate<F: Field>(
    b: &Poly<F>,
    eta: &ProjPoint<F>,
    xi: &ProjPoint<F>,
    extra: &F,
    which: Target,
) -> Result<RankCert<F>, Error> {
    let d = half_degree(b)?;
    let n = 2 * d as usize;
    let top = n - 2;
    let r = b.nvars() - 1;
    let ctx = b.context().clone();
    if eta.coords().len() != r + 1 || xi.coords().len() != r + 1 {
        return Err(Error::Usage("point dimension does not match the frame".into()));
    }
    if eta.coords()[0].is_zero() || eta.coords()[top + 1..].iter().any(|c| !c.is_zero()) {
        return Err(Error::Precondition(format!("the base point must be (1, *, ..., *, 0, ..., 0) with {top} free coordinates")));
    }
    if !xi.coords()[0].is_zero() {
        return Err(Error::Precondition("the direction must lie in the hyperplane Z0 = 0".into()));
    }
    let report = contact_analysis(b, eta, xi)?;
    if let Some(flag) = report.flags.name() {
        return Err(Error::degenerate(flag, "rank certificates need an unflagged contact"));
    }
    let eta_v = eta.in_chart(0)?;
    let xi_chart = xi.pivot();
    // parameters: η_1..η_top, ξ_i (i != chart, 1 <= i <= r), extra
    let np = top + r;
    let extra_slot = np - 1;
    let mut slot = top;
    let mut xi_j = Vec::with_capacity(r + 1);
    for (i, x) in xi.coords().iter().enumerate() {
        if i == 0 || i == xi_chart {
            xi_j.push(Jet::constant(x.clone(), np));
        } else {
            xi_j.push(Jet::variable(x.clone(), slot, np));
            slot += 1;
        }
    }
    let eta_j: Vec<Jet<F>> = eta_v
        .iter()
        .enumerate()
        .map(|(i, e)| if (1..=top).contains(&i) { Jet::variable(e.clone(), i - 1, np) } else { Jet::constant(e.clone(), np) })
        .collect();
    let line: Vec<JetPoly<F>> = eta_j.iter().zip(&xi_j).map(|(e, x)| JetPoly::linear(e.clone(), x.clone(), n)).collect();
    let unit = JetPoly::linear(Jet::constant(F::one(&ctx), np), Jet::constant(F::zero(&ctx), np), n);
    let g = b.eval_in(&line, &unit);
    let mut c_rows = Vec::with_capacity(top);
    for s in 1..=top {
        let e = g.coeff(s).scale(&factorial(&ctx, s as u32));
        if !e.value.is_zero() {
            return Err(Error::Precondition(format!("the direction is off the polar of order {s}")));
        }
        c_rows.push(e.grad);
    }
    let cmat = Matrix::from_rows(&ctx, np, c_rows);
    let constraint_rank = cmat.rank();
    if constraint_rank < top {
        return Err(Error::Resample(format!("constraint Jacobian has rank {constraint_rank} < {top}")));
    }
    let kernel = cmat.kernel_matrix();
    let a = g.coeff(n - 1);
    let c = g.coeff(n);
    let (rows, expected, row_degree): (Vec<Jet<F>>, usize, u64) = match which {
        Target::Beta => {
            let tb = a.neg().div(c).ok_or_else(|| Error::Resample("G(xi) vanishes".into()))?;
            let rows = (1..=r).map(|i| eta_j[i].add(&tb.mul(&xi_j[i]))).collect();
            (rows, r - 1, 4 * d as u64)
        }
        Target::Alpha => {
            let t = Jet::variable(extra.clone(), extra_slot, np);
            let rows = (1..=r).map(|i| eta_j[i].add(&t.mul(&xi_j[i]))).collect();
            (rows, r, 1)
        }
        Target::Omega => {
            let tau = Jet::variable(extra.clone(), extra_slot, np);
            let den = c.sub(&tau.mul(&tau));
            let t = a.neg().div(&den).ok_or_else(|| Error::Resample("tau is a pole of the curve parametrization".into()))?;
            let mut rows: Vec<Jet<F>> = (1..=r).map(|i| eta_j[i].add(&t.mul(&xi_j[i]))).collect();
            rows.push(tau.mul(&t.pow(d)));
            (rows, r, 4 * (d as u64) * (d as u64))
        }
    };
    let jmat = Matrix::from_rows(&ctx, np, rows.into_iter().map(|j| j.grad).collect());
    let jacobian = jmat.mul(&kernel);
    let rank = jacobian.rank();
    let rank_alt = jacobian.rank_alt();
    let rank_stacked = cmat.vstack(&jmat).rank() - constraint_rank;
    let sz_degree = (top as u64) * (n as u64 - 1) + expected as u64 * row_degree;
    Ok(RankCert {
        which,
        eta: eta.clone(),
        xi: xi.clone(),
        extra: extra.clone(),
        jacobian,
        constraint_rank,
        rank,
        rank_alt,
        rank_stacked,
        expected,
        characteristic: F::characteristic(&ctx),
        sz_degree,
    })
}

/// One condition `coeff * η_var^exponent = 0` of the witness fibre system.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberCondition {
    /// Polar order.
    pub order: u32,
    pub condition: Poly<Rational>,
    pub var: usize,
    pub exponent: u32,
}

#[derive(Clone, Debug)]
pub struct WitnessReport {
    pub d: u32,
    pub bstar: Poly<Rational>,
    pub eta_star: ProjPoint<Rational>,
    pub beta_star: ProjPoint<Rational>,
    pub fiber_system: Vec<FiberCondition>,
    /// Zero-based index `k` with `η* = e_k`.
    pub eta_index: usize,
    pub triangular: bool,
    pub unique: bool,
    /// Product of the exponents of the pure-power system.
    pub multiplicity: BigInt,
    /// `(2d-1)!`
    pub expected_multiplicity: BigInt,
    pub eta_on_b: bool,
    pub beta_on_b: bool,
    pub beta_on_polars: bool,
}

impl WitnessReport {
    pub fn pass(&self) -> bool {
        self.triangular
            && self.unique
            && self.multiplicity == self.expected_multiplicity
            && self.eta_on_b
            && self.beta_on_b
            && self.beta_on_polars
    }
}

pub const WITNESS_MAX_D: u32 = 8;

/// `B* = Z_{2d-3}^{2d-1} Y + Σ_{k=2}^{2d-2} Z_{k-2}^k Y^{2d-k}` in
/// `Z0..Z_{2d-2}, Y_{2d-1}`.
pub fn witness_form(d: u32) -> Poly<Rational> {
    let n = 2 * d as usize;
    let r = n - 1;
    let frame = Frame::adapted(n - 2, r);
    let one = Rational::integer(1);
    let mut e = vec![0u32; r + 1];
    e[n - 3] = n as u32 - 1;
    e[r] = 1;
    let mut g = Poly::monomial(&Q, &frame, &e, one.clone());
    for k in 2..=n - 2 {
        let mut e = vec![0u32; r + 1];
        e[k - 2] = k as u32;
        e[r] = (n - k) as u32;
        g = &g + &Poly::monomial(&Q, &frame, &e, one.clone());
    }
    g
}

/// Solves `Δ^j_η(B*)(β*) = 0`, `j = 1..2d-2`, for `η` on the plane
/// `{Y = 0}`, with `β* = e_{2d-1}`.
pub fn specialization_witness(d: u32) -> Result<WitnessReport, Error> {
    if !(2..=WITNESS_MAX_D).contains(&d) {
        return Err(Error::Config(format!("witness degree must satisfy 2 <= d <= {WITNESS_MAX_D}, got {d}")));
    }
    let bstar = witness_form(d);
    let n = 2 * d as usize;
    let r = n - 1;
    let top = n - 2;
    // symbolic η and a parameter s: B*(η + s β*), coefficient of s^j times j!
    let mut names: Vec<String> = (0..=r).map(|i| format!("eta{i}")).collect();
    names.push("s".into());
    let frame = Frame::new(names);
    let images: Vec<Poly<Rational>> = (0..=r)
        .map(|i| {
            let v = Poly::var(&Q, &frame, i);
            if i == r {
                &v + &Poly::var(&Q, &frame, r + 1)
            } else {
                v
            }
        })
        .collect();
    let along = bstar.substitute(&images)?;
    let coeffs = along.coefficients_in(r + 1);
    let mut fiber_system = Vec::with_capacity(top);
    let mut triangular = true;
    for j in 1..=top {
        let c = coeffs.get(j).cloned().unwrap_or_else(|| Poly::zero(&Q, &frame));
        // restrict to the plane {Y = 0}
        let cond = c.scale(&factorial(&Q, j as u32)).partial_eval(&[(r, Rational::integer(0))]);
        let pure = if cond.num_terms() == 1 {
            let (m, _) = cond.terms().next().unwrap();
            let vars: Vec<usize> = (0..=r).filter(|&i| m.exp(i) > 0).collect();
            (vars.len() == 1).then(|| (vars[0], m.exp(vars[0])))
        } else {
            None
        };
        let (var, exponent) = pure.unwrap_or_else(|| {
            triangular = false;
            (usize::MAX, 0)
        });
        fiber_system.push(FiberCondition { order: j as u32, condition: cond, var, exponent });
    }
    let mut used: Vec<usize> = fiber_system.iter().map(|c| c.var).collect();
    used.sort_unstable();
    used.dedup();
    triangular &= used.len() == top && used.iter().all(|&v| v <= top);
    // the coordinates of η on the plane not forced to vanish
    let free: Vec<usize> = (0..=top).filter(|i| !used.contains(i)).collect();
    let unique = triangular && free.len() == 1;
    let eta_index = if unique { free[0] } else { usize::MAX };
    let eta_star = ProjPoint::unit(&Q, r, if unique { eta_index } else { top });
    let beta_star = ProjPoint::unit(&Q, r, r);
    let multiplicity: BigInt = if triangular { fiber_system.iter().map(|c| BigInt::from(c.exponent)).product() } else { BigInt::from(0) };
    let expected_multiplicity: BigInt = (1..=n as u64 - 1).map(BigInt::from).product();
    let eta_on_b = bstar.eval(eta_star.coords()).is_zero();
    let beta_on_b = bstar.eval(beta_star.coords()).is_zero();
    let beta_on_polars = eta_on_b && f_eta(&bstar, &eta_star)?.contains(beta_star.coords());
    Ok(WitnessReport {
        d,
        bstar,
        eta_star,
        beta_star,
        fiber_system,
        eta_index,
        triangular,
        unique,
        multiplicity,
        expected_multiplicity,
        eta_on_b,
        beta_on_b,
        beta_on_polars,
    })
}
