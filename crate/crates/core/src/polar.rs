//! Higher polars of a form at a point, the polar system at a point of the
//! branch hypersurface, the expansion in powers of `Z0` after moving that
//! point to `e_0`, contact analysis on lines, and point search on the
//! polar system inside the hyperplane `{Z0 = 0}`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::elim::solve_system;
use crate::error::Error;
use crate::field::{factorial, Field, Fp};
use crate::frames::{line_restrict, ProjPoint, Transform};
use crate::linalg::Matrix;
use crate::poly::{uni_root_data, Monomial, Poly, UniRootData};

fn homogeneous_degree<F: Field>(g: &Poly<F>) -> Result<u32, Error> {
    g.homogeneous_degree().ok_or_else(|| Error::Degree("the form must be nonzero and homogeneous".into()))
}

/// `g(eta + x)` in the frame of `g`.
fn shifted<F: Field>(g: &Poly<F>, eta: &[F]) -> Result<Poly<F>, Error> {
    if eta.len() != g.nvars() {
        return Err(Error::Usage("point dimension does not match the frame".into()));
    }
    let ctx = g.context();
    let images: Vec<Poly<F>> = eta
        .iter()
        .enumerate()
        .map(|(i, e)| &Poly::var(ctx, g.frame(), i) + &Poly::constant(ctx, g.frame(), e.clone()))
        .collect();
    g.substitute(&images)
}

/// The polars `Δ^j_η(g)` for `j = 0..=max_j`, where
/// `Δ^j_η(g)(x) = (Σ x_i ∂_i)^j g` evaluated at `η`; entry 0 is the
/// constant `g(η)`. No factorial is divided out: `Δ^j` is `j!` times the
/// degree-j part of `g(η + x)`.
pub fn polars<F: Field>(g: &Poly<F>, eta: &[F], max_j: u32) -> Result<Vec<Poly<F>>, Error> {
    let n = homogeneous_degree(g)?;
    if max_j > n {
        return Err(Error::Degree(format!("polar of order {max_j} requested for a form of degree {n}")));
    }
    let s = shifted(g, eta)?;
    let ctx = g.context();
    Ok((0..=max_j).map(|j| s.homogeneous_part(j).scale(&factorial(ctx, j))).collect())
}

/// The j-th polar at `eta`, a form of degree `j` in the running point.
pub fn polar<F: Field>(g: &Poly<F>, eta: &ProjPoint<F>, j: u32) -> Result<Poly<F>, Error> {
    if j == 0 {
        return Err(Error::Degree("polars are indexed from 1".into()));
    }
    Ok(polars(g, eta.coords(), j)?.pop().unwrap())
}

/// The polars of orders 1..2d-2 of a form of degree 2d at a point on it.
#[derive(Clone, Debug)]
pub struct PolarSystem<F: Field> {
    pub base_point: ProjPoint<F>,
    pub polars: Vec<Poly<F>>,
    pub source: Poly<F>,
}

impl<F: Field> PolarSystem<F> {
    pub fn degrees(&self) -> Vec<u32> {
        self.polars.iter().map(|p| p.homogeneous_degree().unwrap_or(0)).collect()
    }

    /// Whether `x` lies on every polar.
    pub fn contains(&self, x: &[F]) -> bool {
        self.polars.iter().all(|p| p.eval(x).is_zero())
    }
}

/// Half the degree of a branch form, which must be even and at least 4.
pub fn half_degree<F: Field>(g: &Poly<F>) -> Result<u32, Error> {
    let n = homogeneous_degree(g)?;
    if n % 2 != 0 || n < 4 {
        return Err(Error::Degree(format!("branch forms have even degree 2d >= 4, got {n}")));
    }
    Ok(n / 2)
}

pub fn f_eta<F: Field>(b: &Poly<F>, eta: &ProjPoint<F>) -> Result<PolarSystem<F>, Error> {
    let d = half_degree(b)?;
    let mut all = polars(b, eta.coords(), 2 * d - 2)?;
    if !all[0].is_zero() {
        return Err(Error::Precondition("the base point is not on the hypersurface".into()));
    }
    all.remove(0);
    Ok(PolarSystem { base_point: eta.clone(), polars: all, source: b.clone() })
}

/// `B` in coordinates where `η = e_0`, expanded in decreasing powers of
/// `Z0`: `B^T = Σ_s Z0^{2d-s} Φ_s`.
#[derive(Clone, Debug)]
pub struct PhiDecomposition<F: Field> {
    pub eta: ProjPoint<F>,
    pub q: usize,
    pub d: u32,
    /// `Z̃0 = Z0`, `Z̃i = Zi - η_i Z0` for `1 <= i <= 2d-2`.
    pub transform: Transform<F>,
    pub transformed: Poly<F>,
    /// `phis[s - 1] = Φ_s` for `s = 1..=2d`; `Φ_s` does not involve `Z0`.
    pub phis: Vec<Poly<F>>,
    /// Reconstruction holds exactly and there is no `Z0^{2d}` term.
    pub residual_ok: bool,
    /// No `Φ_s` with `s <= 2d-2` has a monomial in `Z̃1..Z̃q` alone.
    pub pure_tilde_free: bool,
}

impl<F: Field> PhiDecomposition<F> {
    pub fn phi(&self, s: usize) -> &Poly<F> {
        &self.phis[s - 1]
    }

    pub fn r(&self) -> usize {
        self.transformed.nvars() - 1
    }

    /// `Σ_s Z0^{2d-s} Φ_s`.
    pub fn reconstruct(&self) -> Poly<F> {
        let g = &self.transformed;
        let n = g.nvars();
        let ctx = g.context();
        let mut acc = Poly::zero(ctx, g.frame());
        for (k, phi) in self.phis.iter().enumerate() {
            let s = k as u32 + 1;
            let mut e = vec![0u32; n];
            e[0] = 2 * self.d - s;
            acc = &acc + &phi.mul_monomial(&Monomial::new(&e), &F::one(ctx));
        }
        acc
    }

    /// Membership in the polar system restricted to `{Z0 = 0}`.
    pub fn in_f_eta_star(&self, x: &[F]) -> bool {
        x[0].is_zero() && self.phis[..2 * self.d as usize - 2].iter().all(|p| p.eval(x).is_zero())
    }
}

fn has_y(m: &Monomial, q: usize) -> bool {
    m.exps()[q + 1..].iter().any(|&e| e > 0)
}

pub fn phi_decomposition<F: Field>(b: &Poly<F>, eta: &ProjPoint<F>, q: usize) -> Result<PhiDecomposition<F>, Error> {
    let d = half_degree(b)?;
    let r = b.nvars() - 1;
    let top = 2 * d as usize - 2;
    if q < top || q >= r {
        return Err(Error::Precondition(format!("need 2d-2 <= q < r, got q = {q}, r = {r}, d = {d}")));
    }
    if eta.coords().len() != r + 1 {
        return Err(Error::Usage("point dimension does not match the frame".into()));
    }
    if eta.coords()[0].is_zero() {
        return Err(Error::Precondition("the base point has vanishing Z0 coordinate".into()));
    }
    if eta.coords()[top + 1..].iter().any(|c| !c.is_zero()) {
        return Err(Error::Precondition(format!("the base point must lie in the plane spanned by e_0..e_{top}")));
    }
    if b.terms().any(|(m, _)| !has_y(m, q)) {
        return Err(Error::Precondition(format!("the form does not vanish on the plane {{Y_{}..Y_{r} = 0}}", q + 1)));
    }
    let ctx = b.context().clone();
    let mut m = Matrix::identity(&ctx, r + 1);
    for i in 1..=top {
        m.set(i, 0, -eta.coords()[i].clone());
    }
    let transform = Transform::new(m)?;
    let transformed = transform.apply_poly(b)?;
    let mut coeffs = transformed.coefficients_in(0);
    coeffs.resize(2 * d as usize + 1, Poly::zero(&ctx, b.frame()));
    // coeffs[k] multiplies Z0^k, so Φ_s = coeffs[2d - s]
    let head_zero = coeffs[2 * d as usize].is_zero();
    let phis: Vec<Poly<F>> = (1..=2 * d as usize).map(|s| coeffs[2 * d as usize - s].clone()).collect();
    let pure_tilde_free = phis[..top].iter().all(|p| p.terms().all(|(m, _)| has_y(m, q)));
    let mut out = PhiDecomposition {
        eta: eta.clone(),
        q,
        d,
        transform,
        transformed,
        phis,
        residual_ok: false,
        pure_tilde_free,
    };
    out.residual_ok = head_zero && out.reconstruct() == out.transformed;
    Ok(out)
}

/// Degenerate situations recorded by [`contact_analysis`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContactFlags {
    pub line_in_b: bool,
    pub xi_on_b: bool,
    pub beta_equals_eta: bool,
}

impl ContactFlags {
    pub fn any(&self) -> bool {
        self.line_in_b || self.xi_on_b || self.beta_equals_eta
    }

    /// Name of the first flag set, for error messages and reports.
    pub fn name(&self) -> Option<&'static str> {
        if self.line_in_b {
            Some("line-in-B")
        } else if self.xi_on_b {
            Some("xi-on-B")
        } else if self.beta_equals_eta {
            Some("beta-equals-eta")
        } else {
            None
        }
    }
}

/// Intersection of the line through `η` and `ξ` with the hypersurface.
#[derive(Clone, Debug)]
pub struct ContactReport<F: Field> {
    pub eta: ProjPoint<F>,
    pub xi: ProjPoint<F>,
    /// `None` when the whole line lies on the hypersurface.
    pub restricted: Option<UniRootData<F>>,
    pub contact_order: Option<u32>,
    /// Coefficient `a` of `t^{2d-1}` in `g(t) = B(η + tξ)`.
    pub a: Option<F>,
    /// Leading coefficient `b = B(ξ)`.
    pub b: Option<F>,
    pub t_beta: Option<F>,
    pub beta: Option<ProjPoint<F>>,
    pub flags: ContactFlags,
}

impl<F: Field> ContactReport<F> {
    pub fn is_flagged(&self) -> bool {
        self.flags.any()
    }
}

/// Requires `η` on the form and `ξ` on its polars of orders `1..2d-2`; the
/// residual intersection point `β = η + t_β ξ` is returned when the
/// contact is exactly `2d-1` and the line meets the form in a second point.
pub fn contact_analysis<F: Field>(b: &Poly<F>, eta: &ProjPoint<F>, xi: &ProjPoint<F>) -> Result<ContactReport<F>, Error> {
    let d = half_degree(b)?;
    let g = line_restrict(b, eta, xi)?;
    if !b.eval(eta.coords()).is_zero() {
        return Err(Error::Precondition("the base point is not on the hypersurface".into()));
    }
    let mut report = ContactReport {
        eta: eta.clone(),
        xi: xi.clone(),
        restricted: None,
        contact_order: None,
        a: None,
        b: None,
        t_beta: None,
        beta: None,
        flags: ContactFlags::default(),
    };
    let data = match uni_root_data(&g) {
        Ok(data) => data,
        Err(Error::IdenticallyZero) => {
            report.flags.line_in_b = true;
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    let order = data.order_at_zero;
    if order < 2 * d - 1 {
        return Err(Error::Precondition(format!(
            "the direction is not on all polars: contact order {order} < {}",
            2 * d - 1
        )));
    }
    let a = g.coeff(2 * d as usize - 1);
    let lead = g.coeff(2 * d as usize);
    report.flags.xi_on_b = lead.is_zero();
    report.flags.beta_equals_eta = a.is_zero();
    report.contact_order = Some(order);
    report.restricted = Some(data);
    if !report.flags.any() {
        let t_beta = -a.clone() * lead.inv().unwrap();
        let coords: Vec<F> = eta.coords().iter().zip(xi.coords()).map(|(e, x)| e.clone() + t_beta.clone() * x).collect();
        let beta = ProjPoint::new(coords)?;
        if !b.eval(beta.coords()).is_zero() {
            return Err(Error::Precondition("residual point is off the hypersurface".into()));
        }
        report.t_beta = Some(t_beta);
        report.beta = Some(beta);
    }
    report.a = Some(a);
    report.b = Some(lead);
    Ok(report)
}

/// Counters describing a point search.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub trials: usize,
    pub zero_direction: usize,
    pub inconsistent: usize,
    pub no_rational_solution: usize,
    pub post_check_failed: usize,
}

/// A point `ξ = (0, z, y)` with `Φ_s(ξ) = 0` for `s <= 2d-2`, `y != 0` and
/// `B(ξ) != 0`.
///
/// Every `Φ_s` has positive degree in `Y`, so for a fixed `y` the equation
/// `Φ_s(z, y) = 0` has degree at most `s - 1` in `z`. The search picks `y`
/// on the linear form `Φ_1`, eliminates the linear equation `Φ_2`, fixes
/// random values for surplus coordinates so the remaining system is
/// square, and solves it by resultants.
pub fn find_point_f_eta_star<R: Rng + ?Sized>(
    phi: &PhiDecomposition<Fp>,
    rng: &mut R,
    max_trials: usize,
) -> Result<(ProjPoint<Fp>, SearchStats), Error> {
    let mut stats = SearchStats::default();
    let ctx = *phi.transformed.context();
    let (q, r) = (phi.q, phi.r());
    let top = 2 * phi.d as usize - 2;
    let y_idx: Vec<usize> = (q + 1..=r).collect();
    // Φ_1 only involves Y
    let phi1 = phi.phi(1);
    let form: Vec<Fp> = y_idx
        .iter()
        .map(|&i| {
            let mut e = vec![0u32; r + 1];
            e[i] = 1;
            phi1.coeff(&e)
        })
        .collect();
    if phi1.num_terms() != form.iter().filter(|c| !c.is_zero()).count() {
        return Err(Error::Precondition("the first expansion term is not a linear form in Y".into()));
    }
    let kernel = Matrix::from_rows(&ctx, y_idx.len(), vec![form]).kernel();
    while stats.trials < max_trials {
        stats.trials += 1;
        let mut y = vec![Fp::zero(&ctx); y_idx.len()];
        for v in &kernel {
            let c = Fp::random(&ctx, rng);
            for (yi, vi) in y.iter_mut().zip(v) {
                *yi = *yi + c * vi;
            }
        }
        if y.iter().all(|c| c.is_zero()) {
            stats.zero_direction += 1;
            continue;
        }
        let y_assign: Vec<(usize, Fp)> = y_idx.iter().copied().zip(y.iter().copied()).collect();
        let mut eqs: Vec<Poly<Fp>> = (2..=top).map(|s| phi.phi(s).partial_eval(&y_assign)).collect();
        let mut free: Vec<usize> = (1..=q).collect();
        let mut fixed: Vec<(usize, Fp)> = Vec::new();
        let mut eliminated: Vec<(usize, Poly<Fp>)> = Vec::new();
        // linear elimination
        let mut failed = false;
        loop {
            eqs.retain(|e| !e.is_zero());
            if eqs.iter().any(|e| e.is_constant()) {
                failed = true;
                break;
            }
            let Some(k) = eqs.iter().position(|e| e.total_degree() == Some(1)) else { break };
            let e = eqs.remove(k);
            let v = *free.iter().rev().find(|&&v| e.degree_in(v) == 1).expect("a linear equation has a variable");
            let mut unit = vec![0u32; r + 1];
            unit[v] = 1;
            let c = e.coeff(&unit);
            // v = -(e - c v) / c
            let rest = &e - &Poly::monomial(&ctx, e.frame(), &unit, c);
            let expr = rest.scale(&(-c.inv().unwrap()));
            let mut images: Vec<Poly<Fp>> = (0..=r).map(|i| Poly::var(&ctx, e.frame(), i)).collect();
            images[v] = expr.clone();
            eqs = eqs.iter().map(|g| g.substitute(&images).unwrap()).collect();
            for (_, ex) in eliminated.iter_mut() {
                *ex = ex.substitute(&images).unwrap();
            }
            eliminated.push((v, expr));
            free.retain(|&u| u != v);
        }
        if failed {
            stats.inconsistent += 1;
            continue;
        }
        while free.len() > eqs.len() {
            let k = rng.random_range(0..free.len());
            let v = free.remove(k);
            let val = Fp::random(&ctx, rng);
            fixed.push((v, val));
        }
        if !fixed.is_empty() {
            eqs = eqs.iter().map(|g| g.partial_eval(&fixed)).collect();
            for (_, ex) in eliminated.iter_mut() {
                *ex = ex.partial_eval(&fixed);
            }
        }
        let solutions = solve_system(&eqs, &free);
        if solutions.is_empty() {
            stats.no_rational_solution += 1;
            continue;
        }
        let pick = &solutions[rng.random_range(0..solutions.len())];
        let mut point = vec![Fp::zero(&ctx); r + 1];
        for (v, val) in free.iter().zip(pick).chain(fixed.iter().map(|(v, val)| (v, val))) {
            point[*v] = *val;
        }
        for (i, &yi) in y_idx.iter().zip(&y) {
            point[*i] = yi;
        }
        for (v, ex) in &eliminated {
            point[*v] = ex.eval(&point);
        }
        let ok = phi.in_f_eta_star(&point) && !phi.phi(2 * phi.d as usize).eval(&point).is_zero();
        if !ok {
            stats.post_check_failed += 1;
            continue;
        }
        return Ok((ProjPoint::new(point)?, stats));
    }
    Err(Error::Sampling {
        trials: stats.trials,
        msg: format!(
            "no admissible direction: {} zero, {} inconsistent, {} without rational solution, {} failed checks",
            stats.zero_direction, stats.inconsistent, stats.no_rational_solution, stats.post_check_failed
        ),
    })
}
