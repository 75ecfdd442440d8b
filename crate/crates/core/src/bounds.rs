//! Dimension counts, linear-space thresholds and the constants ledger, plus
//! generation of forms vanishing on a fixed coordinate plane.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::field::{Field, RatFn, RatFnContext, Rational, Q};
use crate::frames::Subspace;
use crate::poly::{Frame, Monomial, Poly};

/// `C(n, k)` as a big integer (zero when `k > n`).
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Nondecreasing list of positive degrees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct MultiDegree(Vec<u32>);

impl MultiDegree {
    pub fn new(mut degrees: Vec<u32>) -> Result<Self, Error> {
        if degrees.is_empty() {
            return Err(Error::Config("a multidegree needs at least one entry".into()));
        }
        if degrees.contains(&0) {
            return Err(Error::Config("degrees must be positive".into()));
        }
        degrees.sort_unstable();
        Ok(MultiDegree(degrees))
    }

    pub fn single(d: u32) -> Self {
        MultiDegree::new(vec![d]).expect("positive degree")
    }

    pub fn degrees(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The case `(1, ..., 1, 2)` with at least one linear entry, where the
    /// threshold formula is not claimed.
    pub fn is_excluded(&self) -> bool {
        let n = self.0.len();
        n >= 2 && self.0[n - 1] == 2 && self.0[..n - 1].iter().all(|&d| d == 1)
    }

    /// `sum_j C(d_j + q, q)`: conditions for containing a fixed q-plane.
    pub fn plane_conditions(&self, q: u64) -> BigInt {
        self.0.iter().map(|&d| binomial(d as u64 + q, q)).sum()
    }
}

impl TryFrom<Vec<u32>> for MultiDegree {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self, Error> {
        MultiDegree::new(v)
    }
}

impl From<MultiDegree> for Vec<u32> {
    fn from(m: MultiDegree) -> Vec<u32> {
        m.0
    }
}

impl fmt::Display for MultiDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn check_range(r: u64, q: u64) -> Result<(), Error> {
    if q == 0 || q >= r {
        return Err(Error::Usage(format!("need 0 < q < r, got q = {q}, r = {r}")));
    }
    Ok(())
}

fn check_excluded(dbar: &MultiDegree) -> Result<(), Error> {
    if dbar.is_excluded() {
        return Err(Error::Excluded(dbar.to_string()));
    }
    Ok(())
}

/// Whether the expected dimension of q-planes on a complete intersection of
/// multidegree `dbar` in P^r is nonnegative: `(r-q)(q+1) >= sum C(d_j+q, q)`.
pub fn predonzan_ok(r: u64, q: u64, dbar: &MultiDegree) -> Result<bool, Error> {
    check_range(r, q)?;
    check_excluded(dbar)?;
    Ok(BigInt::from(r - q) * BigInt::from(q + 1) >= dbar.plane_conditions(q))
}

/// Smallest `r > q` with [`predonzan_ok`].
pub fn min_r_linear(q: u64, dbar: &MultiDegree) -> Result<u64, Error> {
    if q == 0 {
        return Err(Error::Usage("q must be positive".into()));
    }
    check_excluded(dbar)?;
    // (r - q)(q + 1) >= S  <=>  r - q >= ceil(S / (q + 1))
    let s = dbar.plane_conditions(q);
    let m = BigInt::from(q + 1);
    let step = (&s + &m - BigInt::one()) / &m;
    let step = step.max(BigInt::one());
    (step + BigInt::from(q)).to_u64().ok_or_else(|| Error::Usage("threshold exceeds 64 bits".into()))
}

/// Serde helpers writing big integers as decimal strings.
pub mod decimal {
    use num_bigint::BigInt;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }

    pub mod vec {
        use num_bigint::BigInt;
        use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(|x| x.to_string()))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
            let v = Vec::<String>::deserialize(d)?;
            v.iter().map(|s| s.parse().map_err(D::Error::custom)).collect()
        }
    }
}

/// Dimension counts for complete intersections containing a q-plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsLedger {
    pub r: u64,
    pub q: u64,
    pub d: u64,
    pub dbar: MultiDegree,
    /// `N_j = C(r + d_j, d_j) - 1`
    #[serde(with = "decimal::vec")]
    pub n_j: Vec<BigInt>,
    /// `M_j = C(d_j + r, r) - C(d_j + q, q) - 1`
    #[serde(with = "decimal::vec")]
    pub m_j: Vec<BigInt>,
    /// Grassmannian dimension plus the fibre dimensions `sum M_j`.
    #[serde(with = "decimal")]
    pub incidence_dim: BigInt,
    /// Expected dimension of the q-planes on a generic member.
    #[serde(with = "decimal")]
    pub fano_dim: BigInt,
    /// Same count for a single form of degree 2d.
    #[serde(with = "decimal")]
    pub b_rd: BigInt,
    /// `None` for the excluded multidegree.
    pub predonzan_ok: Option<bool>,
    pub trdeg_identity_ok: bool,
}

pub fn ledger(r: u64, q: u64, d: u64, dbar: &MultiDegree) -> Result<BoundsLedger, Error> {
    check_range(r, q)?;
    let grass = BigInt::from(r - q) * BigInt::from(q + 1);
    let n_j: Vec<BigInt> = dbar.degrees().iter().map(|&dj| binomial(r + dj as u64, dj as u64) - 1).collect();
    let m_j: Vec<BigInt> = dbar
        .degrees()
        .iter()
        .map(|&dj| binomial(dj as u64 + r, r) - binomial(dj as u64 + q, q) - 1)
        .collect();
    let incidence_dim = &grass + m_j.iter().sum::<BigInt>();
    let fano_dim = &grass - dbar.plane_conditions(q);
    let b_rd = &grass - binomial(q + 2 * d, 2 * d);
    let predonzan_ok = if dbar.is_excluded() { None } else { Some(grass >= dbar.plane_conditions(q)) };
    let total = binomial(r + 2 * d, 2 * d) - 1;
    let on_plane = binomial(q + 2 * d, 2 * d);
    let trdeg_identity_ok = total == &on_plane + (&total - &on_plane);
    Ok(BoundsLedger { r, q, d, dbar: dbar.clone(), n_j, m_j, incidence_dim, fano_dim, b_rd, predonzan_ok, trdeg_identity_ok })
}

/// An integer constant that is either known exactly, only bounded below, or
/// not available.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "ConstantRepr", try_from = "ConstantRepr")]
pub enum Constant {
    Exact(BigInt),
    AtLeast(BigInt),
    Unknown,
}

#[derive(Serialize, Deserialize)]
struct ConstantRepr {
    status: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    value: Option<String>,
}

impl From<Constant> for ConstantRepr {
    fn from(c: Constant) -> Self {
        let (status, value) = match c {
            Constant::Exact(v) => ("exact", Some(v.to_string())),
            Constant::AtLeast(v) => ("at-least", Some(v.to_string())),
            Constant::Unknown => ("unknown", None),
        };
        ConstantRepr { status: status.into(), value }
    }
}

impl TryFrom<ConstantRepr> for Constant {
    type Error = String;
    fn try_from(r: ConstantRepr) -> Result<Self, String> {
        let value = || -> Result<BigInt, String> {
            r.value.as_deref().ok_or("missing value")?.parse().map_err(|e| format!("{e}"))
        };
        match r.status.as_str() {
            "exact" => Ok(Constant::Exact(value()?)),
            "at-least" => Ok(Constant::AtLeast(value()?)),
            "unknown" => Ok(Constant::Unknown),
            other => Err(format!("unknown constant status '{other}'")),
        }
    }
}

impl Constant {
    pub fn value(&self) -> Option<&BigInt> {
        match self {
            Constant::Exact(v) | Constant::AtLeast(v) => Some(v),
            Constant::Unknown => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Constant::Exact(_))
    }

    fn map(&self, f: impl Fn(&BigInt) -> BigInt) -> Constant {
        match self {
            Constant::Exact(v) => Constant::Exact(f(v)),
            Constant::AtLeast(v) => Constant::AtLeast(f(v)),
            Constant::Unknown => Constant::Unknown,
        }
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Exact(v) => write!(f, "{v}"),
            Constant::AtLeast(v) => write!(f, ">= {v}"),
            Constant::Unknown => write!(f, "unknown"),
        }
    }
}

/// Value of `q` for degree 3, the base of the recursion.
pub const Q_BASE: u64 = 25;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsLedger {
    pub d: u64,
    /// `2d - 2`
    pub n: u64,
    pub q_dbar: Constant,
    /// `q_dbar + 1`
    pub rho_dprime: Constant,
    /// Least r for which a generic form of degree 2d contains a plane of
    /// dimension `rho_dprime`.
    pub rho1: Constant,
    pub c_dbar: Constant,
    /// `max(c_dbar, rho1) + 1`
    pub rho: Constant,
}

pub fn constants(d: u64, c_external: Option<u64>, q_external: Option<u64>) -> Result<ConstantsLedger, Error> {
    if d < 3 {
        return Err(Error::Config(format!("the constants are defined for d > 2, got d = {d}")));
    }
    let n = 2 * d - 2;
    let q_dbar = match (d, q_external) {
        (3, Some(q)) if q != Q_BASE => {
            return Err(Error::Config(format!("q for d = 3 is {Q_BASE}, an external value {q} contradicts it")));
        }
        (3, _) => Constant::Exact(BigInt::from(Q_BASE)),
        (_, Some(q)) => {
            let floor = Q_BASE + 2 * (d - 3);
            if q < floor {
                return Err(Error::Config(format!("external q = {q} is below the lower bound {floor} for d = {d}")));
            }
            Constant::Exact(BigInt::from(q))
        }
        (_, None) => Constant::AtLeast(BigInt::from(Q_BASE + 2 * (d - 3))),
    };
    let rho_dprime = q_dbar.map(|q| q + 1);
    // the threshold increases with q, so a lower bound on q bounds rho1 below
    let rho1 = {
        let q = rho_dprime.value().unwrap().to_u64().expect("small q");
        let v = BigInt::from(min_r_linear(q, &MultiDegree::single(2 * d as u32))?);
        match rho_dprime {
            Constant::Exact(_) => Constant::Exact(v),
            _ => Constant::AtLeast(v),
        }
    };
    let c_dbar = match c_external {
        Some(c) => Constant::Exact(BigInt::from(c)),
        None => Constant::Unknown,
    };
    let rho = match (&c_dbar, &rho1) {
        (Constant::Exact(c), Constant::Exact(r1)) => Constant::Exact(c.max(r1).clone() + 1),
        (Constant::Exact(c), Constant::AtLeast(r1)) => Constant::AtLeast(c.max(r1).clone() + 1),
        (_, r1) => Constant::AtLeast(r1.value().unwrap().clone() + 1),
    };
    Ok(ConstantsLedger { d, n, q_dbar, rho_dprime, rho1, c_dbar, rho })
}

/// Exponent vectors of degree `deg` in `n` variables, in descending
/// graded-lex order.
pub fn monomials_of_degree(n: usize, deg: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == n {
            cur[i] = left;
            out.push(cur.clone());
            cur[i] = 0;
            return;
        }
        for e in (0..=left).rev() {
            cur[i] = e;
            rec(n, i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    rec(n, 0, deg, &mut vec![0; n], &mut out);
    out
}

/// Exponents of degree `deg` forms in the adapted frame that vanish on the
/// plane `{Y = 0}`, i.e. have positive degree in the coordinates after `q`.
fn fibre_monomials(q: usize, r: usize, deg: u32) -> Vec<Vec<u32>> {
    monomials_of_degree(r + 1, deg).into_iter().filter(|e| e[q + 1..].iter().any(|&x| x > 0)).collect()
}

fn check_adapted<F: Field>(l0: &Subspace<F>) -> Result<(usize, usize), Error> {
    let q = l0.dim();
    let r = l0.ambient();
    let ctx = l0.basis().context();
    let coord = Subspace::<F>::coordinate(ctx, r, &(0..=q).collect::<Vec<_>>())?;
    if !coord.contains_subspace(l0) {
        return Err(Error::Usage("the plane is not the coordinate plane {Y = 0}; adapt the frame first".into()));
    }
    Ok((q, r))
}

/// Forms of the given degrees whose coefficients are drawn uniformly from
/// the field, each vanishing on `l0 = {Y_{q+1} = ... = Y_r = 0}`.
pub fn gen_fiber_generic<F: Field, R: Rng + ?Sized>(
    l0: &Subspace<F>,
    dbar: &MultiDegree,
    rng: &mut R,
) -> Result<Vec<Poly<F>>, Error> {
    let (q, r) = check_adapted(l0)?;
    let ctx = l0.basis().context().clone();
    let frame = Frame::adapted(q, r);
    Ok(dbar
        .degrees()
        .iter()
        .map(|&dj| {
            Poly::from_terms(
                &ctx,
                &frame,
                fibre_monomials(q, r, dj).into_iter().map(|e| (Monomial::new(&e), F::random(&ctx, &mut *rng))),
            )
        })
        .collect())
}

/// Same shape with every coefficient a fresh transcendental symbol
/// `b{j}_{k}`.
pub fn gen_fiber_transcendental(
    q: usize,
    r: usize,
    dbar: &MultiDegree,
) -> Result<(RatFnContext, Vec<Poly<RatFn>>), Error> {
    if q == 0 || q >= r {
        return Err(Error::Usage(format!("need 0 < q < r, got q = {q}, r = {r}")));
    }
    let shapes: Vec<Vec<Vec<u32>>> = dbar.degrees().iter().map(|&dj| fibre_monomials(q, r, dj)).collect();
    let names: Vec<String> = shapes
        .iter()
        .enumerate()
        .flat_map(|(j, s)| (0..s.len()).map(move |k| format!("b{j}_{k}")))
        .collect();
    let ctx = RatFnContext::unbounded(names)?;
    let frame: Arc<Frame> = Frame::adapted(q, r);
    let mut next = 0;
    let forms = shapes
        .into_iter()
        .map(|s| {
            Poly::from_terms(
                &ctx,
                &frame,
                s.into_iter().map(|e| {
                    let c = ctx.symbol(next);
                    next += 1;
                    (Monomial::new(&e), c)
                }),
            )
        })
        .collect();
    Ok((ctx, forms))
}

/// Coefficient vector of a form over `Q(b...)` whose coefficients are
/// linear in the symbols: one row per monomial, one column per symbol.
pub fn linear_coefficient_rows(g: &Poly<RatFn>) -> Option<Vec<Vec<Rational>>> {
    let n = g.context().symbols().len();
    let mut rows = Vec::new();
    for (_, c) in g.terms() {
        if !c.is_polynomial() {
            return None;
        }
        let inv = c.denom().constant_term().inv()?;
        let num = c.numer().scale(&inv);
        let mut row = vec![Rational::zero(&Q); n];
        for (m, v) in num.terms() {
            if m.degree() != 1 {
                return None;
            }
            let i = m.exps().iter().position(|&e| e == 1).unwrap();
            row[i] = v.clone();
        }
        rows.push(row);
    }
    Some(rows)
}
