//! Sparse multivariate polynomials over an exact [`Field`].
//!
//! Terms live in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! graded lexicographic on the frame, so two equal polynomials always have
//! identical term sequences and identical printed forms. Zero coefficients
//! are never stored.

mod text;
mod uni;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::Error;
use crate::field::Field;

pub use text::parse_header;
pub use uni::{uni_root_data, UniPoly, UniRootData};

/// Ordered list of variable names a polynomial is written in.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Frame {
    names: Vec<String>,
}

impl Frame {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Arc<Frame> {
        Arc::new(Frame { names: names.into_iter().map(Into::into).collect() })
    }

    /// `X0, X1, ..., X{n-1}`.
    pub fn indexed(prefix: &str, n: usize) -> Arc<Frame> {
        Frame::new((0..n).map(|i| format!("{prefix}{i}")))
    }

    /// Coordinates adapted to a q-plane in P^r: `Z0..Zq, Y{q+1}..Y{r}`.
    pub fn adapted(q: usize, r: usize) -> Arc<Frame> {
        Frame::new((0..=r).map(|i| if i <= q { format!("Z{i}") } else { format!("Y{i}") }))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn header(&self) -> String {
        format!("vars: {}", self.names.join(","))
    }
}

fn same_frame(a: &Arc<Frame>, b: &Arc<Frame>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Exponent vector with its total degree cached.
///
/// The derived ordering compares the degree first and then the exponents
/// lexicographically, which is exactly graded lex with `x0 > x1 > ...`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    deg: u32,
    exps: SmallVec<[u32; 12]>,
}

impl Monomial {
    pub fn new(exps: &[u32]) -> Monomial {
        Monomial { deg: exps.iter().sum(), exps: SmallVec::from_slice(exps) }
    }

    pub fn one(n: usize) -> Monomial {
        Monomial { deg: 0, exps: SmallVec::from_elem(0, n) }
    }

    pub fn var(n: usize, i: usize) -> Monomial {
        let mut m = Monomial::one(n);
        m.exps[i] = 1;
        m.deg = 1;
        m
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.exps[i]
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            deg: self.deg + other.deg,
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
        }
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut exps = SmallVec::with_capacity(self.exps.len());
        for (a, b) in self.exps.iter().zip(&other.exps) {
            exps.push(a.checked_sub(*b)?);
        }
        Some(Monomial { deg: self.deg - other.deg, exps })
    }

    fn with_exp(&self, i: usize, e: u32) -> Monomial {
        let mut m = self.clone();
        m.deg = m.deg - m.exps[i] + e;
        m.exps[i] = e;
        m
    }
}

/// A ring in which a polynomial over `F` can be evaluated.
///
/// Implemented by the field itself (point evaluation), by dense univariate
/// polynomials (restriction to a line) and by jets (first-order derivatives).
pub trait Algebra<F: Field>: Clone {
    fn one_like(&self) -> Self;
    fn zero_like(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    /// `self += c * other`
    fn add_scaled(&mut self, other: &Self, c: &F);
}

impl<F: Field> Algebra<F> for F {
    fn one_like(&self) -> Self {
        F::one(&self.context())
    }
    fn zero_like(&self) -> Self {
        F::zero(&self.context())
    }
    fn mul(&self, other: &Self) -> Self {
        self.clone() * other
    }
    fn add_scaled(&mut self, other: &Self, c: &F) {
        *self = self.clone() + other.clone() * c;
    }
}

/// Sparse multivariate polynomial.
#[derive(Clone)]
pub struct Poly<F: Field> {
    ctx: F::Context,
    frame: Arc<Frame>,
    terms: BTreeMap<Monomial, F>,
}

impl<F: Field> PartialEq for Poly<F> {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && same_frame(&self.frame, &other.frame) && self.terms == other.terms
    }
}

impl<F: Field> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]({})", self.frame.names.join(","), self)
    }
}

impl<F: Field> Poly<F> {
    pub fn zero(ctx: &F::Context, frame: &Arc<Frame>) -> Self {
        Poly { ctx: ctx.clone(), frame: frame.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ctx: &F::Context, frame: &Arc<Frame>, c: F) -> Self {
        let mut p = Poly::zero(ctx, frame);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(frame.len()), c);
        }
        p
    }

    pub fn one(ctx: &F::Context, frame: &Arc<Frame>) -> Self {
        Poly::constant(ctx, frame, F::one(ctx))
    }

    pub fn var(ctx: &F::Context, frame: &Arc<Frame>, i: usize) -> Self {
        assert!(i < frame.len(), "variable index {i} outside frame of size {}", frame.len());
        let mut p = Poly::zero(ctx, frame);
        p.terms.insert(Monomial::var(frame.len(), i), F::one(ctx));
        p
    }

    pub fn monomial(ctx: &F::Context, frame: &Arc<Frame>, exps: &[u32], c: F) -> Self {
        assert_eq!(exps.len(), frame.len(), "exponent vector length must match the frame");
        let mut p = Poly::zero(ctx, frame);
        if !c.is_zero() {
            p.terms.insert(Monomial::new(exps), c);
        }
        p
    }

    /// Builds a polynomial from terms, merging repeated monomials.
    pub fn from_terms(ctx: &F::Context, frame: &Arc<Frame>, terms: impl IntoIterator<Item = (Monomial, F)>) -> Self {
        let mut p = Poly::zero(ctx, frame);
        for (m, c) in terms {
            debug_assert_eq!(m.exps.len(), frame.len());
            p.add_term(m, c);
        }
        p
    }

    /// Linear form `sum c_i x_i`.
    pub fn linear_form(ctx: &F::Context, frame: &Arc<Frame>, coeffs: &[F]) -> Self {
        let n = frame.len();
        Poly::from_terms(ctx, frame, coeffs.iter().enumerate().map(|(i, c)| (Monomial::var(n, i), c.clone())))
    }

    pub fn context(&self) -> &F::Context {
        &self.ctx
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn nvars(&self) -> usize {
        self.frame.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &F)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> F {
        self.terms.get(&Monomial::new(exps)).cloned().unwrap_or_else(|| F::zero(&self.ctx))
    }

    pub fn constant_term(&self) -> F {
        self.coeff(&vec![0; self.nvars()])
    }

    /// Leading term in graded lex.
    pub fn leading(&self) -> Option<(&Monomial, &F)> {
        self.terms.iter().next_back()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.deg == 0)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.deg)
    }

    /// Degree `n` if every term has total degree `n`; `None` for zero or
    /// inhomogeneous polynomials.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let first = self.terms.keys().next()?.deg;
        (self.terms.keys().next_back()?.deg == first).then_some(first)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.exps[var]).max().unwrap_or(0)
    }

    /// Indices of variables that actually occur.
    pub fn support(&self) -> Vec<usize> {
        (0..self.nvars()).filter(|&i| self.terms.keys().any(|m| m.exps[i] > 0)).collect()
    }

    fn add_term(&mut self, m: Monomial, c: F) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_compatible(&self, other: &Poly<F>) -> Result<(), Error> {
        if self.ctx != other.ctx {
            return Err(Error::Usage("polynomials live over different fields".into()));
        }
        if !same_frame(&self.frame, &other.frame) {
            return Err(Error::Usage(format!(
                "frame mismatch: [{}] vs [{}]",
                self.frame.names.join(","),
                other.frame.names.join(",")
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Poly<F>) -> Result<Poly<F>, Error> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Poly<F>) -> Result<Poly<F>, Error> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Poly<F>) -> Result<Poly<F>, Error> {
        self.check_compatible(other)?;
        let mut out = Poly::zero(&self.ctx, &self.frame);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &F) -> Poly<F> {
        if c.is_zero() {
            return Poly::zero(&self.ctx, &self.frame);
        }
        Poly {
            ctx: self.ctx.clone(),
            frame: self.frame.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v.clone() * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &F) -> Poly<F> {
        let mut out = Poly::zero(&self.ctx, &self.frame);
        if c.is_zero() {
            return out;
        }
        out.terms = self.terms.iter().map(|(k, v)| (k.mul(m), v.clone() * c)).collect();
        out
    }

    pub fn pow(&self, e: u32) -> Poly<F> {
        let mut acc = Poly::one(&self.ctx, &self.frame);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative with respect to variable `var`.
    pub fn diff(&self, var: usize) -> Result<Poly<F>, Error> {
        if var >= self.nvars() {
            return Err(Error::Usage(format!("variable index {var} outside frame of size {}", self.nvars())));
        }
        let mut out = Poly::zero(&self.ctx, &self.frame);
        for (m, c) in &self.terms {
            let e = m.exps[var];
            if e == 0 {
                continue;
            }
            out.add_term(m.with_exp(var, e - 1), c.clone() * F::from_i64(&self.ctx, e as i64));
        }
        Ok(out)
    }

    /// Evaluates at a point of the field.
    pub fn eval(&self, point: &[F]) -> F {
        assert_eq!(point.len(), self.nvars(), "point dimension must match the frame");
        if self.is_zero() {
            return F::zero(&self.ctx);
        }
        self.eval_in(point, &F::one(&self.ctx))
    }

    /// Evaluates with each variable replaced by an element of an algebra
    /// over `F`. `unit` fixes the shape of the algebra (degree bound, number
    /// of jet slots, ...).
    pub fn eval_in<A: Algebra<F>>(&self, values: &[A], unit: &A) -> A {
        assert_eq!(values.len(), self.nvars(), "value count must match the frame");
        let one = unit.one_like();
        let mut powers: Vec<Vec<A>> = values.iter().map(|v| vec![one.clone(), v.clone()]).collect();
        for (i, v) in values.iter().enumerate() {
            let max = self.degree_in(i) as usize;
            while powers[i].len() <= max {
                let next = powers[i].last().unwrap().mul(v);
                powers[i].push(next);
            }
        }
        let mut acc = unit.zero_like();
        for (m, c) in &self.terms {
            let mut prod: Option<A> = None;
            for (i, &e) in m.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = &powers[i][e as usize];
                prod = Some(match prod {
                    None => pw.clone(),
                    Some(p) => p.mul(pw),
                });
            }
            match prod {
                None => acc.add_scaled(&one, c),
                Some(p) => acc.add_scaled(&p, c),
            }
        }
        acc
    }

    /// Substitutes `images[i]` for variable `i`; the result lives in the
    /// images' common frame.
    pub fn substitute(&self, images: &[Poly<F>]) -> Result<Poly<F>, Error> {
        if images.len() != self.nvars() {
            return Err(Error::Usage(format!(
                "substitution has {} images for {} variables",
                images.len(),
                self.nvars()
            )));
        }
        let Some(first) = images.first() else {
            return Ok(self.clone());
        };
        for img in images {
            first.check_compatible(img)?;
        }
        let unit = Poly::one(&first.ctx, &first.frame);
        Ok(self.eval_in(images, &unit))
    }

    /// Fixes some variables to field values; the frame is kept and those
    /// variables no longer occur.
    pub fn partial_eval(&self, assignment: &[(usize, F)]) -> Poly<F> {
        let mut out = Poly::zero(&self.ctx, &self.frame);
        for (m, c) in &self.terms {
            let mut c = c.clone();
            let mut m = m.clone();
            for (var, val) in assignment {
                let e = m.exps[*var];
                if e > 0 {
                    c = c * val.pow(e as u64);
                    m = m.with_exp(*var, 0);
                }
            }
            out.add_term(m, c);
        }
        out
    }

    /// Part of total degree exactly `deg`.
    pub fn homogeneous_part(&self, deg: u32) -> Poly<F> {
        Poly {
            ctx: self.ctx.clone(),
            frame: self.frame.clone(),
            terms: self.terms.iter().filter(|(m, _)| m.deg == deg).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Coefficients with respect to `var`: `self = sum_k out[k] * var^k`,
    /// where `out[k]` does not involve `var`.
    pub fn coefficients_in(&self, var: usize) -> Vec<Poly<F>> {
        let deg = self.degree_in(var) as usize;
        let mut out = vec![Poly::zero(&self.ctx, &self.frame); deg + 1];
        for (m, c) in &self.terms {
            let e = m.exps[var] as usize;
            out[e].terms.insert(m.with_exp(var, 0), c.clone());
        }
        out
    }

    /// Dense univariate form when only `var` occurs.
    pub fn to_uni(&self, var: usize) -> Option<UniPoly<F>> {
        let mut coeffs = vec![F::zero(&self.ctx); self.degree_in(var) as usize + 1];
        for (m, c) in &self.terms {
            if m.exps.iter().enumerate().any(|(i, &e)| i != var && e > 0) {
                return None;
            }
            coeffs[m.exps[var] as usize] = c.clone();
        }
        Some(UniPoly::from_coeffs(&self.ctx, coeffs))
    }

    /// Same exponents, another frame of equal length.
    pub fn reframe(&self, frame: &Arc<Frame>) -> Result<Poly<F>, Error> {
        if frame.len() != self.nvars() {
            return Err(Error::Usage("reframe needs a frame of the same length".into()));
        }
        Ok(Poly { ctx: self.ctx.clone(), frame: frame.clone(), terms: self.terms.clone() })
    }

    /// Moves the polynomial into a frame where variable `i` becomes
    /// `map[i]` of the target frame.
    pub fn embed(&self, frame: &Arc<Frame>, map: &[usize]) -> Poly<F> {
        assert_eq!(map.len(), self.nvars());
        let n = frame.len();
        Poly::from_terms(
            &self.ctx,
            frame,
            self.terms.iter().map(|(m, c)| {
                let mut exps = vec![0u32; n];
                for (i, &e) in m.exps.iter().enumerate() {
                    exps[map[i]] += e;
                }
                (Monomial::new(&exps), c.clone())
            }),
        )
    }

    /// Exact quotient `self / divisor`, or `None` if the division leaves a
    /// remainder.
    pub fn div_exact(&self, divisor: &Poly<F>) -> Option<Poly<F>> {
        self.check_compatible(divisor).ok()?;
        let (lm, lc) = divisor.leading()?;
        let lc_inv = lc.inv()?;
        let mut rem = self.clone();
        let mut quo = Poly::zero(&self.ctx, &self.frame);
        while let Some((m, c)) = rem.leading() {
            let qm = m.div(lm)?;
            let qc = c.clone() * &lc_inv;
            rem = &rem - &divisor.mul_monomial(&qm, &qc);
            quo.add_term(qm, qc);
        }
        Some(quo)
    }

    pub fn map_coeffs<G: Field>(&self, ctx: &G::Context, f: impl Fn(&F) -> G) -> Poly<G> {
        Poly::from_terms(ctx, &self.frame, self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }
}

macro_rules! poly_binop {
    ($tr:ident, $method:ident, $call:ident) => {
        impl<'a, F: Field> $tr<&'a Poly<F>> for &'a Poly<F> {
            type Output = Poly<F>;
            fn $method(self, rhs: &'a Poly<F>) -> Poly<F> {
                self.$call(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl<F: Field> $tr for Poly<F> {
            type Output = Poly<F>;
            fn $method(self, rhs: Poly<F>) -> Poly<F> {
                (&self).$call(&rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
    };
}

poly_binop!(Add, add, try_add);
poly_binop!(Sub, sub, try_sub);
poly_binop!(Mul, mul, try_mul);

impl<F: Field> Neg for &Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        Poly {
            ctx: self.ctx.clone(),
            frame: self.frame.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl<F: Field> Neg for Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        -&self
    }
}

impl<F: Field> Algebra<F> for Poly<F> {
    fn one_like(&self) -> Self {
        Poly::one(&self.ctx, &self.frame)
    }
    fn zero_like(&self) -> Self {
        Poly::zero(&self.ctx, &self.frame)
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn add_scaled(&mut self, other: &Self, c: &F) {
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v.clone() * c);
        }
    }
}
