//! Dense univariate polynomials, used for line restrictions, curve
//! parametrizations and root finding.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::{Algebra, Frame, Monomial, Poly};
use crate::error::Error;
use crate::field::Field;

/// Coefficients stored low to high with no trailing zeros.
#[derive(Clone)]
pub struct UniPoly<F: Field> {
    ctx: F::Context,
    coeffs: Vec<F>,
}

impl<F: Field> PartialEq for UniPoly<F> {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.coeffs == other.coeffs
    }
}

impl<F: Field> fmt::Debug for UniPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniPoly({})", self)
    }
}

impl<F: Field> fmt::Display for UniPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly("t"))
    }
}

impl<F: Field> UniPoly<F> {
    pub fn from_coeffs(ctx: &F::Context, mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { ctx: ctx.clone(), coeffs }
    }

    pub fn zero(ctx: &F::Context) -> Self {
        UniPoly { ctx: ctx.clone(), coeffs: Vec::new() }
    }

    pub fn constant(ctx: &F::Context, c: F) -> Self {
        UniPoly::from_coeffs(ctx, vec![c])
    }

    /// `c * t^k`
    pub fn monomial(ctx: &F::Context, c: F, k: usize) -> Self {
        let mut coeffs = vec![F::zero(ctx); k];
        coeffs.push(c);
        UniPoly::from_coeffs(ctx, coeffs)
    }

    /// `a + b t`
    pub fn linear(ctx: &F::Context, a: F, b: F) -> Self {
        UniPoly::from_coeffs(ctx, vec![a, b])
    }

    pub fn context(&self) -> &F::Context {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> F {
        self.coeffs.get(i).cloned().unwrap_or_else(|| F::zero(&self.ctx))
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&F> {
        self.coeffs.last()
    }

    pub fn monic(&self) -> Self {
        match self.leading().and_then(|l| l.inv()) {
            Some(inv) => self.scale(&inv),
            None => self.clone(),
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        UniPoly::from_coeffs(&self.ctx, self.coeffs.iter().map(|a| a.clone() * c).collect())
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &F) -> F {
        self.coeffs.iter().rev().fold(F::zero(&self.ctx), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        UniPoly::from_coeffs(
            &self.ctx,
            self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c.clone() * F::from_i64(&self.ctx, i as i64)).collect(),
        )
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = UniPoly::constant(&self.ctx, F::one(&self.ctx));
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = divisor.leading().unwrap().inv().expect("leading coefficient is invertible");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (UniPoly::zero(&self.ctx), self.clone());
        }
        let mut quo = vec![F::zero(&self.ctx); rem.len() - dd];
        for i in (0..quo.len()).rev() {
            let c = rem[i + dd].clone() * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[i + j] = rem[i + j].clone() - c.clone() * dc;
            }
            quo[i] = c;
        }
        rem.truncate(dd);
        (UniPoly::from_coeffs(&self.ctx, quo), UniPoly::from_coeffs(&self.ctx, rem))
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `self^e mod m` by square and multiply.
    pub fn pow_mod(&self, mut e: u64, m: &Self) -> Self {
        let mut base = self.div_rem(m).1;
        let mut acc = UniPoly::constant(&self.ctx, F::one(&self.ctx)).div_rem(m).1;
        while e > 0 {
            if e & 1 == 1 {
                acc = (&acc * &base).div_rem(m).1;
            }
            base = (&base * &base).div_rem(m).1;
            e >>= 1;
        }
        acc
    }

    /// Multivariate copy in a one-variable frame.
    pub fn to_poly(&self, var: &str) -> Poly<F> {
        self.to_poly_in(&Frame::new([var]), 0)
    }

    /// Embeds as a polynomial in variable `var` of `frame`.
    pub fn to_poly_in(&self, frame: &Arc<Frame>, var: usize) -> Poly<F> {
        let n = frame.len();
        Poly::from_terms(
            &self.ctx,
            frame,
            self.coeffs.iter().enumerate().map(|(k, c)| {
                let mut e = vec![0u32; n];
                e[var] = k as u32;
                (Monomial::new(&e), c.clone())
            }),
        )
    }
}

impl<F: Field> Add for &UniPoly<F> {
    type Output = UniPoly<F>;
    fn add(self, rhs: &UniPoly<F>) -> UniPoly<F> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::from_coeffs(&self.ctx, (0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<F: Field> Sub for &UniPoly<F> {
    type Output = UniPoly<F>;
    fn sub(self, rhs: &UniPoly<F>) -> UniPoly<F> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::from_coeffs(&self.ctx, (0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<F: Field> Mul for &UniPoly<F> {
    type Output = UniPoly<F>;
    fn mul(self, rhs: &UniPoly<F>) -> UniPoly<F> {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero(&self.ctx);
        }
        let mut out = vec![F::zero(&self.ctx); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b;
            }
        }
        UniPoly::from_coeffs(&self.ctx, out)
    }
}

impl<F: Field> Add for UniPoly<F> {
    type Output = UniPoly<F>;
    fn add(self, rhs: UniPoly<F>) -> UniPoly<F> {
        &self + &rhs
    }
}

impl<F: Field> Sub for UniPoly<F> {
    type Output = UniPoly<F>;
    fn sub(self, rhs: UniPoly<F>) -> UniPoly<F> {
        &self - &rhs
    }
}

impl<F: Field> Mul for UniPoly<F> {
    type Output = UniPoly<F>;
    fn mul(self, rhs: UniPoly<F>) -> UniPoly<F> {
        &self * &rhs
    }
}

impl<F: Field> Neg for UniPoly<F> {
    type Output = UniPoly<F>;
    fn neg(self) -> UniPoly<F> {
        UniPoly::from_coeffs(&self.ctx, self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl<F: Field> Algebra<F> for UniPoly<F> {
    fn one_like(&self) -> Self {
        UniPoly::constant(&self.ctx, F::one(&self.ctx))
    }
    fn zero_like(&self) -> Self {
        UniPoly::zero(&self.ctx)
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn add_scaled(&mut self, other: &Self, c: &F) {
        if other.coeffs.len() > self.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), F::zero(&self.ctx));
        }
        for (i, o) in other.coeffs.iter().enumerate() {
            self.coeffs[i] = self.coeffs[i].clone() + o.clone() * c;
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }
}

/// Order of vanishing at zero, the cofactor and the roots found in the field.
#[derive(Clone, Debug, PartialEq)]
pub struct UniRootData<F: Field> {
    pub poly: UniPoly<F>,
    pub order_at_zero: u32,
    pub residual: UniPoly<F>,
    /// Roots of the residual, sorted in the field's canonical order.
    pub roots: Vec<(F, u32)>,
}

/// Splits `a = t^k * residual` with `residual(0) != 0` and finds the roots of
/// the residual that lie in the coefficient field.
pub fn uni_root_data<F: Field>(a: &UniPoly<F>) -> Result<UniRootData<F>, Error> {
    if a.is_zero() {
        return Err(Error::IdenticallyZero);
    }
    let k = a.coeffs.iter().position(|c| !c.is_zero()).unwrap();
    let residual = UniPoly::from_coeffs(&a.ctx, a.coeffs[k..].to_vec());
    let roots = F::roots(&residual);
    Ok(UniRootData { poly: a.clone(), order_at_zero: k as u32, residual, roots })
}
