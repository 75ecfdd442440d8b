use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;

use super::{forward_ref_ops, Field, Rational, Q};
use crate::error::Error;
use crate::poly::{Frame, Poly};

/// Configured function fields may use at most this many symbols; larger
/// experiments should run over a prime field.
pub const DEFAULT_SYMBOL_LIMIT: usize = 12;

/// The field Q(s_1, ..., s_k) of rational functions in named symbols.
#[derive(Clone, Debug)]
pub struct RatFnContext {
    symbols: Arc<Frame>,
}

impl PartialEq for RatFnContext {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.symbols, &other.symbols) || self.symbols == other.symbols
    }
}

impl RatFnContext {
    /// User-facing constructor, bounded by [`DEFAULT_SYMBOL_LIMIT`].
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self, Error> {
        let ctx = RatFnContext::unbounded(symbols)?;
        if ctx.symbols.len() > DEFAULT_SYMBOL_LIMIT {
            return Err(Error::Config(format!(
                "{} transcendental symbols requested, at most {DEFAULT_SYMBOL_LIMIT} are allowed; use a prime field",
                ctx.symbols.len()
            )));
        }
        Ok(ctx)
    }

    /// Internal constructor without the size limit, used where every
    /// coefficient stays polynomial (fresh-symbol generation).
    pub fn unbounded<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self, Error> {
        let symbols = Frame::new(symbols);
        for (i, s) in symbols.names().iter().enumerate() {
            if symbols.names()[..i].contains(s) {
                return Err(Error::Config(format!("duplicate transcendental symbol '{s}'")));
            }
        }
        Ok(RatFnContext { symbols })
    }

    pub fn symbols(&self) -> &Arc<Frame> {
        &self.symbols
    }

    /// The i-th symbol as a field element.
    pub fn symbol(&self, i: usize) -> RatFn {
        RatFn::from_poly(self, Poly::var(&Q, &self.symbols, i))
    }
}

/// A quotient of polynomials with rational coefficients.
///
/// The denominator is kept primitive with positive leading coefficient and
/// is cleared whenever it divides the numerator exactly. Values are not
/// reduced by a full gcd, so equality is decided by cross-multiplication.
#[derive(Clone)]
pub struct RatFn {
    ctx: RatFnContext,
    num: Poly<Rational>,
    den: Poly<Rational>,
}

impl RatFn {
    pub fn from_poly(ctx: &RatFnContext, num: Poly<Rational>) -> RatFn {
        let den = Poly::one(&Q, &ctx.symbols);
        RatFn { ctx: ctx.clone(), num, den }
    }

    pub fn new(ctx: &RatFnContext, num: Poly<Rational>, den: Poly<Rational>) -> Option<RatFn> {
        if den.is_zero() {
            return None;
        }
        Some(RatFn { ctx: ctx.clone(), num, den }.normalized())
    }

    pub fn numer(&self) -> &Poly<Rational> {
        &self.num
    }

    pub fn denom(&self) -> &Poly<Rational> {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    fn normalized(mut self) -> RatFn {
        if self.num.is_zero() {
            self.den = Poly::one(&Q, &self.ctx.symbols);
            return self;
        }
        if !self.den.is_constant() {
            if let Some(q) = self.num.div_exact(&self.den) {
                self.num = q;
                self.den = Poly::one(&Q, &self.ctx.symbols);
                return self;
            }
        }
        let c = content(&self.den);
        if !c.is_one() {
            let inv = c.inv().expect("content of a nonzero polynomial");
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
        self
    }
}

/// Rational content with the sign of the leading coefficient, so that
/// `p / content(p)` is primitive with positive leading coefficient.
fn content(p: &Poly<Rational>) -> Rational {
    let mut g = BigInt::zero();
    let mut l = BigInt::one();
    for (_, c) in p.terms() {
        g = g.gcd(c.numer());
        l = l.lcm(c.denom());
    }
    let c = Rational::new(g, l);
    match p.leading() {
        Some((_, lc)) if lc.is_negative() => -c,
        _ => c,
    }
}

impl PartialEq for RatFn {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && &self.num * &other.den == &other.num * &self.den
    }
}

impl fmt::Debug for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            let inv = self.den.constant_term().inv().expect("nonzero denominator");
            let num = self.num.scale(&inv);
            if num.is_constant() {
                write!(f, "{}", num.constant_term())
            } else {
                write!(f, "({num})")
            }
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl Add for RatFn {
    type Output = RatFn;
    fn add(self, rhs: RatFn) -> RatFn {
        if self.den == rhs.den {
            let num = &self.num + &rhs.num;
            return RatFn { ctx: self.ctx, num, den: self.den }.normalized();
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        let den = &self.den * &rhs.den;
        RatFn { ctx: self.ctx, num, den }.normalized()
    }
}

impl Sub for RatFn {
    type Output = RatFn;
    fn sub(self, rhs: RatFn) -> RatFn {
        self + (-rhs)
    }
}

impl Mul for RatFn {
    type Output = RatFn;
    fn mul(self, rhs: RatFn) -> RatFn {
        let num = &self.num * &rhs.num;
        let den = &self.den * &rhs.den;
        RatFn { ctx: self.ctx, num, den }.normalized()
    }
}

impl Neg for RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        RatFn { ctx: self.ctx, num: -self.num, den: self.den }
    }
}

forward_ref_ops!(RatFn);

impl Field for RatFn {
    type Context = RatFnContext;

    fn context(&self) -> RatFnContext {
        self.ctx.clone()
    }

    fn zero(ctx: &RatFnContext) -> Self {
        RatFn::from_poly(ctx, Poly::zero(&Q, &ctx.symbols))
    }

    fn one(ctx: &RatFnContext) -> Self {
        RatFn::from_poly(ctx, Poly::one(&Q, &ctx.symbols))
    }

    fn from_i64(ctx: &RatFnContext, n: i64) -> Self {
        RatFn::from_poly(ctx, Poly::constant(&Q, &ctx.symbols, Rational::integer(n)))
    }

    fn from_bigint(ctx: &RatFnContext, n: &BigInt) -> Self {
        RatFn::from_poly(ctx, Poly::constant(&Q, &ctx.symbols, Rational::from_bigint(&Q, n)))
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn inv(&self) -> Option<Self> {
        if self.num.is_zero() {
            return None;
        }
        Some(RatFn { ctx: self.ctx.clone(), num: self.den.clone(), den: self.num.clone() }.normalized())
    }

    /// Rational constants; genericity in this field comes from the symbols.
    fn random<R: Rng + ?Sized>(ctx: &RatFnContext, rng: &mut R) -> Self {
        RatFn::from_poly(ctx, Poly::constant(&Q, &ctx.symbols, Rational::random(&Q, rng)))
    }

    fn parse(ctx: &RatFnContext, s: &str) -> Result<Self, String> {
        let s = s.trim();
        let strip = |t: &str| -> Result<Poly<Rational>, String> {
            let t = t.trim();
            let inner = t.strip_prefix('(').and_then(|t| t.strip_suffix(')')).unwrap_or(t);
            Poly::parse(&Q, &ctx.symbols, inner).map_err(|e| e.to_string())
        };
        // split "(N)/(D)" at the top-level slash between groups
        let mut depth = 0i32;
        let mut split = None;
        for (i, c) in s.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                '/' if depth == 0 && s[..i].trim_end().ends_with(')') => {
                    split = Some(i);
                    break;
                }
                _ => {}
            }
        }
        match split {
            Some(i) => {
                let num = strip(&s[..i])?;
                let den = strip(&s[i + 1..])?;
                RatFn::new(ctx, num, den).ok_or_else(|| "zero denominator".to_string())
            }
            None => Ok(RatFn::from_poly(ctx, strip(s)?)),
        }
    }

    fn characteristic(_: &RatFnContext) -> u64 {
        0
    }

    fn is_negative(&self) -> bool {
        self.den.is_constant() && self.num.is_constant() && self.num.constant_term().is_negative()
    }
}
