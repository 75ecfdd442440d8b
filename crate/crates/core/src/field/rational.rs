use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use super::Field;
use crate::poly::UniPoly;

/// Context of the rational numbers (carries no data).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Q;

/// A rational number in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: BigInt, den: BigInt) -> Rational {
        Rational(BigRational::new(num, den))
    }

    pub fn integer(n: i64) -> Rational {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn frac(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn abs(&self) -> Rational {
        Rational(self.0.abs())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::integer(n)
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}
impl<'a> Add<&'a Rational> for Rational {
    type Output = Rational;
    fn add(self, rhs: &'a Rational) -> Rational {
        Rational(self.0 + &rhs.0)
    }
}
impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        Rational(self.0 - rhs.0)
    }
}
impl<'a> Sub<&'a Rational> for Rational {
    type Output = Rational;
    fn sub(self, rhs: &'a Rational) -> Rational {
        Rational(self.0 - &rhs.0)
    }
}
impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        Rational(self.0 * rhs.0)
    }
}
impl<'a> Mul<&'a Rational> for Rational {
    type Output = Rational;
    fn mul(self, rhs: &'a Rational) -> Rational {
        Rational(self.0 * &rhs.0)
    }
}
impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Field for Rational {
    type Context = Q;

    fn context(&self) -> Q {
        Q
    }

    fn zero(_: &Q) -> Self {
        Rational(BigRational::zero())
    }

    fn one(_: &Q) -> Self {
        Rational(BigRational::one())
    }

    fn from_i64(_: &Q, n: i64) -> Self {
        Rational::integer(n)
    }

    fn from_bigint(_: &Q, n: &BigInt) -> Self {
        Rational(BigRational::from_integer(n.clone()))
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn is_one(&self) -> bool {
        self.0.is_one()
    }

    fn inv(&self) -> Option<Self> {
        if self.0.is_zero() {
            None
        } else {
            Some(Rational(self.0.recip()))
        }
    }

    fn random<R: Rng + ?Sized>(_: &Q, rng: &mut R) -> Self {
        Rational::integer(rng.random_range(-1000..=1000))
    }

    fn parse(_: &Q, s: &str) -> Result<Self, String> {
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = num.parse().map_err(|_| format!("invalid integer '{num}'"))?;
        let d: BigInt = den.parse().map_err(|_| format!("invalid integer '{den}'"))?;
        if d.is_zero() {
            return Err("zero denominator".into());
        }
        Ok(Rational::new(n, d))
    }

    fn characteristic(_: &Q) -> u64 {
        0
    }

    fn roots(f: &UniPoly<Self>) -> Vec<(Self, u32)> {
        rational_roots(f)
    }

    fn is_negative(&self) -> bool {
        self.0.is_negative()
    }
}

/// Rational roots by the rational root theorem.
///
/// Candidates u/v with u | a_0 and v | a_n are enumerated from the divisors
/// of the cleared integer polynomial. Trial division runs up to 10^6, so a
/// coefficient with two prime factors above that bound can hide roots.
fn rational_roots(f: &UniPoly<Rational>) -> Vec<(Rational, u32)> {
    let Some(deg) = f.degree() else { return Vec::new() };
    if deg == 0 {
        return Vec::new();
    }
    // strip the factor x^k first, 0 is a root of multiplicity k
    let coeffs = f.coeffs();
    let k = coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0);
    let mut out = Vec::new();
    if k > 0 {
        out.push((Rational::integer(0), k as u32));
    }
    let trimmed = &coeffs[k..];
    if trimmed.len() <= 1 {
        return out;
    }
    let lcm = trimmed.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = trimmed.iter().map(|c| (c.0.clone() * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let a0 = ints[0].abs();
    let an = ints[ints.len() - 1].abs();
    let nums = divisors(&a0);
    let dens = divisors(&an);
    let mut rest = UniPoly::from_coeffs(&Q, trimmed.to_vec());
    let mut candidates: Vec<Rational> = Vec::new();
    for u in &nums {
        for v in &dens {
            for sign in [1, -1] {
                let c = Rational::new(u * BigInt::from(sign), v.clone());
                if !candidates.contains(&c) {
                    candidates.push(c);
                }
            }
        }
    }
    candidates.sort();
    for c in candidates {
        let lin = UniPoly::from_coeffs(&Q, vec![-c.clone(), Rational::integer(1)]);
        let mut mult = 0;
        loop {
            if rest.degree().is_none_or(|d| d == 0) {
                break;
            }
            let (q, r) = rest.div_rem(&lin);
            if !r.is_zero() {
                break;
            }
            mult += 1;
            rest = q;
        }
        if mult > 0 {
            out.push((c, mult));
        }
    }
    out
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut primes: Vec<(BigInt, u32)> = Vec::new();
    let mut m = n.clone();
    if m.sign() == Sign::NoSign {
        return vec![BigInt::one()];
    }
    let mut p = BigInt::from(2u32);
    let limit = BigInt::from(1_000_000u32);
    while &p * &p <= m && p <= limit {
        let mut e = 0;
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        if e > 0 {
            primes.push((p.clone(), e));
        }
        p += 1;
    }
    if m > BigInt::one() {
        primes.push((m, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in primes {
        let mut next = Vec::new();
        for d in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        divs = next;
    }
    divs.sort();
    divs
}
