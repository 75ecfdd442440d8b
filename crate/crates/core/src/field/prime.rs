use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::Rng;

use super::{forward_ref_ops, Field};
use crate::error::Error;
use crate::poly::UniPoly;

/// Context of the prime field F_p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    /// Moduli are odd primes below 2^62 so that products fit a `u128`
    /// comfortably and sums never overflow a `u64`.
    pub fn new(p: u64) -> Result<Self, Error> {
        if p < 3 || p.is_multiple_of(2) || p >= 1 << 62 || !is_prime(p) {
            return Err(Error::Config(format!("modulus {p} is not an odd prime below 2^62")));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn element(&self, v: u64) -> Fp {
        Fp { v: v % self.p, p: self.p }
    }

    pub fn from_i64(&self, n: i64) -> Fp {
        let r = n.rem_euclid(self.p as i64) as u64;
        Fp { v: r, p: self.p }
    }
}

/// A residue modulo p, always stored reduced in `[0, p)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    v: u64,
    p: u64,
}

impl Fp {
    pub fn value(&self) -> u64 {
        self.v
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Legendre symbol: 1, -1 or 0.
    pub fn legendre(&self) -> i32 {
        if self.v == 0 {
            return 0;
        }
        let e = Field::pow(self, (self.p - 1) / 2);
        if e.v == 1 {
            1
        } else {
            -1
        }
    }

    /// Tonelli–Shanks square root; `None` for non-residues.
    pub fn sqrt(&self) -> Option<Fp> {
        let p = self.p;
        if self.v == 0 {
            return Some(*self);
        }
        if self.legendre() != 1 {
            return None;
        }
        if p % 4 == 3 {
            return Some(Field::pow(self, (p + 1) / 4));
        }
        let mut q = p - 1;
        let mut s = 0u32;
        while q.is_multiple_of(2) {
            q /= 2;
            s += 1;
        }
        let ctx = PrimeField { p };
        let mut z = ctx.element(2);
        while z.legendre() != -1 {
            z = z + ctx.element(1);
        }
        let mut m = s;
        let mut c = Field::pow(&z, q);
        let mut t = Field::pow(self, q);
        let mut r = Field::pow(self, q.div_ceil(2));
        while t.v != 1 {
            let mut i = 0u32;
            let mut t2 = t;
            while t2.v != 1 {
                t2 = t2 * t2;
                i += 1;
            }
            let b = Field::pow(&c, 1u64 << (m - i - 1));
            m = i;
            c = b * b;
            t = t * c;
            r = r * b;
        }
        Some(r)
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.v, self.p)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        debug_assert_eq!(self.p, rhs.p);
        let s = self.v + rhs.v;
        Fp { v: if s >= self.p { s - self.p } else { s }, p: self.p }
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        debug_assert_eq!(self.p, rhs.p);
        let v = if self.v >= rhs.v { self.v - rhs.v } else { self.v + self.p - rhs.v };
        Fp { v, p: self.p }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        debug_assert_eq!(self.p, rhs.p);
        Fp { v: ((self.v as u128 * rhs.v as u128) % self.p as u128) as u64, p: self.p }
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp { v: if self.v == 0 { 0 } else { self.p - self.v }, p: self.p }
    }
}

forward_ref_ops!(Fp);

impl Field for Fp {
    type Context = PrimeField;

    fn context(&self) -> PrimeField {
        PrimeField { p: self.p }
    }

    fn zero(ctx: &PrimeField) -> Self {
        Fp { v: 0, p: ctx.p }
    }

    fn one(ctx: &PrimeField) -> Self {
        Fp { v: 1, p: ctx.p }
    }

    fn from_i64(ctx: &PrimeField, n: i64) -> Self {
        ctx.from_i64(n)
    }

    fn from_bigint(ctx: &PrimeField, n: &BigInt) -> Self {
        let r = n.mod_floor(&BigInt::from(ctx.p));
        Fp { v: r.to_u64().expect("reduced residue fits u64"), p: ctx.p }
    }

    fn is_zero(&self) -> bool {
        self.v == 0
    }

    fn is_one(&self) -> bool {
        self.v == 1
    }

    fn inv(&self) -> Option<Self> {
        if self.v == 0 {
            return None;
        }
        // extended Euclid on i128 to stay exact for moduli up to 2^62
        let (mut a, mut b) = (self.v as i128, self.p as i128);
        let (mut x0, mut x1) = (1i128, 0i128);
        while b != 0 {
            let q = a / b;
            (a, b) = (b, a - q * b);
            (x0, x1) = (x1, x0 - q * x1);
        }
        debug_assert_eq!(a, 1);
        Some(Fp { v: x0.rem_euclid(self.p as i128) as u64, p: self.p })
    }

    fn random<R: Rng + ?Sized>(ctx: &PrimeField, rng: &mut R) -> Self {
        Fp { v: rng.random_range(0..ctx.p), p: ctx.p }
    }

    fn parse(ctx: &PrimeField, s: &str) -> Result<Self, String> {
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (s, None),
        };
        let n: BigInt = num.parse().map_err(|_| format!("invalid integer '{num}'"))?;
        let mut x = Fp::from_bigint(ctx, &n);
        if let Some(d) = den {
            let d: BigInt = d.parse().map_err(|_| format!("invalid integer '{d}'"))?;
            let d = Fp::from_bigint(ctx, &d);
            x = x.checked_div(&d).ok_or_else(|| "denominator vanishes modulo p".to_string())?;
        }
        Ok(x)
    }

    fn characteristic(ctx: &PrimeField) -> u64 {
        ctx.p
    }

    fn roots(f: &UniPoly<Self>) -> Vec<(Self, u32)> {
        prime_roots(f)
    }

    fn pow(&self, mut e: u64) -> Self {
        let mut base = *self;
        let mut acc = Fp { v: 1 % self.p, p: self.p };
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(small) {
            return n == small;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// All roots in F_p with multiplicities.
///
/// The distinct-root part is isolated as gcd(f, x^p - x); it is then split
/// into linear factors with gcd((x + a)^((p-1)/2) - 1, g) for a = 0, 1, ...
fn prime_roots(f: &UniPoly<Fp>) -> Vec<(Fp, u32)> {
    if f.degree().is_none_or(|d| d == 0) {
        return Vec::new();
    }
    let ctx = *f.context();
    let p = ctx.modulus();
    let monic = f.monic();
    let x = UniPoly::monomial(&ctx, Fp::one(&ctx), 1);
    let xp = x.pow_mod(p, &monic);
    let split = monic.gcd(&(xp - x));
    let mut linear = Vec::new();
    equal_degree_split(&split, 0, &mut linear);
    let mut out: Vec<(Fp, u32)> = linear
        .into_iter()
        .map(|root| {
            let mut mult = 0;
            let mut rest = monic.clone();
            let lin = UniPoly::from_coeffs(&ctx, vec![-root, Fp::one(&ctx)]);
            loop {
                let (q, r) = rest.div_rem(&lin);
                if !r.is_zero() {
                    break;
                }
                mult += 1;
                rest = q;
            }
            (root, mult)
        })
        .collect();
    out.sort_by_key(|(r, _)| r.value());
    debug_assert!(out.iter().all(|(_, m)| *m > 0));
    out
}

fn equal_degree_split(g: &UniPoly<Fp>, shift: u64, out: &mut Vec<Fp>) {
    let ctx = *g.context();
    let p = ctx.modulus();
    match g.degree() {
        None | Some(0) => {}
        Some(1) => out.push(-g.monic().coeff(0)),
        Some(deg) => {
            for a in shift..shift + p {
                let lin = UniPoly::from_coeffs(&ctx, vec![ctx.element(a), Fp::one(&ctx)]);
                let h = lin.pow_mod((p - 1) / 2, g) - UniPoly::constant(&ctx, Fp::one(&ctx));
                let d = g.gcd(&h);
                let dd = d.degree().unwrap_or(0);
                if dd > 0 && dd < deg {
                    let (other, _) = g.div_rem(&d);
                    equal_degree_split(&d, a + 1, out);
                    equal_degree_split(&other, a + 1, out);
                    return;
                }
            }
            unreachable!("a product of distinct linear factors always splits for some shift");
        }
    }
}
