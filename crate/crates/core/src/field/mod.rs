//! Exact coefficient fields.
//!
//! Three kinds of scalars are supported: rationals ([`Rational`]), residues
//! modulo an odd prime ([`Fp`]) and rational functions in named
//! transcendental symbols over the rationals ([`RatFn`]). All of them are
//! driven through the [`Field`] trait so that polynomial and linear-algebra
//! code is written once.

mod prime;
mod ratfn;
mod rational;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::poly::UniPoly;

pub use prime::{is_prime, Fp, PrimeField};
pub use ratfn::{RatFn, RatFnContext, DEFAULT_SYMBOL_LIMIT};
pub use rational::{Rational, Q};

/// An exact commutative field with a runtime context.
///
/// The context carries whatever is needed to build constants (the modulus of
/// a prime field, the symbol frame of a function field). Elements are
/// immutable values; arithmetic never mutates shared state.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    type Context: Clone + PartialEq + fmt::Debug + Send + Sync + 'static;

    fn context(&self) -> Self::Context;
    fn zero(ctx: &Self::Context) -> Self;
    fn one(ctx: &Self::Context) -> Self;
    fn from_i64(ctx: &Self::Context, n: i64) -> Self;
    fn from_bigint(ctx: &Self::Context, n: &BigInt) -> Self;
    fn is_zero(&self) -> bool;
    fn inv(&self) -> Option<Self>;

    /// Uniform draw for prime fields; small integers for characteristic zero.
    fn random<R: Rng + ?Sized>(ctx: &Self::Context, rng: &mut R) -> Self;

    /// Parses the text form produced by `Display`.
    fn parse(ctx: &Self::Context, s: &str) -> Result<Self, String>;

    /// Zero for characteristic zero.
    fn characteristic(ctx: &Self::Context) -> u64;

    /// Roots of `f` that lie in the field, with multiplicities.
    ///
    /// Fields without a root-finding procedure return an empty list.
    fn roots(_f: &UniPoly<Self>) -> Vec<(Self, u32)> {
        Vec::new()
    }

    /// Whether the printed form starts with a minus sign that can be hoisted
    /// into a `" - "` term separator.
    fn is_negative(&self) -> bool {
        false
    }

    fn is_one(&self) -> bool {
        *self == Self::one(&self.context())
    }

    fn checked_div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self.clone() * i)
    }

    fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.context());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * &base;
            }
            base = base.clone() * &base;
            e >>= 1;
        }
        acc
    }

    fn square(&self) -> Self {
        self.clone() * self
    }
}

/// Serializable description of a coefficient field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldSpec {
    Rationals,
    PrimeField { p: u64 },
    FunctionField { symbols: Vec<String> },
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "rationals"),
            FieldSpec::PrimeField { p } => write!(f, "prime:{p}"),
            FieldSpec::FunctionField { symbols } => write!(f, "Q({})", symbols.join(",")),
        }
    }
}

/// n! as a field element.
pub fn factorial<F: Field>(ctx: &F::Context, n: u32) -> F {
    (1..=n as i64).fold(F::one(ctx), |acc, k| acc * F::from_i64(ctx, k))
}

/// Forwards the by-reference operator impls onto the by-value ones.
macro_rules! forward_ref_ops {
    ($t:ty) => {
        impl<'a> std::ops::Add<&'a $t> for $t {
            type Output = $t;
            fn add(self, rhs: &'a $t) -> $t {
                self + rhs.clone()
            }
        }
        impl<'a> std::ops::Sub<&'a $t> for $t {
            type Output = $t;
            fn sub(self, rhs: &'a $t) -> $t {
                self - rhs.clone()
            }
        }
        impl<'a> std::ops::Mul<&'a $t> for $t {
            type Output = $t;
            fn mul(self, rhs: &'a $t) -> $t {
                self * rhs.clone()
            }
        }
    };
}
pub(crate) use forward_ref_ops;
