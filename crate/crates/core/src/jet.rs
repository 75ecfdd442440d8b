//! First-order jets (value plus gradient with respect to a fixed list of
//! parameters) and truncated polynomials in one variable with jet
//! coefficients. Evaluating a form at jets gives exact partial derivatives
//! without building symbolic expressions.

use crate::field::Field;
use crate::poly::Algebra;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet<F: Field> {
    pub value: F,
    pub grad: Vec<F>,
}

impl<F: Field> Jet<F> {
    pub fn constant(value: F, n: usize) -> Self {
        let z = F::zero(&value.context());
        Jet { value, grad: vec![z; n] }
    }

    /// The parameter with index `i` at the sample `value`.
    pub fn variable(value: F, i: usize, n: usize) -> Self {
        let ctx = value.context();
        let mut j = Jet::constant(value, n);
        j.grad[i] = F::one(&ctx);
        j
    }

    pub fn nparams(&self) -> usize {
        self.grad.len()
    }

    pub fn add(&self, o: &Self) -> Self {
        Jet { value: self.value.clone() + &o.value, grad: self.grad.iter().zip(&o.grad).map(|(a, b)| a.clone() + b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Jet { value: self.value.clone() - &o.value, grad: self.grad.iter().zip(&o.grad).map(|(a, b)| a.clone() - b).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let grad = self.grad.iter().zip(&o.grad).map(|(a, b)| a.clone() * &o.value + self.value.clone() * b).collect();
        Jet { value: self.value.clone() * &o.value, grad }
    }

    pub fn scale(&self, c: &F) -> Self {
        Jet { value: self.value.clone() * c, grad: self.grad.iter().map(|a| a.clone() * c).collect() }
    }

    pub fn neg(&self) -> Self {
        Jet { value: -self.value.clone(), grad: self.grad.iter().map(|a| -a.clone()).collect() }
    }

    /// `None` when the value vanishes.
    pub fn inv(&self) -> Option<Self> {
        let vi = self.value.inv()?;
        let f = -(vi.clone() * &vi);
        Some(Jet { value: vi, grad: self.grad.iter().map(|a| a.clone() * &f).collect() })
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        Some(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Jet::constant(F::one(&self.value.context()), self.nparams());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

impl<F: Field> Algebra<F> for Jet<F> {
    fn one_like(&self) -> Self {
        Jet::constant(F::one(&self.value.context()), self.nparams())
    }
    fn zero_like(&self) -> Self {
        Jet::constant(F::zero(&self.value.context()), self.nparams())
    }
    fn mul(&self, other: &Self) -> Self {
        Jet::mul(self, other)
    }
    fn add_scaled(&mut self, other: &Self, c: &F) {
        self.value = self.value.clone() + other.value.clone() * c;
        for (a, b) in self.grad.iter_mut().zip(&other.grad) {
            *a = a.clone() + b.clone() * c;
        }
    }
}

/// `Σ_{k <= cap} c_k t^k` with jet coefficients; products are truncated
/// above `t^cap`.
#[derive(Clone, Debug, PartialEq)]
pub struct JetPoly<F: Field> {
    coeffs: Vec<Jet<F>>,
}

impl<F: Field> JetPoly<F> {
    /// `c0 + c1 t` truncated at degree `cap`.
    pub fn linear(c0: Jet<F>, c1: Jet<F>, cap: usize) -> Self {
        let zero = Algebra::zero_like(&c0);
        let mut coeffs = vec![zero; cap + 1];
        coeffs[0] = c0;
        if cap >= 1 {
            coeffs[1] = c1;
        }
        JetPoly { coeffs }
    }

    pub fn cap(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &Jet<F> {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[Jet<F>] {
        &self.coeffs
    }
}

impl<F: Field> Algebra<F> for JetPoly<F> {
    fn one_like(&self) -> Self {
        let mut z = self.zero_like();
        z.coeffs[0] = self.coeffs[0].one_like();
        z
    }
    fn zero_like(&self) -> Self {
        JetPoly { coeffs: vec![self.coeffs[0].zero_like(); self.coeffs.len()] }
    }
    fn mul(&self, other: &Self) -> Self {
        let cap = self.cap();
        let mut out = self.zero_like();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.value.is_zero() && a.grad.iter().all(|g| g.is_zero()) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(cap + 1 - i) {
                let p = Jet::mul(a, b);
                out.coeffs[i + j] = out.coeffs[i + j].add(&p);
            }
        }
        out
    }
    fn add_scaled(&mut self, other: &Self, c: &F) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            a.add_scaled(b, c);
        }
    }
}
