//! Resultants and a small solver for zero-dimensional polynomial systems.
//!
//! Variables are eliminated one at a time with Sylvester resultants; the
//! resulting univariate polynomial is solved in the coefficient field and
//! every candidate is lifted back by a univariate gcd, so extraneous roots
//! of the resultants are discarded.

use crate::field::Field;
use crate::poly::Poly;

/// Determinant of a square matrix of polynomials by fraction-free
/// (Bareiss) elimination.
pub fn determinant<F: Field>(mut m: Vec<Vec<Poly<F>>>) -> Poly<F> {
    let n = m.len();
    assert!(n > 0, "empty determinant");
    let zero = Poly::zero(m[0][0].context(), m[0][0].frame());
    let mut prev = Poly::one(zero.context(), zero.frame());
    let mut negate = false;
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else { return zero };
            m.swap(k, p);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// Sylvester resultant of `a` and `b` with respect to variable `var`.
pub fn resultant<F: Field>(a: &Poly<F>, b: &Poly<F>, var: usize) -> Poly<F> {
    let ca = a.coefficients_in(var);
    let cb = b.coefficients_in(var);
    let (m, n) = (ca.len() - 1, cb.len() - 1);
    let zero = Poly::zero(a.context(), a.frame());
    if m == 0 && n == 0 {
        return Poly::one(a.context(), a.frame());
    }
    if m == 0 {
        return a.pow(n as u32);
    }
    if n == 0 {
        return b.pow(m as u32);
    }
    let size = m + n;
    let mut rows = vec![vec![zero.clone(); size]; size];
    for i in 0..n {
        for (k, c) in ca.iter().rev().enumerate() {
            rows[i][i + k] = c.clone();
        }
    }
    for i in 0..m {
        for (k, c) in cb.iter().rev().enumerate() {
            rows[n + i][i + k] = c.clone();
        }
    }
    determinant(rows)
}

/// Solutions in the coefficient field of `eqs = 0` in the variables `vars`
/// (all other variables must be absent). Returns the values of `vars`, in
/// order, for each isolated solution found; an empty list when the system
/// is inconsistent, positive dimensional, or has no rational points.
pub fn solve_system<F: Field>(eqs: &[Poly<F>], vars: &[usize]) -> Vec<Vec<F>> {
    let eqs: Vec<Poly<F>> = eqs.iter().filter(|e| !e.is_zero()).cloned().collect();
    if eqs.iter().any(|e| e.is_constant()) {
        return Vec::new();
    }
    if vars.is_empty() {
        return if eqs.is_empty() { vec![Vec::new()] } else { Vec::new() };
    }
    if eqs.is_empty() {
        return Vec::new();
    }
    let x = *vars.last().unwrap();
    let rest = &vars[..vars.len() - 1];
    let candidates: Vec<Vec<F>> = if rest.is_empty() {
        vec![Vec::new()]
    } else {
        let with_x: Vec<&Poly<F>> = eqs.iter().filter(|e| e.degree_in(x) > 0).collect();
        let Some(pivot) = with_x.iter().min_by_key(|e| (e.degree_in(x), e.num_terms())).copied() else {
            return Vec::new();
        };
        let reduced: Vec<Poly<F>> = eqs
            .iter()
            .filter(|e| !std::ptr::eq(*e, pivot))
            .map(|e| if e.degree_in(x) == 0 { e.clone() } else { resultant(pivot, e, x) })
            .collect();
        if reduced.is_empty() {
            return Vec::new();
        }
        solve_system(&reduced, rest)
    };
    let mut out = Vec::new();
    for partial in candidates {
        let assignment: Vec<(usize, F)> = rest.iter().copied().zip(partial.iter().cloned()).collect();
        let mut g: Option<crate::poly::UniPoly<F>> = None;
        let mut consistent = true;
        for e in &eqs {
            let u = e.partial_eval(&assignment).to_uni(x).expect("only the lifted variable remains");
            if u.is_zero() {
                continue;
            }
            if u.degree() == Some(0) {
                consistent = false;
                break;
            }
            g = Some(match g {
                None => u.monic(),
                Some(prev) => prev.gcd(&u),
            });
        }
        let Some(g) = g.filter(|_| consistent) else { continue };
        if g.degree().unwrap_or(0) == 0 {
            continue;
        }
        for (root, _) in F::roots(&g) {
            let mut sol = partial.clone();
            sol.push(root);
            out.push(sol);
        }
    }
    out
}
