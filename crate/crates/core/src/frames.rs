//! Projective points, linear subspaces, coordinate changes and lines.

use std::sync::Arc;

use crate::error::Error;
use crate::field::Field;
use crate::linalg::Matrix;
use crate::poly::{Frame, Poly, UniPoly};

/// A point of P^r, stored with its first nonzero coordinate scaled to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjPoint<F: Field> {
    coords: Vec<F>,
}

impl<F: Field> ProjPoint<F> {
    pub fn new(coords: Vec<F>) -> Result<Self, Error> {
        let Some(lead) = coords.iter().find(|c| !c.is_zero()) else {
            return Err(Error::Usage("the zero vector is not a projective point".into()));
        };
        let inv = lead.inv().expect("nonzero element is invertible");
        Ok(ProjPoint { coords: coords.iter().map(|c| c.clone() * &inv).collect() })
    }

    /// Unit vector `e_i` in P^r.
    pub fn unit(ctx: &F::Context, r: usize, i: usize) -> Self {
        let mut coords = vec![F::zero(ctx); r + 1];
        coords[i] = F::one(ctx);
        ProjPoint { coords }
    }

    pub fn coords(&self) -> &[F] {
        &self.coords
    }

    /// Projective dimension of the ambient space.
    pub fn ambient(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn context(&self) -> F::Context {
        self.coords[0].context()
    }

    /// Index of the first nonzero coordinate (where the value is 1).
    pub fn pivot(&self) -> usize {
        self.coords.iter().position(|c| !c.is_zero()).unwrap()
    }

    /// Representative with coordinate `chart` equal to 1.
    pub fn in_chart(&self, chart: usize) -> Result<Vec<F>, Error> {
        let inv = self.coords[chart]
            .inv()
            .ok_or_else(|| Error::Chart(format!("coordinate {chart} vanishes at the point")))?;
        Ok(self.coords.iter().map(|c| c.clone() * &inv).collect())
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coords.iter().map(|c| c.to_string()).collect()
    }
}

/// Projective linear subspace given by a basis of full row rank.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<F: Field> {
    basis: Matrix<F>,
}

impl<F: Field> Subspace<F> {
    pub fn new(basis: Matrix<F>) -> Result<Self, Error> {
        if basis.nrows() == 0 {
            return Err(Error::InvalidSubspace("empty basis".into()));
        }
        let rank = basis.rank();
        if rank != basis.nrows() {
            return Err(Error::InvalidSubspace(format!("{} basis rows have rank {rank}", basis.nrows())));
        }
        Ok(Subspace { basis })
    }

    /// Span of the coordinate points `e_i`, `i` in `indices`.
    pub fn coordinate(ctx: &F::Context, r: usize, indices: &[usize]) -> Result<Self, Error> {
        let rows = indices
            .iter()
            .map(|&i| {
                let mut row = vec![F::zero(ctx); r + 1];
                row[i] = F::one(ctx);
                row
            })
            .collect();
        Subspace::new(Matrix::from_rows(ctx, r + 1, rows))
    }

    /// Common zero set of independent linear forms.
    pub fn from_dual(forms: Matrix<F>) -> Result<Self, Error> {
        if forms.rank() != forms.nrows() {
            return Err(Error::InvalidSubspace("dependent linear forms".into()));
        }
        let k = forms.kernel();
        if k.is_empty() {
            return Err(Error::InvalidSubspace("linear forms cut out the empty set".into()));
        }
        Subspace::new(Matrix::from_rows(forms.context(), forms.ncols(), k))
    }

    pub fn basis(&self) -> &Matrix<F> {
        &self.basis
    }

    /// Projective dimension.
    pub fn dim(&self) -> usize {
        self.basis.nrows() - 1
    }

    pub fn ambient(&self) -> usize {
        self.basis.ncols() - 1
    }

    /// Independent linear forms vanishing on the subspace.
    pub fn dual(&self) -> Matrix<F> {
        let k = self.basis.kernel();
        Matrix::from_rows(self.basis.context(), self.basis.ncols(), k)
    }

    pub fn contains_point(&self, x: &ProjPoint<F>) -> bool {
        x.coords.len() == self.basis.ncols()
            && self.basis.vstack(&Matrix::from_rows(self.basis.context(), x.coords.len(), vec![x.coords.clone()])).rank()
                == self.basis.nrows()
    }

    pub fn contains_subspace(&self, other: &Subspace<F>) -> bool {
        other.basis.ncols() == self.basis.ncols() && self.basis.vstack(&other.basis).rank() == self.basis.nrows()
    }

    /// Image under a coordinate change.
    pub fn transform(&self, t: &Transform<F>) -> Subspace<F> {
        let image = self.basis.mul(&t.matrix.transpose());
        Subspace { basis: image }
    }

    /// True when `g` vanishes identically on the subspace.
    pub fn annihilates(&self, g: &Poly<F>) -> bool {
        let k = self.basis.nrows();
        let frame = Frame::indexed("u", k);
        let ctx = self.basis.context();
        // x = sum_i u_i * basis_i
        let images: Vec<Poly<F>> = (0..self.basis.ncols())
            .map(|j| Poly::linear_form(ctx, &frame, &(0..k).map(|i| self.basis.get(i, j).clone()).collect::<Vec<_>>()))
            .collect();
        g.substitute(&images).map(|p| p.is_zero()).unwrap_or(false)
    }
}

/// Invertible change of homogeneous coordinates `x -> M x`.
#[derive(Clone, Debug, PartialEq)]
pub struct Transform<F: Field> {
    matrix: Matrix<F>,
    inverse: Matrix<F>,
}

impl<F: Field> Transform<F> {
    pub fn new(matrix: Matrix<F>) -> Result<Self, Error> {
        let inverse = matrix.inverse()?;
        Ok(Transform { matrix, inverse })
    }

    pub fn identity(ctx: &F::Context, n: usize) -> Self {
        Transform { matrix: Matrix::identity(ctx, n), inverse: Matrix::identity(ctx, n) }
    }

    pub fn matrix(&self) -> &Matrix<F> {
        &self.matrix
    }

    pub fn inverse_matrix(&self) -> &Matrix<F> {
        &self.inverse
    }

    pub fn inverse(&self) -> Transform<F> {
        Transform { matrix: self.inverse.clone(), inverse: self.matrix.clone() }
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &Transform<F>) -> Transform<F> {
        Transform { matrix: self.matrix.mul(&first.matrix), inverse: first.inverse.mul(&self.inverse) }
    }

    pub fn apply_point(&self, x: &ProjPoint<F>) -> ProjPoint<F> {
        ProjPoint::new(self.matrix.mul_vec(&x.coords)).expect("invertible map sends points to points")
    }

    /// The polynomial `g o M^{-1}` in the new coordinates, so that
    /// `apply_poly(g)(M x) = g(x)`.
    pub fn apply_poly(&self, g: &Poly<F>) -> Result<Poly<F>, Error> {
        linear_substitute(g, &self.inverse)
    }

    /// The polynomial `g o M`.
    pub fn pull_back(&self, g: &Poly<F>) -> Result<Poly<F>, Error> {
        linear_substitute(g, &self.matrix)
    }
}

/// Substitutes `x_i -> sum_j m[i][j] x_j`.
pub fn linear_substitute<F: Field>(g: &Poly<F>, m: &Matrix<F>) -> Result<Poly<F>, Error> {
    if m.nrows() != g.nvars() || m.ncols() != g.nvars() {
        return Err(Error::Usage(format!("a {}x{} matrix cannot act on {} variables", m.nrows(), m.ncols(), g.nvars())));
    }
    let images: Vec<Poly<F>> = (0..m.nrows()).map(|i| Poly::linear_form(g.context(), g.frame(), m.row(i))).collect();
    g.substitute(&images)
}

/// Coordinate change sending `l0` onto `{x_{q+1} = ... = x_r = 0}`.
///
/// The basis of `l0` is brought to reduced row echelon form and completed
/// by the unit vectors of the non-pivot columns; the resulting matrix `A`
/// maps the first q+1 unit vectors onto `l0`, and the transform is `A^{-1}`.
pub fn adapt_frame<F: Field>(l0: &Subspace<F>, q: usize, r: usize) -> Result<Transform<F>, Error> {
    if l0.dim() != q || l0.ambient() != r {
        return Err(Error::InvalidSubspace(format!(
            "expected a {q}-plane in P^{r}, got a {}-plane in P^{}",
            l0.dim(),
            l0.ambient()
        )));
    }
    let ctx = l0.basis.context().clone();
    let (rref, pivots) = l0.basis.rref();
    if pivots.len() != q + 1 {
        return Err(Error::InvalidSubspace("rank-deficient basis".into()));
    }
    let mut cols: Vec<Vec<F>> = (0..=q).map(|i| rref.row(i).to_vec()).collect();
    for j in (0..=r).filter(|j| !pivots.contains(j)) {
        let mut e = vec![F::zero(&ctx); r + 1];
        e[j] = F::one(&ctx);
        cols.push(e);
    }
    let a = Matrix::from_rows(&ctx, r + 1, cols).transpose();
    Ok(Transform::new(a)?.inverse())
}

/// `g(eta + t xi)` as a polynomial in `t`.
pub fn line_restrict<F: Field>(g: &Poly<F>, eta: &ProjPoint<F>, xi: &ProjPoint<F>) -> Result<UniPoly<F>, Error> {
    if eta.coords.len() != g.nvars() || xi.coords.len() != g.nvars() {
        return Err(Error::Usage("point dimension does not match the frame".into()));
    }
    if eta == xi {
        return Err(Error::degenerate("degenerate-line", "the two points coincide, they span no line"));
    }
    Ok(restrict_vectors(g, &eta.coords, &xi.coords))
}

/// `g(a + t b)` for raw coordinate vectors.
pub fn restrict_vectors<F: Field>(g: &Poly<F>, a: &[F], b: &[F]) -> UniPoly<F> {
    let ctx = g.context();
    let values: Vec<UniPoly<F>> = a.iter().zip(b).map(|(x, y)| UniPoly::linear(ctx, x.clone(), y.clone())).collect();
    g.eval_in(&values, &UniPoly::constant(ctx, F::one(ctx)))
}

/// Frame `X0..X{r}` shared by tests and examples.
pub fn projective_frame(r: usize) -> Arc<Frame> {
    Frame::indexed("X", r + 1)
}
