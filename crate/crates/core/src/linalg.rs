//! Dense matrices over an exact field: elimination, rank, kernels, inverses.

use std::fmt;

use crate::error::Error;
use crate::field::Field;

#[derive(Clone, PartialEq)]
pub struct Matrix<F: Field> {
    ctx: F::Context,
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|c| c.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<F: Field> Matrix<F> {
    pub fn zeros(ctx: &F::Context, rows: usize, cols: usize) -> Self {
        Matrix { ctx: ctx.clone(), rows, cols, data: vec![F::zero(ctx); rows * cols] }
    }

    pub fn identity(ctx: &F::Context, n: usize) -> Self {
        let mut m = Matrix::zeros(ctx, n, n);
        for i in 0..n {
            m.set(i, i, F::one(ctx));
        }
        m
    }

    /// Rows must all have length `cols`.
    pub fn from_rows(ctx: &F::Context, cols: usize, rows: Vec<Vec<F>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r);
        }
        Matrix { ctx: ctx.clone(), rows: n, cols, data }
    }

    pub fn context(&self) -> &F::Context {
        &self.ctx
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Matrix::zeros(&self.ctx, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = Matrix::<F>::zeros(&self.ctx, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j).clone() + a.clone() * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(F::zero(&self.ctx), |acc, (a, b)| acc + a.clone() * b))
            .collect()
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { ctx: self.ctx.clone(), rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix<F>, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else { continue };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inv().unwrap();
            for j in c..m.cols {
                let v = m.get(r, j).clone() * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in c..m.cols {
                    let v = m.get(i, j).clone() - f.clone() * m.get(r, j);
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Rank by row reduction.
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Rank by a second, independent elimination order: fraction-free
    /// column elimination on the transpose, scanning pivots from the last
    /// row upwards.
    pub fn rank_alt(&self) -> usize {
        let mut m = self.transpose();
        let mut rank = 0;
        let mut used = vec![false; m.rows];
        for c in (0..m.cols).rev() {
            let Some(p) = (0..m.rows).rev().find(|&i| !used[i] && !m.get(i, c).is_zero()) else { continue };
            used[p] = true;
            rank += 1;
            let pv = m.get(p, c).clone();
            for i in 0..m.rows {
                if used[i] || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in 0..m.cols {
                    let v = m.get(i, j).clone() * &pv - f.clone() * m.get(p, j);
                    m.set(i, j, v);
                }
            }
        }
        rank
    }

    /// Basis of the right kernel `{v : M v = 0}`, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<F>> {
        let (r, pivots) = self.rref();
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![F::zero(&self.ctx); self.cols];
            v[free] = F::one(&self.ctx);
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -r.get(i, free).clone();
            }
            out.push(v);
        }
        out
    }

    /// Matrix whose columns are the kernel basis.
    pub fn kernel_matrix(&self) -> Matrix<F> {
        let k = self.kernel();
        Matrix::from_rows(&self.ctx, self.cols, k).transpose()
    }

    pub fn inverse(&self) -> Result<Matrix<F>, Error> {
        if self.rows != self.cols {
            return Err(Error::Singular);
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(&self.ctx, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, F::one(&self.ctx));
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        let mut inv = Matrix::zeros(&self.ctx, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Ok(inv)
    }

    /// Solves `M x = b`, returning one solution if the system is consistent.
    pub fn solve(&self, b: &[F]) -> Option<Vec<F>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(&self.ctx, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![F::zero(&self.ctx); self.cols];
        for (i, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(i, self.cols).clone();
        }
        Some(x)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..self.cols).all(|j| if i == j { self.get(i, j).is_one() } else { self.get(i, j).is_zero() }))
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|c| c.to_string()).collect()).collect()
    }
}
