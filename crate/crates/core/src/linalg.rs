//! Dense exact matrices with deterministic Gauss-Jordan elimination.
//!
//! Pivoting is always leftmost column, topmost remaining row, so every basis
//! derived here (kernels, row spaces, complements) is reproducible.

use alloc::vec;
use alloc::vec::Vec;

use crate::field::Field;
use crate::Error;

/// Row-major matrix over a field.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F: Field> {
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(f: &F, rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![f.zero(); rows * cols] }
    }

    pub fn identity(f: &F, n: usize) -> Self {
        let mut m = Self::zeros(f, n, n);
        for i in 0..n {
            m.data[i * n + i] = f.one();
        }
        m
    }

    pub fn from_elems(rows: usize, cols: usize, data: Vec<F::Elem>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows * cols");
        Matrix { rows, cols, data }
    }

    pub fn from_i64_rows(f: &F, rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols);
            data.extend(r.iter().map(|&v| f.from_i64(v)));
        }
        Matrix { rows: rows.len(), cols, data }
    }

    /// Builds a matrix whose rows are the given vectors.
    pub fn from_row_vecs(cols: usize, vecs: &[Vec<F::Elem>]) -> Self {
        let mut data = Vec::with_capacity(vecs.len() * cols);
        for v in vecs {
            assert_eq!(v.len(), cols);
            data.extend(v.iter().cloned());
        }
        Matrix { rows: vecs.len(), cols, data }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_col_vecs(f: &F, rows: usize, vecs: &[Vec<F::Elem>]) -> Self {
        let mut m = Self::zeros(f, rows, vecs.len());
        for (j, v) in vecs.iter().enumerate() {
            assert_eq!(v.len(), rows);
            for (i, x) in v.iter().enumerate() {
                m.data[i * vecs.len() + j] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F::Elem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F::Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<F::Elem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<F::Elem>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self, f: &F) -> bool {
        self.data.iter().all(|x| f.is_zero(x))
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn mul(&self, f: &F, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(f, self.rows, other.cols);
        let n = other.cols;
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                let orow = &other.data[k * n..(k + 1) * n];
                let drow = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in drow.iter_mut().zip(orow) {
                    if !f.is_zero(b) {
                        let p = f.mul(a, b);
                        *d = f.add(d, &p);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, f: &F, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matrix-vector product");
        (0..self.rows)
            .map(|i| {
                let mut acc = f.zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !f.is_zero(a) && !f.is_zero(b) {
                        let p = f.mul(a, b);
                        acc = f.add(&acc, &p);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, f: &F, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f.add(a, b)).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, f: &F, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f.sub(a, b)).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, f: &F, c: &F::Elem) -> Self {
        let data = self.data.iter().map(|a| f.mul(a, c)).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    /// Stacks blocks left to right; all blocks need the same row count.
    pub fn hstack(f: &F, rows: usize, blocks: &[&Self]) -> Self {
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(f, rows, cols);
        let mut off = 0;
        for b in blocks {
            assert_eq!(b.rows, rows);
            out.paste(b, 0, off);
            off += b.cols;
        }
        out
    }

    /// Stacks blocks top to bottom; all blocks need the same column count.
    pub fn vstack(f: &F, cols: usize, blocks: &[&Self]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut out = Self::zeros(f, rows, cols);
        let mut off = 0;
        for b in blocks {
            assert_eq!(b.cols, cols);
            out.paste(b, off, 0);
            off += b.rows;
        }
        out
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn paste(&mut self, block: &Self, r0: usize, c0: usize) {
        for i in 0..block.rows {
            let src = &block.data[i * block.cols..(i + 1) * block.cols];
            let start = (r0 + i) * self.cols + c0;
            self.data[start..start + block.cols].clone_from_slice(src);
        }
    }

    /// Extracts the rows `r0..r0+nr` and columns `c0..c0+nc`.
    pub fn block(&self, r0: usize, nr: usize, c0: usize, nc: usize) -> Self {
        let mut data = Vec::with_capacity(nr * nc);
        for i in r0..r0 + nr {
            data.extend_from_slice(&self.data[i * self.cols + c0..i * self.cols + c0 + nc]);
        }
        Matrix { rows: nr, cols: nc, data }
    }

    /// Keeps the listed columns in the given order.
    pub fn select_cols(&self, cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            for &j in cols {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix { rows: self.rows, cols: cols.len(), data }
    }

    /// Reduced row-echelon form and the ordered pivot columns. Zero rows are
    /// kept at the bottom so the shape is unchanged.
    pub fn rref(&self, f: &F) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place(f);
        (m, pivots)
    }

    fn rref_in_place(&mut self, f: &F) -> Vec<usize> {
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        let mut nz: Vec<usize> = Vec::new();
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !f.is_zero(&self.data[i * cols + c])) else {
                continue;
            };
            if p != r {
                for j in c..cols {
                    self.data.swap(p * cols + j, r * cols + j);
                }
            }
            let inv = f.inv(&self.data[r * cols + c]).expect("pivot is nonzero");
            if !f.is_one(&inv) {
                for j in c..cols {
                    let v = &self.data[r * cols + j];
                    if !f.is_zero(v) {
                        self.data[r * cols + j] = f.mul(v, &inv);
                    }
                }
            }
            nz.clear();
            nz.extend((c..cols).filter(|&j| !f.is_zero(&self.data[r * cols + j])));
            let pivot_row: Vec<F::Elem> = nz.iter().map(|&j| self.data[r * cols + j].clone()).collect();
            for i in 0..rows {
                if i == r {
                    continue;
                }
                let factor = self.data[i * cols + c].clone();
                if f.is_zero(&factor) {
                    continue;
                }
                for (k, &j) in nz.iter().enumerate() {
                    f.sub_mul_assign(&mut self.data[i * cols + j], &factor, &pivot_row[k]);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self, f: &F) -> usize {
        self.rref(f).1.len()
    }

    /// Basis of the right null space: one vector per free column, with a 1 in
    /// that column and zeros in the other free columns.
    pub fn kernel_basis(&self, f: &F) -> Vec<Vec<F::Elem>> {
        let (r, pivots) = self.rref(f);
        kernel_from_rref(f, &r, &pivots)
    }

    /// One solution of `self * x = b` (free variables zero), or `NoSolution`.
    pub fn preimage_solve(&self, f: &F, b: &[F::Elem]) -> Result<Vec<F::Elem>, Error> {
        assert_eq!(b.len(), self.rows, "right-hand side has wrong length");
        let aug = Matrix::hstack(f, self.rows, &[self, &Matrix::from_col_vecs(f, self.rows, &[b.to_vec()])]);
        let (r, pivots) = aug.rref(f);
        if pivots.last() == Some(&self.cols) {
            return Err(Error::NoSolution);
        }
        let mut x = vec![f.zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r.get(i, self.cols).clone();
        }
        Ok(x)
    }

    /// Solves `self * X = B` column by column; `NoSolution` if any column fails.
    pub fn preimage_solve_many(&self, f: &F, b: &Self) -> Result<Self, Error> {
        assert_eq!(b.rows, self.rows);
        let aug = Matrix::hstack(f, self.rows, &[self, b]);
        let (r, pivots) = aug.rref(f);
        if pivots.iter().any(|&p| p >= self.cols) {
            return Err(Error::NoSolution);
        }
        let mut x = Self::zeros(f, self.cols, b.cols);
        for (i, &p) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(p, j, r.get(i, self.cols + j).clone());
            }
        }
        Ok(x)
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self, f: &F) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        self.preimage_solve_many(f, &Self::identity(f, self.rows)).ok()
    }
}

fn kernel_from_rref<F: Field>(f: &F, r: &Matrix<F>, pivots: &[usize]) -> Vec<Vec<F::Elem>> {
    let cols = r.cols;
    let mut is_pivot = vec![false; cols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..cols).filter(|&j| !is_pivot[j]) {
        let mut v = vec![f.zero(); cols];
        v[free] = f.one();
        for (i, &p) in pivots.iter().enumerate() {
            let e = r.get(i, free);
            if !f.is_zero(e) {
                v[p] = f.neg(e);
            }
        }
        basis.push(v);
    }
    basis
}

/// A subspace of `F^n` held as the nonzero rows of a reduced row-echelon
/// matrix. Coordinates of a member vector are its entries at the pivots.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<F: Field> {
    ambient: usize,
    basis: Matrix<F>,
    pivots: Vec<usize>,
}

impl<F: Field> Subspace<F> {
    pub fn zero(f: &F, ambient: usize) -> Self {
        Subspace { ambient, basis: Matrix::zeros(f, 0, ambient), pivots: Vec::new() }
    }

    pub fn full(f: &F, ambient: usize) -> Self {
        Subspace { ambient, basis: Matrix::identity(f, ambient), pivots: (0..ambient).collect() }
    }

    /// Span of the rows of `m`.
    pub fn row_space(f: &F, m: &Matrix<F>) -> Self {
        let (r, pivots) = m.rref(f);
        let basis = r.block(0, pivots.len(), 0, m.cols);
        Subspace { ambient: m.cols, basis, pivots }
    }

    /// Span of the columns of `m`.
    pub fn column_space(f: &F, m: &Matrix<F>) -> Self {
        Self::row_space(f, &m.transpose())
    }

    /// Null space of `m` (a subspace of its column space dimension).
    pub fn kernel_of(f: &F, m: &Matrix<F>) -> Self {
        let k = m.kernel_basis(f);
        Self::row_space(f, &Matrix::from_row_vecs(m.cols, &k))
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Basis vectors as rows (`dim x ambient`).
    pub fn basis(&self) -> &Matrix<F> {
        &self.basis
    }

    /// Coordinates of a vector assumed to lie in the subspace.
    pub fn coords(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        self.pivots.iter().map(|&p| v[p].clone()).collect()
    }

    /// Reduces `v` modulo the subspace; the result vanishes at all pivots.
    pub fn reduce(&self, f: &F, v: &[F::Elem]) -> Vec<F::Elem> {
        let mut out = v.to_vec();
        for (i, &p) in self.pivots.iter().enumerate() {
            let c = out[p].clone();
            if f.is_zero(&c) {
                continue;
            }
            for (j, b) in self.basis.row(i).iter().enumerate() {
                if !f.is_zero(b) {
                    f.sub_mul_assign(&mut out[j], &c, b);
                }
            }
        }
        out
    }

    pub fn contains(&self, f: &F, v: &[F::Elem]) -> bool {
        self.reduce(f, v).iter().all(|x| f.is_zero(x))
    }

    pub fn contains_subspace(&self, f: &F, other: &Self) -> bool {
        (0..other.dim()).all(|i| self.contains(f, other.basis.row(i)))
    }

    /// Columns not occupied by pivots, which index a basis of the quotient.
    pub fn non_pivots(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ambient];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ambient).filter(|&j| !is_pivot[j]).collect()
    }

    /// Matrix (`dim x ambient`) that extracts coordinates of members.
    pub fn coord_matrix(&self, f: &F) -> Matrix<F> {
        let mut m = Matrix::zeros(f, self.dim(), self.ambient);
        for (i, &p) in self.pivots.iter().enumerate() {
            m.set(i, p, f.one());
        }
        m
    }

    /// Matrix (`ambient x dim`) whose columns are the basis vectors.
    pub fn inclusion_matrix(&self) -> Matrix<F> {
        self.basis.transpose()
    }

    /// Matrix of the projection onto the quotient by this subspace, in the
    /// basis given by `non_pivots`.
    pub fn quotient_matrix(&self, f: &F) -> Matrix<F> {
        let np = self.non_pivots();
        let mut q = Matrix::zeros(f, np.len(), self.ambient);
        let mut slot = vec![usize::MAX; self.ambient];
        for (k, &j) in np.iter().enumerate() {
            slot[j] = k;
            q.set(k, j, f.one());
        }
        for (i, &p) in self.pivots.iter().enumerate() {
            for (j, b) in self.basis.row(i).iter().enumerate() {
                if slot[j] != usize::MAX && !f.is_zero(b) {
                    q.set(slot[j], p, f.neg(b));
                }
            }
        }
        q
    }

    pub fn sum(&self, f: &F, other: &Self) -> Self {
        assert_eq!(self.ambient, other.ambient);
        Self::row_space(f, &Matrix::vstack(f, self.ambient, &[&self.basis, &other.basis]))
    }

    pub fn intersection(&self, f: &F, other: &Self) -> Self {
        // x = A^T a = B^T b  <=>  [A^T | -B^T] (a, b) = 0
        let at = self.basis.transpose();
        let bt = other.basis.transpose().scale(f, &f.from_i64(-1));
        let k = Matrix::hstack(f, self.ambient, &[&at, &bt]).kernel_basis(f);
        let vecs: Vec<Vec<F::Elem>> =
            k.iter().map(|v| at.mul_vec(f, &v[..self.dim()])).collect();
        Self::row_space(f, &Matrix::from_row_vecs(self.ambient, &vecs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    fn q(rows: &[Vec<i64>]) -> Matrix<Rationals> {
        Matrix::from_i64_rows(&Rationals, rows)
    }

    #[test]
    fn rref_examples() {
        let f = Rationals;
        let (r, p) = q(&[vec![1, 0], vec![0, 1]]).rref(&f);
        assert_eq!(r, q(&[vec![1, 0], vec![0, 1]]));
        assert_eq!(p, vec![0, 1]);

        let (r, p) = q(&[vec![2]]).rref(&f);
        assert_eq!(r, q(&[vec![1]]));
        assert_eq!(p, vec![0]);

        let (r, p) = q(&[vec![1, 2], vec![2, 4]]).rref(&f);
        assert_eq!(r, q(&[vec![1, 2], vec![0, 0]]));
        assert_eq!(p, vec![0]);
    }

    #[test]
    fn kernel_examples() {
        let f = Rationals;
        assert!(Matrix::identity(&f, 3).kernel_basis(&f).is_empty());
        assert_eq!(Matrix::zeros(&f, 2, 3).kernel_basis(&f).len(), 3);
        let k = q(&[vec![1, 1]]).kernel_basis(&f);
        assert_eq!(k, vec![vec![f.from_i64(-1), f.from_i64(1)]]);
    }

    #[test]
    fn preimage_examples() {
        let f = Rationals;
        let b = [f.from_i64(1), f.from_i64(2)];
        assert_eq!(Matrix::identity(&f, 2).preimage_solve(&f, &b).unwrap(), b.to_vec());
        let x = q(&[vec![1, 1]]).preimage_solve(&f, &[f.from_i64(3)]).unwrap();
        assert_eq!(x, vec![f.from_i64(3), f.from_i64(0)]);
        assert_eq!(q(&[vec![0]]).preimage_solve(&f, &[f.from_i64(1)]), Err(Error::NoSolution));
    }

    #[test]
    fn prime_field_rank_drops() {
        // det = 5, singular over F_5 only.
        let rows = [vec![1, 2], vec![3, 11]];
        assert_eq!(Matrix::from_i64_rows(&Rationals, &rows).rank(&Rationals), 2);
        let f5 = PrimeField::new(5).unwrap();
        assert_eq!(Matrix::from_i64_rows(&f5, &rows).rank(&f5), 1);
    }

    #[test]
    fn subspace_quotient_and_intersection() {
        let f = Rationals;
        let s = Subspace::row_space(&f, &q(&[vec![1, 1, 0]]));
        let qm = s.quotient_matrix(&f);
        assert_eq!(qm.rows(), 2);
        assert!(qm.mul_vec(&f, &[f.from_i64(2), f.from_i64(2), f.from_i64(0)]).iter().all(|x| f.is_zero(x)));
        let t = Subspace::row_space(&f, &q(&[vec![1, 0, 0], vec![0, 1, 0]]));
        assert!(t.contains_subspace(&f, &s));
        let u = Subspace::row_space(&f, &q(&[vec![0, 1, 0], vec![0, 0, 1]]));
        assert_eq!(t.intersection(&f, &u).dim(), 1);
        assert_eq!(t.sum(&f, &u).dim(), 3);
    }
}
