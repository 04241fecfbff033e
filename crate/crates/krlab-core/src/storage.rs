//! Matrix storage: dense up to moderate sizes, compressed sparse rows beyond.
//!
//! Model builders pick the representation; everything downstream goes through
//! [`MatrixOp`]. Resolvent solves densify (pivoted LU), so they are capped.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Dense cap for operations that must densify (LU solves, kernels, spectra).
pub const DENSE_SOLVE_CAP: usize = 4096;

#[derive(Debug, Clone)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Build from (row, col, value) triplets; duplicate entries accumulate.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut counts = vec![0usize; n + 1];
        for &(i, _, _) in triplets {
            counts[i + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut col_idx = vec![0usize; triplets.len()];
        let mut vals = vec![0.0; triplets.len()];
        let mut cursor = counts.clone();
        for &(i, j, v) in triplets {
            let p = cursor[i];
            col_idx[p] = j;
            vals[p] = v;
            cursor[i] += 1;
        }
        // sort each row by column and merge duplicates
        let mut row_ptr = vec![0usize; n + 1];
        let mut out_cols = Vec::with_capacity(triplets.len());
        let mut out_vals = Vec::with_capacity(triplets.len());
        for i in 0..n {
            let lo = counts[i];
            let hi = counts[i + 1];
            let mut row: Vec<(usize, f64)> =
                (lo..hi).map(|p| (col_idx[p], vals[p])).collect();
            row.sort_unstable_by_key(|e| e.0);
            for (j, v) in row {
                if let Some(last) = out_cols.last() {
                    if *last == j && out_cols.len() > row_ptr[i] {
                        let k = out_vals.len() - 1;
                        out_vals[k] += v;
                        continue;
                    }
                }
                out_cols.push(j);
                out_vals.push(v);
            }
            row_ptr[i + 1] = out_cols.len();
        }
        CsrMatrix {
            n,
            row_ptr,
            col_idx: out_cols,
            vals: out_vals,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn matvec(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut y = DVector::zeros(self.n);
        for i in 0..self.n {
            let mut acc = 0.0;
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[p] * x[self.col_idx[p]];
            }
            y[i] = acc;
        }
        y
    }

    pub fn for_each(&self, mut f: impl FnMut(usize, usize, f64)) {
        for i in 0..self.n {
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                f(i, self.col_idx[p], self.vals[p]);
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum MatrixOp {
    Dense(DMatrix<f64>),
    Sparse(CsrMatrix),
}

impl MatrixOp {
    pub fn n(&self) -> usize {
        match self {
            MatrixOp::Dense(m) => m.nrows(),
            MatrixOp::Sparse(m) => m.n(),
        }
    }

    pub fn matvec(&self, x: &DVector<f64>) -> DVector<f64> {
        match self {
            MatrixOp::Dense(m) => m * x,
            MatrixOp::Sparse(m) => m.matvec(x),
        }
    }

    pub fn diag(&self) -> Vec<f64> {
        let n = self.n();
        match self {
            MatrixOp::Dense(m) => (0..n).map(|i| m[(i, i)]).collect(),
            MatrixOp::Sparse(m) => {
                let mut d = vec![0.0; n];
                m.for_each(|i, j, v| {
                    if i == j {
                        d[i] += v;
                    }
                });
                d
            }
        }
    }

    pub fn min_off_diagonal(&self) -> f64 {
        let mut min = f64::INFINITY;
        match self {
            MatrixOp::Dense(m) => {
                for i in 0..m.nrows() {
                    for j in 0..m.ncols() {
                        if i != j && m[(i, j)] < min {
                            min = m[(i, j)];
                        }
                    }
                }
            }
            MatrixOp::Sparse(m) => {
                m.for_each(|i, j, v| {
                    if i != j && v < min {
                        min = v;
                    }
                });
            }
        }
        if min.is_finite() {
            min
        } else {
            0.0
        }
    }

    pub fn for_each_entry(&self, mut f: impl FnMut(usize, usize, f64)) {
        match self {
            MatrixOp::Dense(m) => {
                for i in 0..m.nrows() {
                    for j in 0..m.ncols() {
                        let v = m[(i, j)];
                        if v != 0.0 {
                            f(i, j, v);
                        }
                    }
                }
            }
            MatrixOp::Sparse(m) => m.for_each(f),
        }
    }

    /// A + c I, in the same representation.
    pub fn shifted(&self, c: f64) -> MatrixOp {
        match self {
            MatrixOp::Dense(m) => {
                let mut out = m.clone();
                for i in 0..out.nrows() {
                    out[(i, i)] += c;
                }
                MatrixOp::Dense(out)
            }
            MatrixOp::Sparse(m) => {
                let mut trips = Vec::with_capacity(m.nnz() + m.n());
                m.for_each(|i, j, v| trips.push((i, j, v)));
                for i in 0..m.n() {
                    trips.push((i, i, c));
                }
                MatrixOp::Sparse(CsrMatrix::from_triplets(m.n(), &trips))
            }
        }
    }

    /// Weighted adjoint A* = W^{-1} A^T W with W = diag(quad weights), so that
    /// <A f, phi> = <f, A* phi> for the grid pairing.
    pub fn weighted_transpose(&self, w: &[f64]) -> MatrixOp {
        let n = self.n();
        match self {
            MatrixOp::Dense(m) => {
                let mut out = DMatrix::zeros(n, n);
                for i in 0..n {
                    for j in 0..n {
                        out[(i, j)] = m[(j, i)] * w[j] / w[i];
                    }
                }
                MatrixOp::Dense(out)
            }
            MatrixOp::Sparse(m) => {
                let mut trips = Vec::with_capacity(m.nnz());
                m.for_each(|i, j, v| trips.push((j, i, v * w[i] / w[j])));
                MatrixOp::Sparse(CsrMatrix::from_triplets(n, &trips))
            }
        }
    }

    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        let n = self.n();
        if n > DENSE_SOLVE_CAP {
            return Err(Error::DenseCapExceeded {
                n,
                cap: DENSE_SOLVE_CAP,
            });
        }
        match self {
            MatrixOp::Dense(m) => Ok(m.clone()),
            MatrixOp::Sparse(m) => {
                let mut out = DMatrix::zeros(n, n);
                m.for_each(|i, j, v| out[(i, j)] += v);
                Ok(out)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csr_matvec_matches_dense() {
        let trips = vec![
            (0, 0, -1.0),
            (0, 1, 2.0),
            (1, 0, 0.5),
            (1, 2, 1.0),
            (2, 2, -3.0),
            (0, 1, 1.0), // duplicate accumulates to 3.0
        ];
        let csr = CsrMatrix::from_triplets(3, &trips);
        assert_eq!(csr.nnz(), 5);
        let x = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let y = csr.matvec(&x);
        assert_eq!(y[0], -1.0 + 3.0 * 2.0);
        assert_eq!(y[1], 0.5 + 3.0);
        assert_eq!(y[2], -9.0);
    }

    #[test]
    fn weighted_transpose_is_adjoint() {
        // A = [[-1, 2], [0, -1]], w = (1, 2):  A* = W^{-1} A^T W = [[-1, 0], [1, -1]]
        let a = MatrixOp::Dense(DMatrix::from_row_slice(2, 2, &[-1.0, 2.0, 0.0, -1.0]));
        let at = a.weighted_transpose(&[1.0, 2.0]);
        let d = at.to_dense().unwrap();
        assert_eq!(d[(0, 0)], -1.0);
        assert_eq!(d[(0, 1)], 0.0);
        assert_eq!(d[(1, 0)], 1.0);
        assert_eq!(d[(1, 1)], -1.0);
    }
}
