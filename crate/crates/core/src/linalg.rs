//! Dense symmetric matrices and the Cholesky kernel used by the dual solver.
//!
//! Every instance handled here is a complete graph, so storage is a flat
//! row-major `n × n` buffer. The factorization works on a copy and never
//! forms an explicit inverse.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense symmetric `n × n` matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Builds from rows, rejecting ragged or asymmetric input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::input(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            m.data[i * n..(i + 1) * n].copy_from_slice(row);
        }
        if !m.is_symmetric() {
            return Err(Error::input("matrix is not symmetric"));
        }
        Ok(m)
    }

    pub(crate) fn from_raw(n: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        Self { n, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn has_zero_diagonal(&self) -> bool {
        (0..self.n).all(|i| self.get(i, i) == 0.0)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }

    /// `⟨x, A x⟩`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        (0..self.n).map(|i| x[i] * dot(self.row(i), x)).sum()
    }

    /// Sum of absolute off-diagonal entries in row `i`.
    pub fn off_diag_abs_row_sum(&self, i: usize) -> f64 {
        self.row(i)
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, v)| v.abs())
            .sum()
    }

    /// Principal submatrix on `indices`, in the given order.
    pub fn principal_submatrix(&self, indices: &[usize]) -> Self {
        let m = indices.len();
        let mut data = Vec::with_capacity(m * m);
        for &i in indices {
            let row = self.row(i);
            data.extend(indices.iter().map(|&j| row[j]));
        }
        Self::from_raw(m, data)
    }

    /// `self + Diag(diag)`.
    pub fn plus_diag(&self, diag: &[f64]) -> Self {
        let mut out = self.clone();
        for (i, d) in diag.iter().enumerate() {
            out.data[i * self.n + i] += d;
        }
        out
    }

    pub fn negated(&self) -> Self {
        Self::from_raw(self.n, self.data.iter().map(|v| -v).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub(crate) fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Inner product with four independent accumulators so the loop vectorizes.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Lower-triangular Cholesky factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    // row-major, only the lower triangle is meaningful
    l: Vec<f64>,
}

impl Cholesky {
    /// Factors `base + Diag(shift)`. Returns `None` as soon as a pivot
    /// drops to `min_pivot` or below.
    pub fn factor_shifted(base: &SymMatrix, shift: &[f64], min_pivot: f64) -> Option<Self> {
        let n = base.dim();
        debug_assert_eq!(shift.len(), n);
        let mut l = vec![0.0; n * n];
        let src = base.as_slice();
        for j in 0..n {
            let (done, rest) = l.split_at_mut(j * n);
            let row_j = &mut rest[..n];
            // row j of L, columns < j
            for k in 0..j {
                let row_k = &done[k * n..k * n + k];
                let s = src[j * n + k] - dot(&row_j[..k], row_k);
                row_j[k] = s / done[k * n + k];
            }
            let d = src[j * n + j] + shift[j] - dot(&row_j[..j], &row_j[..j]);
            if !(d > min_pivot) {
                return None;
            }
            row_j[j] = d.sqrt();
        }
        Some(Self { n, l })
    }

    pub fn factor(a: &SymMatrix, min_pivot: f64) -> Option<Self> {
        Self::factor_shifted(a, &vec![0.0; a.dim()], min_pivot)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `L y = b`.
    pub fn forward(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            y[i] = (y[i] - dot(row, &y[..i])) / self.l[i * n + i];
        }
        y
    }

    /// Solves `Lᵀ x = y`.
    pub fn backward(&self, y: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = y.to_vec();
        for i in (0..n).rev() {
            x[i] /= self.l[i * n + i];
            let xi = x[i];
            let row = &self.l[i * n..i * n + i];
            for (xk, lik) in x[..i].iter_mut().zip(row) {
                *xk -= lik * xi;
            }
        }
        x
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        self.backward(&self.forward(b))
    }

    /// `⟨A⁻¹ b, b⟩` from a single forward solve.
    pub fn inv_quad(&self, b: &[f64]) -> f64 {
        let y = self.forward(b);
        dot(&y, &y)
    }

    pub fn min_pivot(&self) -> f64 {
        (0..self.n)
            .map(|i| self.l[i * self.n + i])
            .fold(f64::INFINITY, f64::min)
    }
}

/// Largest eigenvalue of a symmetric matrix.
pub fn max_eigenvalue(a: &SymMatrix) -> f64 {
    if a.dim() == 0 {
        return 0.0;
    }
    let m = nalgebra::DMatrix::from_row_slice(a.dim(), a.dim(), a.as_slice());
    m.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// True when `a` is negative definite, tested by factoring `-a`.
pub fn is_negative_definite(a: &SymMatrix, margin: f64) -> bool {
    Cholesky::factor(&a.negated(), margin).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd3() -> SymMatrix {
        SymMatrix::from_rows(&[
            vec![4.0, 2.0, 0.4],
            vec![2.0, 5.0, 1.0],
            vec![0.4, 1.0, 3.0],
        ])
        .unwrap()
    }

    #[test]
    fn solve_recovers_rhs() {
        let a = spd3();
        let ch = Cholesky::factor(&a, 0.0).unwrap();
        let b = [1.0, -2.0, 0.5];
        let x = ch.solve(&b);
        let back = a.mul_vec(&x);
        for (u, v) in back.iter().zip(&b) {
            assert!((u - v).abs() < 1e-12);
        }
        assert!((ch.inv_quad(&b) - dot(&x, &b)).abs() < 1e-12);
    }

    #[test]
    fn rejects_indefinite_and_semidefinite() {
        let a = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(Cholesky::factor(&a, 0.0).is_none());
        let z = SymMatrix::from_rows(&[vec![0.0]]).unwrap();
        assert!(Cholesky::factor(&z, 0.0).is_none());
        assert!(Cholesky::factor_shifted(&z, &[1e-3], 1e-10).is_some());
    }

    #[test]
    fn asymmetric_rows_rejected() {
        assert!(SymMatrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0]]).is_err());
    }

    #[test]
    fn principal_submatrix_gathers() {
        let a = spd3();
        let s = a.principal_submatrix(&[2, 0]);
        assert_eq!(s.to_rows(), vec![vec![3.0, 0.4], vec![0.4, 4.0]]);
    }

    #[test]
    fn eigen_and_definiteness() {
        let q = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!((max_eigenvalue(&q) - 1.0).abs() < 1e-12);
        assert!(is_negative_definite(&q.plus_diag(&[-2.0, -2.0]), 0.0));
        assert!(!is_negative_definite(&q.plus_diag(&[-1.0, -1.0]), 1e-10));
    }
}
