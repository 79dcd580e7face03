//! Small dense matrices and a CSR matrix with a Jacobi-preconditioned CG solver.

use crate::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `out = self * x`
    pub fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (o, row) in out.iter_mut().zip(self.data.chunks_exact(self.cols)) {
            *o = dot(row, x);
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        self.matvec_into(x, &mut out);
        out
    }

    /// `out += selfᵀ * y`
    pub fn tr_matvec_add(&self, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        for (&yi, row) in y.iter().zip(self.data.chunks_exact(self.cols)) {
            if yi != 0.0 {
                for (o, &a) in out.iter_mut().zip(row) {
                    *o += yi * a;
                }
            }
        }
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                for (o, &b) in out.row_mut(i).iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    /// `xᵀ self x` for a square matrix.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(self.rows, self.cols);
        self.data
            .chunks_exact(self.cols)
            .zip(x)
            .map(|(row, &xi)| xi * dot(row, x))
            .sum()
    }

    pub fn scaled(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn inverse(&self) -> Result<Matrix> {
        assert_eq!(self.rows, self.cols);
        let m = nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.data);
        let inv = m
            .try_inverse()
            .ok_or_else(|| Error::Numerical("singular matrix in dense inverse".into()))?;
        let mut out = Matrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = inv[(i, j)];
            }
        }
        Ok(out)
    }

    /// Triangular factor `R` of a Householder QR of a tall matrix, so `|A x| = |R x|`.
    pub fn qr_r(&self) -> Matrix {
        assert!(self.rows >= self.cols);
        let m = nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.data);
        let r = m.qr().r();
        let mut out = Matrix::zeros(self.cols, self.cols);
        for i in 0..self.cols {
            for j in 0..self.cols {
                out[(i, j)] = r[(i, j)];
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Compressed sparse row matrix, assembled from (row, col, value) triplets.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Duplicate entries are summed. Rows come out with ascending column indices.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.n {
            let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
            out[i] = self.cols[a..b]
                .iter()
                .zip(&self.vals[a..b])
                .map(|(&c, &v)| v * x[c])
                .sum();
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
                self.cols[a..b]
                    .iter()
                    .position(|&c| c == i)
                    .map_or(0.0, |k| self.vals[a + k])
            })
            .collect()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.cols[a..b]
            .binary_search(&j)
            .map_or(0.0, |k| self.vals[a + k])
    }

    /// Solves `self x = b` by Jacobi-preconditioned conjugate gradients.
    /// `x` holds the initial guess on entry. Returns the iteration count.
    pub fn solve_pcg(&self, b: &[f64], x: &mut [f64], rel_tol: f64, max_iter: usize) -> Result<usize> {
        let n = self.n;
        let inv_diag: Vec<f64> = self.diagonal().iter().map(|d| 1.0 / d).collect();
        let b_norm = dot(b, b).sqrt();
        if !b_norm.is_finite() {
            return Err(Error::Numerical("mass solve received a non-finite right-hand side".into()));
        }
        if b_norm == 0.0 {
            x.iter_mut().for_each(|v| *v = 0.0);
            return Ok(0);
        }
        let mut r = vec![0.0; n];
        self.matvec_into(x, &mut r);
        for i in 0..n {
            r[i] = b[i] - r[i];
        }
        let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, d)| a * d).collect();
        let mut p = z.clone();
        let mut ap = vec![0.0; n];
        let mut rz = dot(&r, &z);
        let mut res = dot(&r, &r).sqrt();
        for it in 0..max_iter {
            if res <= rel_tol * b_norm {
                return Ok(it);
            }
            self.matvec_into(&p, &mut ap);
            let alpha = rz / dot(&p, &ap);
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            res = dot(&r, &r).sqrt();
            for i in 0..n {
                z[i] = r[i] * inv_diag[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        if res <= rel_tol * b_norm {
            return Ok(max_iter);
        }
        Err(Error::Numerical(format!(
            "mass solve did not converge: {max_iter} iterations, relative residual {:.3e}",
            res / b_norm
        )))
    }
}

/// Cholesky factor `A = L Lᵀ` of a symmetric positive definite matrix stored by row
/// envelope. Row `i` keeps `L[i, start[i]..=i]`; the envelope of `A` is preserved, so a
/// banded matrix with periodic corner entries stays `O(n · bandwidth)`.
#[derive(Debug, Clone)]
pub struct EnvelopeCholesky {
    start: Vec<usize>,
    rows: Vec<Vec<f64>>,
}

impl EnvelopeCholesky {
    /// `entry(i, j)` is read for `j <= i` only.
    pub fn factor(n: usize, entry: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let start: Vec<usize> = (0..n)
            .map(|i| (0..=i).find(|&j| entry(i, j) != 0.0).unwrap_or(i))
            .collect();
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
        for i in 0..n {
            let si = start[i];
            let mut row = vec![0.0; i - si + 1];
            for j in si..i {
                let (sj, lj) = (start[j], &rows[j]);
                let k0 = sj.max(si);
                let s = entry(i, j) - dot(&row[k0 - si..j - si], &lj[k0 - sj..j - sj]);
                row[j - si] = s / lj[j - sj];
            }
            let d = entry(i, i) - dot(&row[..i - si], &row[..i - si]);
            if d <= 0.0 || !d.is_finite() {
                return Err(Error::Numerical("envelope Cholesky: matrix is not positive definite".into()));
            }
            row[i - si] = d.sqrt();
            rows.push(row);
        }
        Ok(Self { start, rows })
    }

    pub fn n(&self) -> usize {
        self.start.len()
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.n();
        for i in 0..n {
            let (si, row) = (self.start[i], &self.rows[i]);
            let s = x[i] - dot(&row[..i - si], &x[si..i]);
            x[i] = s / row[i - si];
        }
        for i in (0..n).rev() {
            let (si, row) = (self.start[i], &self.rows[i]);
            x[i] /= row[i - si];
            let xi = x[i];
            for (k, l) in row[..i - si].iter().enumerate() {
                x[si + k] -= l * xi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_small_matrix() {
        let m = Matrix::from_rows(2, 2, vec![4.0, 1.0, 2.0, 3.0]);
        let inv = m.inverse().unwrap();
        let id = m.matmul(&inv);
        for i in 0..2 {
            for j in 0..2 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)] - e).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn pcg_solves_tridiagonal_spd_system() {
        let n = 50;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 4.0));
            if i + 1 < n {
                t.push((i, i + 1, 1.0));
                t.push((i + 1, i, 1.0));
            }
        }
        let a = CsrMatrix::from_triplets(n, t);
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut b = vec![0.0; n];
        a.matvec_into(&x_true, &mut b);
        let mut x = vec![0.0; n];
        a.solve_pcg(&b, &mut x, 1e-14, 200).unwrap();
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn duplicate_triplets_are_summed() {
        let a = CsrMatrix::from_triplets(2, vec![(0, 0, 1.0), (0, 0, 2.0), (1, 1, 5.0)]);
        assert_eq!(a.get(0, 0), 3.0);
        assert_eq!(a.get(0, 1), 0.0);
        assert_eq!(a.diagonal(), vec![3.0, 5.0]);
    }
    #[test]
    fn envelope_cholesky_solves_periodic_banded_system() {
        let n = 12;
        let a = |i: usize, j: usize| -> f64 {
            let d = (i as isize - j as isize).rem_euclid(n as isize).min((j as isize - i as isize).rem_euclid(n as isize));
            [6.0, 1.5, 0.5, 0.0][d.min(3) as usize]
        };
        let chol = EnvelopeCholesky::factor(n, a).unwrap();
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.61).cos()).collect();
        let mut x: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a(i, j) * x_true[j]).sum()).collect();
        chol.solve_in_place(&mut x);
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-14);
        }
    }
}
