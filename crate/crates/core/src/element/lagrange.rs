//! One-dimensional Lagrange interpolation on `[0, 1]` in barycentric form.

use crate::linalg::Matrix;

#[derive(Debug, Clone)]
pub struct Lagrange1d {
    nodes: Vec<f64>,
    bary: Vec<f64>,
    /// `diff_powers[k]` maps nodal values to nodal values of the k-th derivative.
    diff_powers: Vec<Matrix>,
}

impl Lagrange1d {
    pub fn new(nodes: Vec<f64>) -> Self {
        let n = nodes.len();
        let bary: Vec<f64> = (0..n)
            .map(|j| {
                1.0 / (0..n)
                    .filter(|&k| k != j)
                    .map(|k| nodes[j] - nodes[k])
                    .product::<f64>()
            })
            .collect();
        let mut d = Matrix::zeros(n, n);
        for i in 0..n {
            let mut diag = 0.0;
            for j in 0..n {
                if i != j {
                    let v = (bary[j] / bary[i]) / (nodes[i] - nodes[j]);
                    d[(i, j)] = v;
                    diag -= v;
                }
            }
            d[(i, i)] = diag;
        }
        let mut diff_powers = vec![Matrix::identity(n)];
        for k in 1..n {
            let next = d.matmul(&diff_powers[k - 1]);
            diff_powers.push(next);
        }
        Self {
            nodes,
            bary,
            diff_powers,
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Basis values `φ_j(x)`.
    pub fn values(&self, x: f64) -> Vec<f64> {
        let n = self.len();
        if let Some(j) = self.nodes.iter().position(|&xj| xj == x) {
            let mut out = vec![0.0; n];
            out[j] = 1.0;
            return out;
        }
        let terms: Vec<f64> = (0..n).map(|j| self.bary[j] / (x - self.nodes[j])).collect();
        let denom: f64 = terms.iter().sum();
        terms.iter().map(|t| t / denom).collect()
    }

    /// Matrix mapping nodal values to reference Taylor coefficients `u^{(k)}(c)/k!` about `c`.
    ///
    /// Computed as the inverse of the shifted Vandermonde matrix `(x_i - c)^k`; this is
    /// backward stable and round-trips far more accurately at high degree than
    /// evaluating the differentiation matrices at `c`.
    pub fn taylor_matrix(&self, c: f64) -> Matrix {
        let n = self.len();
        let mut v = Matrix::zeros(n, n);
        for (i, &x) in self.nodes.iter().enumerate() {
            let mut m = 1.0;
            for k in 0..n {
                v[(i, k)] = m;
                m *= x - c;
            }
        }
        v.inverse().expect("distinct nodes give an invertible Vandermonde matrix")
    }

    /// Values at this element's nodes of the interpolant living on the cell shifted by
    /// `offset` reference lengths: `E[a][i] = φ_i(x_a - offset)`.
    ///
    /// Uses the product form, which stays accurate away from `[0, 1]`.
    pub fn extension_matrix(&self, offset: f64) -> Matrix {
        let n = self.len();
        let mut e = Matrix::zeros(n, n);
        for a in 0..n {
            let x = self.nodes[a] - offset;
            for i in 0..n {
                e[(a, i)] = (0..n)
                    .filter(|&k| k != i)
                    .map(|k| (x - self.nodes[k]) / (self.nodes[i] - self.nodes[k]))
                    .product();
            }
        }
        e
    }

    /// Row `r` such that `Σ_j r_j u_j` is the `k`-th derivative at `x` of the interpolant of `u`.
    pub fn derivative_row(&self, k: usize, x: f64) -> Vec<f64> {
        let phi = self.values(x);
        if k == 0 {
            return phi;
        }
        if k > self.degree() {
            return vec![0.0; self.len()];
        }
        let dk = &self.diff_powers[k];
        let mut row = vec![0.0; self.len()];
        dk.tr_matvec_add(&phi, &mut row);
        row
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_derivatives() {
        let l = Lagrange1d::new(vec![0.0, 0.5, 1.0]);
        let u = [0.0, 0.25, 1.0]; // x^2
        let at = |k, x| -> f64 {
            l.derivative_row(k, x).iter().zip(&u).map(|(a, b)| a * b).sum()
        };
        assert!((at(0, 0.3) - 0.09).abs() < 1e-15);
        assert!((at(1, 0.3) - 0.6).abs() < 1e-14);
        assert!((at(2, 0.3) - 2.0).abs() < 1e-13);
        assert_eq!(at(3, 0.3), 0.0);
    }
}
