//! Gauss-Legendre and Gauss-Lobatto point sets on the unit interval and tensor rules.

use crate::Point;

/// Tensor Gauss-Legendre rule on the reference cell `[0, 1]^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub dim: usize,
    pub points_per_axis: usize,
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Highest per-axis polynomial degree integrated exactly.
    pub fn exactness(&self) -> usize {
        2 * self.points_per_axis - 1
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// `n`-point Gauss-Legendre nodes (ascending) and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        nodes[i] = 0.5 * (x + 1.0);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// `n`-point Gauss-Lobatto-Legendre nodes on `[0, 1]`, ascending, endpoints included.
pub fn gauss_lobatto_nodes(n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let deg = n - 1;
    let mut x: Vec<f64> = (0..n)
        .map(|i| -(std::f64::consts::PI * i as f64 / deg as f64).cos())
        .collect();
    for _ in 0..200 {
        let mut max_dx: f64 = 0.0;
        for xi in x.iter_mut() {
            let (mut p0, mut p1) = (1.0, *xi);
            for k in 2..=deg {
                let p2 = ((2 * k - 1) as f64 * *xi * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if deg == 1 {
                p0 = 1.0;
            }
            let dx = (*xi * p1 - p0) / (n as f64 * p1);
            *xi -= dx;
            max_dx = max_dx.max(dx.abs());
        }
        if max_dx < 1e-16 {
            break;
        }
    }
    x[0] = -1.0;
    x[deg] = 1.0;
    x.iter().map(|v| 0.5 * (v + 1.0)).collect()
}

/// Tensor Gauss-Legendre rule with `n` points per axis, exact for per-axis degree `2n - 1`.
pub fn gauss_rule(dim: usize, n: usize) -> QuadratureRule {
    let (x, w) = gauss_legendre(n);
    let mut points = Vec::new();
    let mut weights = Vec::new();
    if dim == 1 {
        for (xi, wi) in x.iter().zip(&w) {
            points.push([*xi, 0.0]);
            weights.push(*wi);
        }
    } else {
        for (yj, wj) in x.iter().zip(&w) {
            for (xi, wi) in x.iter().zip(&w) {
                points.push([*xi, *yj]);
                weights.push(wi * wj);
            }
        }
    }
    QuadratureRule {
        dim,
        points_per_axis: n,
        points,
        weights,
    }
}
