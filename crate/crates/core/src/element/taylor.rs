use super::{derivative_scale, shifted, total_degree, MultiIndex, ReferenceElement};
use crate::mesh::CellGeometry;
use crate::{Error, Point, Result};

/// Polynomial in the Taylor basis `(x - center)^k / k!`, stored as `∂^k u(center) / k!`
/// for the full componentwise multi-index set.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorPoly {
    pub dim: usize,
    pub center: Point,
    pub multi_indices: Vec<MultiIndex>,
    pub coeffs: Vec<f64>,
}

impl TaylorPoly {
    pub fn eval(&self, x: Point) -> f64 {
        let dx = [x[0] - self.center[0], x[1] - self.center[1]];
        if self.dim == 1 {
            return self
                .multi_indices
                .iter()
                .zip(&self.coeffs)
                .map(|(k, c)| c * dx[0].powi(k[0] as i32))
                .sum();
        }
        // inner sums over k_y per k_x, then the x powers
        let kmax = self.multi_indices.iter().map(|k| k[0]).max().unwrap_or(0);
        let mut inner = vec![0.0; kmax + 1];
        for (k, c) in self.multi_indices.iter().zip(&self.coeffs) {
            inner[k[0]] += c * dx[1].powi(k[1] as i32);
        }
        inner
            .iter()
            .enumerate()
            .map(|(k0, v)| v * dx[0].powi(k0 as i32))
            .sum()
    }

    /// `Σ_l w_l t_l` for Taylor polynomials sharing one center.
    pub fn weighted_sum(terms: &[(f64, &TaylorPoly)]) -> TaylorPoly {
        let first = terms[0].1;
        let mut coeffs = vec![0.0; first.coeffs.len()];
        for (w, t) in terms {
            for (c, v) in coeffs.iter_mut().zip(&t.coeffs) {
                *c += w * v;
            }
        }
        TaylorPoly {
            dim: first.dim,
            center: first.center,
            multi_indices: first.multi_indices.clone(),
            coeffs,
        }
    }
}

/// Taylor expansion of the cell polynomial about `expansion_point` (a point of the closed cell).
pub fn taylor_from_nodal(
    elem: &ReferenceElement,
    coeffs: &[f64],
    cell: &CellGeometry,
    expansion_point: Point,
) -> Result<TaylorPoly> {
    if !cell.contains(expansion_point, 1e-12) {
        return Err(Error::Domain(format!(
            "expansion point {expansion_point:?} outside cell"
        )));
    }
    let xi = cell.to_reference(expansion_point);
    let sh = shifted(coeffs);
    let tx = elem.basis_1d().taylor_matrix(xi[0]);
    let n = elem.nodes_per_axis();
    // Sum factorization: the y transform first, then x. Applying the dense Kronecker
    // product instead loses several digits at high degree.
    let w: Vec<f64> = if elem.dim() == 1 {
        sh.clone()
    } else {
        let ty = elem.basis_1d().taylor_matrix(xi[1]);
        let mut w = vec![0.0; n * n];
        for i in 0..n {
            for k1 in 0..n {
                w[i * n + k1] = (0..n).map(|j| ty[(k1, j)] * sh[i + n * j]).sum();
            }
        }
        w
    };
    let ny = if elem.dim() == 1 { 1 } else { n };
    let taylor = elem
        .multi_indices()
        .iter()
        .map(|&k| {
            let d: f64 = (0..n).map(|i| tx[(k[0], i)] * w[i * ny + k[1]]).sum();
            if total_degree(k) == 0 {
                coeffs[0] + d
            } else {
                d * derivative_scale(k, cell)
            }
        })
        .collect();
    Ok(TaylorPoly {
        dim: elem.dim(),
        center: expansion_point,
        multi_indices: elem.multi_indices().to_vec(),
        coeffs: taylor,
    })
}

/// Evaluates the Taylor polynomial at the physical nodal points of `target_cell`.
pub fn nodal_from_taylor(elem: &ReferenceElement, taylor: &TaylorPoly, target_cell: &CellGeometry) -> Vec<f64> {
    elem.node_points(target_cell)
        .into_iter()
        .map(|x| taylor.eval(x))
        .collect()
}
