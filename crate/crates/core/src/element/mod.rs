//! Tensor-product Lagrange elements on intervals and quadrilaterals.
//!
//! Nodal coefficients are ordered `i + n * j` with `i` along x and `n = p + 1`.
//! Derivatives use the componentwise multi-index set `0 ≤ k_d ≤ p`, enumerated in
//! ascending lexicographic order; the semi-norms only sum total degrees `1 ≤ |k| ≤ p`.

mod field;
mod lagrange;
mod operators;
pub mod quadrature;
mod taylor;

pub use field::ElementField;
pub use lagrange::Lagrange1d;
pub use operators::{face_offset, ElementOperators};
pub use quadrature::{gauss_rule, QuadratureRule};
pub use taylor::{nodal_from_taylor, taylor_from_nodal, TaylorPoly};

use crate::linalg::Matrix;
use crate::mesh::CellGeometry;
use crate::{Error, Point, Result};

pub type MultiIndex = [usize; 2];

pub fn total_degree(k: MultiIndex) -> usize {
    k[0] + k[1]
}

pub fn multi_factorial(k: MultiIndex) -> f64 {
    let f = |n: usize| (1..=n).map(|v| v as f64).product::<f64>();
    f(k[0]) * f(k[1])
}

/// Continuous (shared nodes) or discontinuous (per-cell nodes) Galerkin space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SpaceKind {
    #[serde(rename = "cg")]
    Continuous,
    #[serde(rename = "dg")]
    Discontinuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeFamily {
    Equispaced,
    GaussLobatto,
}

impl NodeFamily {
    /// Equispaced nodes below degree 8, Gauss-Lobatto from there on.
    pub fn default_for(degree: usize) -> Self {
        if degree >= 8 {
            NodeFamily::GaussLobatto
        } else {
            NodeFamily::Equispaced
        }
    }

    pub fn nodes(self, degree: usize) -> Vec<f64> {
        match self {
            NodeFamily::Equispaced => (0..=degree).map(|i| i as f64 / degree as f64).collect(),
            NodeFamily::GaussLobatto => quadrature::gauss_lobatto_nodes(degree + 1),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReferenceElement {
    dim: usize,
    degree: usize,
    family: NodeFamily,
    basis: Lagrange1d,
    nodes: Vec<Point>,
    multi_indices: Vec<MultiIndex>,
    quad: QuadratureRule,
    /// Per multi-index: reference derivatives of every basis function at the quadrature points.
    quad_tables: Vec<Matrix>,
    /// Per corner: reference derivative rows (one row per multi-index) at that corner.
    vertex_tables: Vec<Matrix>,
}

impl ReferenceElement {
    pub fn new(dim: usize, degree: usize) -> Result<Self> {
        Self::with_family(dim, degree, NodeFamily::default_for(degree))
    }

    pub fn with_family(dim: usize, degree: usize, family: NodeFamily) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::Config(format!("element dimension must be 1 or 2, got {dim}")));
        }
        if degree < 1 {
            return Err(Error::Config("polynomial degree must be >= 1".into()));
        }
        let basis = Lagrange1d::new(family.nodes(degree));
        let n = degree + 1;
        let mut nodes = Vec::new();
        let mut multi_indices = Vec::new();
        if dim == 1 {
            nodes.extend(basis.nodes().iter().map(|&x| [x, 0.0]));
            multi_indices.extend((0..n).map(|k| [k, 0]));
        } else {
            for &y in basis.nodes() {
                for &x in basis.nodes() {
                    nodes.push([x, y]);
                }
            }
            for k0 in 0..n {
                for k1 in 0..n {
                    multi_indices.push([k0, k1]);
                }
            }
        }
        let quad = gauss_rule(dim, n);
        let mut elem = Self {
            dim,
            degree,
            family,
            basis,
            nodes,
            multi_indices,
            quad,
            quad_tables: Vec::new(),
            vertex_tables: Vec::new(),
        };
        elem.quad_tables = elem
            .multi_indices
            .iter()
            .map(|&k| elem.tabulate(k, &elem.quad.points))
            .collect();
        elem.vertex_tables = (0..(1 << dim))
            .map(|c| {
                let xi = [(c & 1) as f64, ((c >> 1) & 1) as f64];
                let rows: Vec<f64> = elem
                    .multi_indices
                    .iter()
                    .flat_map(|&k| elem.derivative_row(k, xi))
                    .collect();
                Matrix::from_rows(elem.multi_indices.len(), elem.ndofs(), rows)
            })
            .collect();
        Ok(elem)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn family(&self) -> NodeFamily {
        self.family
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.degree + 1
    }

    pub fn ndofs(&self) -> usize {
        self.nodes.len()
    }

    /// Reference nodal points.
    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn basis_1d(&self) -> &Lagrange1d {
        &self.basis
    }

    pub fn multi_indices(&self) -> &[MultiIndex] {
        &self.multi_indices
    }

    pub fn index_of(&self, k: MultiIndex) -> Option<usize> {
        self.multi_indices.iter().position(|&m| m == k)
    }

    /// Default volume rule: `p + 1` Gauss points per axis.
    pub fn quadrature(&self) -> &QuadratureRule {
        &self.quad
    }

    /// Reference derivatives `D^k φ_j` at the default quadrature points, rows = points.
    pub fn quad_table(&self, k_index: usize) -> &Matrix {
        &self.quad_tables[k_index]
    }

    /// Reference derivative rows at a reference corner, one row per multi-index.
    pub fn vertex_table(&self, corner: usize) -> &Matrix {
        &self.vertex_tables[corner]
    }

    /// Row `r` with `Σ_j r_j u_j = ∂_ξ^k u(ξ)` in reference coordinates.
    pub fn derivative_row(&self, k: MultiIndex, xi: Point) -> Vec<f64> {
        let rx = self.basis.derivative_row(k[0], xi[0]);
        if self.dim == 1 {
            return rx;
        }
        let ry = self.basis.derivative_row(k[1], xi[1]);
        let mut out = Vec::with_capacity(rx.len() * ry.len());
        for b in &ry {
            for a in &rx {
                out.push(a * b);
            }
        }
        out
    }

    /// Physical derivative row on `cell`, for reference point `xi`.
    pub fn physical_derivative_row(&self, k: MultiIndex, xi: Point, cell: &CellGeometry) -> Vec<f64> {
        let scale = derivative_scale(k, cell);
        self.derivative_row(k, xi).into_iter().map(|v| v * scale).collect()
    }

    pub fn basis_values(&self, xi: Point) -> Vec<f64> {
        self.derivative_row([0, 0], xi)
    }

    pub fn tabulate(&self, k: MultiIndex, points: &[Point]) -> Matrix {
        let rows: Vec<f64> = points.iter().flat_map(|&p| self.derivative_row(k, p)).collect();
        Matrix::from_rows(points.len(), self.ndofs(), rows)
    }

    /// Physical nodal points of `cell`.
    pub fn node_points(&self, cell: &CellGeometry) -> Vec<Point> {
        self.nodes.iter().map(|&xi| cell.to_physical(xi)).collect()
    }

    /// Nodal interpolation of `f` on `cell`.
    pub fn interpolate(&self, cell: &CellGeometry, f: impl Fn(Point) -> f64) -> Vec<f64> {
        self.node_points(cell).into_iter().map(f).collect()
    }

    /// Multi-indices entering the semi-norms, `1 ≤ |k| ≤ p`, with their positions.
    pub fn seminorm_indices(&self) -> impl Iterator<Item = (usize, MultiIndex)> + '_ {
        let p = self.degree;
        self.multi_indices
            .iter()
            .copied()
            .enumerate()
            .filter(move |(_, k)| (1..=p).contains(&total_degree(*k)))
    }
}

/// `h_x^{-k_x} h_y^{-k_y}`: converts reference to physical derivatives.
pub fn derivative_scale(k: MultiIndex, cell: &CellGeometry) -> f64 {
    let mut s = cell.size[0].powi(-(k[0] as i32));
    if cell.dim == 2 {
        s *= cell.size[1].powi(-(k[1] as i32));
    }
    s
}

/// Coefficients with the first nodal value subtracted; derivatives of order ≥ 1 are unchanged
/// and large constant offsets no longer pollute them with rounding noise.
pub(crate) fn shifted(coeffs: &[f64]) -> Vec<f64> {
    let c0 = coeffs[0];
    coeffs.iter().map(|v| v - c0).collect()
}

fn check_coeffs(elem: &ReferenceElement, coeffs: &[f64]) -> Result<()> {
    if coeffs.len() != elem.ndofs() {
        return Err(Error::Usage(format!(
            "expected {} nodal coefficients, got {}",
            elem.ndofs(),
            coeffs.len()
        )));
    }
    Ok(())
}

/// All derivatives `D^k u_h(point)`, aligned with [`ReferenceElement::multi_indices`].
pub fn eval_derivatives(
    elem: &ReferenceElement,
    coeffs: &[f64],
    point: Point,
    cell: &CellGeometry,
) -> Result<Vec<f64>> {
    check_coeffs(elem, coeffs)?;
    if !cell.contains(point, 1e-12) {
        return Err(Error::Domain(format!("point {point:?} outside cell {cell:?}")));
    }
    let xi = cell.to_reference(point);
    let sh = shifted(coeffs);
    Ok(elem
        .multi_indices()
        .iter()
        .map(|&k| {
            let row = elem.physical_derivative_row(k, xi, cell);
            let d: f64 = row.iter().zip(&sh).map(|(a, b)| a * b).sum();
            if total_degree(k) == 0 {
                coeffs[0] + d
            } else {
                d
            }
        })
        .collect())
}

/// `(Σ_{1≤|k|≤p} h_e^{2|k|-d} ∫_{K_e} |D^k u|²)^{1/2}` evaluated with `quad`.
pub fn element_seminorm(
    elem: &ReferenceElement,
    coeffs: &[f64],
    cell: &CellGeometry,
    quad: &QuadratureRule,
) -> f64 {
    let h = cell.diameter();
    let d = cell.dim as i32;
    let jac = cell.measure();
    let sh = shifted(coeffs);
    let mut sum = 0.0;
    for (_, k) in elem.seminorm_indices() {
        let table = elem.tabulate(k, &quad.points);
        let scale = derivative_scale(k, cell);
        let mut integral = 0.0;
        for (q, w) in quad.weights.iter().enumerate() {
            let v = scale * crate::linalg::dot(table.row(q), &sh);
            integral += w * jac * v * v;
        }
        sum += h.powi(2 * total_degree(k) as i32 - d) * integral;
    }
    sum.sqrt()
}

/// `(Σ_{1≤|k|≤p} h_e^{2|k|} |D^k u(point)|²)^{1/2}`.
pub fn pointwise_seminorm(
    elem: &ReferenceElement,
    coeffs: &[f64],
    cell: &CellGeometry,
    point: Point,
) -> Result<f64> {
    let derivs = eval_derivatives(elem, coeffs, point, cell)?;
    let h = cell.diameter();
    Ok(elem
        .seminorm_indices()
        .map(|(i, k)| h.powi(2 * total_degree(k) as i32) * derivs[i] * derivs[i])
        .sum::<f64>()
        .sqrt())
}

/// `|K_e|^{-1} ∫_{K_e} u_h`.
pub fn cell_average(
    elem: &ReferenceElement,
    coeffs: &[f64],
    _cell: &CellGeometry,
    quad: &QuadratureRule,
) -> f64 {
    let table = elem.tabulate([0, 0], &quad.points);
    quad.weights
        .iter()
        .enumerate()
        .map(|(q, w)| w * crate::linalg::dot(table.row(q), coeffs))
        .sum()
}
