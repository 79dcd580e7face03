use super::{derivative_scale, gauss_rule, total_degree, QuadratureRule, ReferenceElement};
use crate::linalg::{dot, Matrix};
use crate::mesh::CellGeometry;
use crate::{Point, Result};

/// Physical-space tables for one cell shape of a uniform mesh.
///
/// Everything the residual and the WENO passes evaluate per cell is a small dense
/// matrix acting on nodal coefficients; these are built once per discretization.
#[derive(Debug, Clone)]
pub struct ElementOperators {
    pub dim: usize,
    pub degree: usize,
    pub ndofs: usize,
    pub cell: CellGeometry,
    pub measure: f64,
    pub diameter: f64,

    pub quad: QuadratureRule,
    /// Quadrature weights times the cell measure.
    pub weights: Vec<f64>,
    pub basis: Matrix,
    /// Physical gradient tables at the quadrature points, one per axis.
    pub grad: Vec<Matrix>,

    /// Reference nodal points.
    pub node_points: Vec<Point>,
    /// Physical gradient tables at the nodal points, one per axis.
    pub node_grad: Vec<Matrix>,

    /// Rule used for flux integrals (may be over-integrated).
    pub flux_quad: QuadratureRule,
    pub flux_weights: Vec<f64>,
    pub flux_basis: Matrix,
    pub flux_grad: Vec<Matrix>,

    /// `∫ φ_j / |K|`.
    pub average: Vec<f64>,
    pub mass: Matrix,
    pub mass_inv: Matrix,

    /// Square factor `R` with `‖v‖_e = |R (v - v_0)|`; a QR compression of the stacked,
    /// weight-scaled derivative tables, so the norm is a sum of squares without cancellation.
    pub seminorm_factor: Matrix,
    /// Per corner, rows `h^{|k|} D^k` for `1 ≤ |k| ≤ p`.
    pub corner_pointwise: Vec<Matrix>,
    /// Per quadrature point, rows `h^{|k|} D^k` for `1 ≤ |k| ≤ p`.
    pub quad_pointwise: Vec<Matrix>,

    /// 1D extension matrices for neighbor offsets -1, 0, +1 (see [`Self::extend`]).
    pub extension_1d: [Matrix; 3],

    /// Per face: basis values at the face quadrature points.
    pub face_traces: Vec<Matrix>,
    /// Per face: quadrature weights times the face measure.
    pub face_weights: Vec<Vec<f64>>,
    /// Per face: reference coordinates of the face quadrature points.
    pub face_points: Vec<Vec<Point>>,
}

fn face_center(dim: usize, face: usize) -> Point {
    if dim == 1 {
        return [if face == 0 { 0.0 } else { 1.0 }, 0.0];
    }
    match face {
        0 => [0.0, 0.5],
        1 => [1.0, 0.5],
        2 => [0.5, 0.0],
        _ => [0.5, 1.0],
    }
}

/// Cell offset of the neighbor across `face`.
pub fn face_offset(face: usize) -> [i32; 2] {
    match face {
        0 => [-1, 0],
        1 => [1, 0],
        2 => [0, -1],
        _ => [0, 1],
    }
}

impl ElementOperators {
    /// `size` is the cell extent per axis; `over_integrate` adds one Gauss point per
    /// axis to the flux rule.
    pub fn new(elem: &ReferenceElement, size: Point, over_integrate: bool) -> Result<Self> {
        let dim = elem.dim();
        let p = elem.degree();
        let nd = elem.ndofs();
        let cell = if dim == 1 {
            CellGeometry::interval(0.0, size[0])
        } else {
            CellGeometry::rectangle([0.0, 0.0], size)
        };
        let measure = cell.measure();
        let h = cell.diameter();

        let quad = elem.quadrature().clone();
        let weights: Vec<f64> = quad.weights.iter().map(|w| w * measure).collect();
        let basis = elem.tabulate([0, 0], &quad.points);
        let grad_tables = |points: &[Point]| -> Vec<Matrix> {
            (0..dim)
                .map(|d| {
                    let k = if d == 0 { [1, 0] } else { [0, 1] };
                    elem.tabulate(k, points).scaled(derivative_scale(k, &cell))
                })
                .collect()
        };
        let grad = grad_tables(&quad.points);
        let node_points = elem.nodes().to_vec();
        let node_grad = grad_tables(&node_points);

        let flux_quad = if over_integrate {
            gauss_rule(dim, p + 2)
        } else {
            quad.clone()
        };
        let flux_weights = flux_quad.weights.iter().map(|w| w * measure).collect();
        let flux_basis = elem.tabulate([0, 0], &flux_quad.points);
        let flux_grad = grad_tables(&flux_quad.points);

        let mut average = vec![0.0; nd];
        basis.tr_matvec_add(&quad.weights, &mut average);

        let mut mass = Matrix::zeros(nd, nd);
        for q in 0..quad.len() {
            let row = basis.row(q);
            for i in 0..nd {
                for j in 0..nd {
                    mass[(i, j)] += weights[q] * row[i] * row[j];
                }
            }
        }
        let mass_inv = mass.inverse()?;

        let semi: Vec<_> = elem.seminorm_indices().collect();
        let mut stacked = Vec::with_capacity(semi.len() * quad.len() * nd);
        for &(ki, k) in &semi {
            let t = elem.quad_table(ki);
            let coef = h.powi(total_degree(k) as i32) * h.powi(-(dim as i32)).sqrt() * derivative_scale(k, &cell);
            for q in 0..quad.len() {
                let s = coef * weights[q].sqrt();
                stacked.extend(t.row(q).iter().map(|v| v * s));
            }
        }
        let seminorm_factor = Matrix::from_rows(semi.len() * quad.len(), nd, stacked).qr_r();

        let pointwise_rows = |rows_of: &dyn Fn(usize) -> Vec<f64>| -> Matrix {
            let data: Vec<f64> = semi
                .iter()
                .flat_map(|&(ki, k)| {
                    let s = derivative_scale(k, &cell) * h.powi(total_degree(k) as i32);
                    rows_of(ki).into_iter().map(move |v| v * s)
                })
                .collect();
            Matrix::from_rows(semi.len(), nd, data)
        };
        let ncorners = 1 << dim;
        let corner_pointwise = (0..ncorners)
            .map(|c| pointwise_rows(&|ki| elem.vertex_table(c).row(ki).to_vec()))
            .collect();
        let quad_pointwise = (0..quad.len())
            .map(|q| pointwise_rows(&|ki| elem.quad_table(ki).row(q).to_vec()))
            .collect();

        let extension_1d = [
            elem.basis_1d().extension_matrix(-1.0),
            elem.basis_1d().extension_matrix(0.0),
            elem.basis_1d().extension_matrix(1.0),
        ];

        let nfaces = 2 * dim;
        let (s, w) = super::quadrature::gauss_legendre(if over_integrate { p + 2 } else { p + 1 });
        let mut face_traces = Vec::new();
        let mut face_weights = Vec::new();
        let mut face_points = Vec::new();
        for f in 0..nfaces {
            let pts: Vec<Point> = if dim == 1 {
                vec![face_center(1, f)]
            } else {
                s.iter()
                    .map(|&t| match f {
                        0 => [0.0, t],
                        1 => [1.0, t],
                        2 => [t, 0.0],
                        _ => [t, 1.0],
                    })
                    .collect()
            };
            let wts: Vec<f64> = if dim == 1 {
                vec![1.0]
            } else {
                let len = if f < 2 { cell.size[1] } else { cell.size[0] };
                w.iter().map(|v| v * len).collect()
            };
            face_traces.push(elem.tabulate([0, 0], &pts));
            face_weights.push(wts);
            face_points.push(pts);
        }

        Ok(Self {
            dim,
            degree: p,
            ndofs: nd,
            cell,
            measure,
            diameter: h,
            quad,
            weights,
            basis,
            grad,
            node_points,
            node_grad,
            flux_quad,
            flux_weights,
            flux_basis,
            flux_grad,
            average,
            mass,
            mass_inv,
            seminorm_factor,
            corner_pointwise,
            quad_pointwise,
            extension_1d,
            face_traces,
            face_weights,
            face_points,
        })
    }

    pub fn average(&self, v: &[f64]) -> f64 {
        dot(&self.average, v)
    }

    /// Element semi-norm through the precomputed factor.
    pub fn seminorm(&self, v: &[f64]) -> f64 {
        Self::pointwise(&self.seminorm_factor, v)
    }

    fn pointwise(m: &Matrix, v: &[f64]) -> f64 {
        let c0 = v[0];
        let mut sum = 0.0;
        for r in 0..m.rows() {
            let d: f64 = m.row(r).iter().zip(v).map(|(a, b)| a * (b - c0)).sum();
            sum += d * d;
        }
        sum.sqrt()
    }

    pub fn corner_seminorm(&self, v: &[f64], corner: usize) -> f64 {
        Self::pointwise(&self.corner_pointwise[corner], v)
    }

    pub fn quad_point_seminorm(&self, v: &[f64], q: usize) -> f64 {
        Self::pointwise(&self.quad_pointwise[q], v)
    }

    /// Values at this cell's nodes of the polynomial carried by the cell displaced by
    /// `offset` cells (each entry in `{-1, 0, 1}`), i.e. its polynomial extension.
    ///
    /// Applied by sum factorization on data shifted by its first value; the extension
    /// reproduces constants, so the shift is added back exactly.
    pub fn extend(&self, source: &[f64], offset: [i32; 2], out: &mut [f64]) {
        let n = self.degree + 1;
        let c0 = source[0];
        let ex = &self.extension_1d[(offset[0] + 1) as usize];
        if self.dim == 1 {
            for a in 0..n {
                let row = ex.row(a);
                out[a] = c0 + (0..n).map(|i| row[i] * (source[i] - c0)).sum::<f64>();
            }
            return;
        }
        let ey = &self.extension_1d[(offset[1] + 1) as usize];
        let mut stack = [0.0; 121];
        let mut heap = Vec::new();
        let tmp: &mut [f64] = if n * n <= stack.len() {
            &mut stack[..n * n]
        } else {
            heap.resize(n * n, 0.0);
            &mut heap
        };
        for b in 0..n {
            let row = ey.row(b);
            for i in 0..n {
                tmp[i + n * b] = (0..n).map(|j| row[j] * (source[i + n * j] - c0)).sum();
            }
        }
        for b in 0..n {
            for a in 0..n {
                let row = ex.row(a);
                out[a + n * b] = c0 + (0..n).map(|i| row[i] * tmp[i + n * b]).sum::<f64>();
            }
        }
    }

    /// Extension of the neighbor polynomial across `face` onto this cell.
    pub fn extend_from_face(&self, neighbor: &[f64], face: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.ndofs];
        self.extend(neighbor, face_offset(face), &mut out);
        out
    }

    pub fn values_at_quad(&self, v: &[f64], out: &mut [f64]) {
        self.basis.matvec_into(v, out);
    }

    pub fn mass_inv(&self) -> &Matrix {
        &self.mass_inv
    }
}

#[cfg(test)]
mod tests {
    use super::super::{element_seminorm, nodal_from_taylor, pointwise_seminorm, taylor_from_nodal};
    use crate::mesh::CellGeometry;
    use super::*;

    fn sample(elem: &ReferenceElement, cell: &CellGeometry, seed: f64) -> Vec<f64> {
        elem.interpolate(cell, |x| (3.0 * x[0] + seed).sin() * (2.0 * x[1] - seed).cos() * 3.0 + 10.0)
    }

    #[test]
    fn fast_seminorms_match_reference_definitions() {
        for dim in 1..=2 {
            for p in 1..=4 {
                let elem = ReferenceElement::new(dim, p).unwrap();
                let size = [0.125, 0.0625];
                let ops = ElementOperators::new(&elem, size, false).unwrap();
                let u = sample(&elem, &ops.cell, 0.3);
                let slow = element_seminorm(&elem, &u, &ops.cell, elem.quadrature());
                assert!((ops.seminorm(&u) - slow).abs() <= 1e-12 * slow, "dim={dim} p={p}: {} vs {slow}", ops.seminorm(&u));
                for c in 0..ops.cell.num_corners() {
                    let slow = pointwise_seminorm(&elem, &u, &ops.cell, ops.cell.corner(c)).unwrap();
                    assert!((ops.corner_seminorm(&u, c) - slow).abs() <= 1e-12 * slow);
                }
                for (q, xi) in ops.quad.points.iter().enumerate() {
                    let slow = pointwise_seminorm(&elem, &u, &ops.cell, ops.cell.to_physical(*xi)).unwrap();
                    assert!((ops.quad_point_seminorm(&u, q) - slow).abs() <= 1e-12 * slow);
                }
            }
        }
    }

    #[test]
    fn extension_matches_taylor_route_through_shared_vertex() {
        for dim in 1..=2 {
            for p in 1..=4 {
                let elem = ReferenceElement::new(dim, p).unwrap();
                let h = [0.5, 0.25];
                let ops = ElementOperators::new(&elem, h, false).unwrap();
                let target = ops.cell;
                let offsets: Vec<[i32; 2]> = if dim == 1 {
                    vec![[-1, 0], [0, 0], [1, 0]]
                } else {
                    (-1..=1).flat_map(|oy| (-1..=1).map(move |ox| [ox, oy])).collect()
                };
                for off in offsets {
                    let lo = [off[0] as f64 * h[0], off[1] as f64 * h[1]];
                    let src = if dim == 1 {
                        CellGeometry::interval(lo[0], lo[0] + h[0])
                    } else {
                        CellGeometry::rectangle(lo, [lo[0] + h[0], lo[1] + h[1]])
                    };
                    let f = |x: Point| {
                        let py = if dim == 2 { (1.0 - 2.0 * x[1]).powi(p as i32) } else { 1.0 };
                        4.0 + (0.5 + 1.5 * x[0]).powi(p as i32) * py - x[0] * x[1]
                    };
                    let u = elem.interpolate(&src, f);
                    let exact = elem.interpolate(&target, f);
                    // a vertex shared by both cells
                    let v = [
                        if off[0] > 0 { h[0] } else { 0.0 },
                        if dim == 2 && off[1] > 0 { h[1] } else { 0.0 },
                    ];
                    let t = taylor_from_nodal(&elem, &u, &src, v).unwrap();
                    let slow = nodal_from_taylor(&elem, &t, &target);
                    let mut fast = vec![0.0; elem.ndofs()];
                    ops.extend(&u, off, &mut fast);
                    // Extrapolating nodal data amplifies its rounding by the Lebesgue-type
                    // constant of the extension, which bounds the attainable accuracy.
                    let lebesgue = |m: &Matrix| (0..m.rows()).map(|r| m.row(r).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
                    let mut bound = lebesgue(&ops.extension_1d[(off[0] + 1) as usize]);
                    if dim == 2 {
                        bound *= lebesgue(&ops.extension_1d[(off[1] + 1) as usize]);
                    }
                    let umax = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                    let tol = 4.0 * f64::EPSILON * bound * umax;
                    for ((a, b), e) in fast.iter().zip(&slow).zip(&exact) {
                        assert!((a - e).abs() <= tol, "dim={dim} p={p} {off:?}: {a} vs {e}");
                        assert!((b - e).abs() <= 1e3 * tol, "dim={dim} p={p} {off:?}: {b} vs {e}");
                    }
                }
            }
        }
    }

    #[test]
    fn face_extension_reproduces_global_polynomials() {
        let f = |x: Point| 1.0 + x[0] - 0.5 * x[1] + 2.0 * x[0] * x[0] * x[1] - x[1] * x[1];
        let elem = ReferenceElement::new(2, 2).unwrap();
        let h = [0.25, 0.5];
        let ops = ElementOperators::new(&elem, h, false).unwrap();
        let target = CellGeometry::rectangle([0.0, 0.0], h);
        let expect = elem.interpolate(&target, f);
        for (face, off) in [(0, [-1.0, 0.0]), (1, [1.0, 0.0]), (2, [0.0, -1.0]), (3, [0.0, 1.0])] {
            let o = [off[0] * h[0], off[1] * h[1]];
            let nb = CellGeometry::rectangle(o, [o[0] + h[0], o[1] + h[1]]);
            let ext = ops.extend_from_face(&elem.interpolate(&nb, f), face);
            for (a, b) in ext.iter().zip(&expect) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mass_and_average_are_consistent() {
        let elem = ReferenceElement::new(2, 3).unwrap();
        let ops = ElementOperators::new(&elem, [0.5, 0.2], true).unwrap();
        let ones = vec![1.0; elem.ndofs()];
        let total: f64 = ops.mass.matvec(&ones).iter().sum();
        assert!((total - ops.measure).abs() < 1e-14);
        assert!((ops.average(&ones) - 1.0).abs() < 1e-14);
        let id = ops.mass.matmul(&ops.mass_inv);
        for i in 0..elem.ndofs() {
            assert!((id[(i, i)] - 1.0).abs() < 1e-9);
        }
    }
}
