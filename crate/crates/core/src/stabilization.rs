//! Blended low/high-order artificial viscosity and the shock-capturing WENO quadrature.
//!
//! All per-cell routines add the dissipative form `s_h(u_h, φ_i)` into `out`; the
//! solver subtracts it from the residual.

use serde::{Deserialize, Serialize};

use crate::element::{ElementField, ElementOperators, SpaceKind};
use crate::mesh::CellGeometry;
use crate::physics::{ConservationLaw, State};
use crate::solver::DofMap;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Projection {
    /// Local dual functional on the lowest-index adjacent cell.
    ScottZhang,
    /// Equal-weight average over the cells sharing a node.
    NodalAverage,
    /// Global L2 projection with a row-sum lumped mass matrix.
    LumpedL2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilizationParams {
    /// Redistribution only happens on cells with `γ_e` below this value.
    pub cutoff: f64,
    pub redistribution: bool,
    pub projection: Projection,
}

impl Default for StabilizationParams {
    fn default() -> Self {
        Self {
            cutoff: 0.9,
            redistribution: false,
            projection: Projection::NodalAverage,
        }
    }
}

/// Per-stage stabilization data.
#[derive(Debug, Clone, Default)]
pub struct StabilizationState {
    pub gamma: Vec<f64>,
    pub lambda: Vec<f64>,
    pub nu: Vec<f64>,
    /// Per cell, per quadrature point scaling of the stabilization weights.
    pub alpha: Vec<Vec<f64>>,
}

/// `ν_e = λ_e h_e / (2p)`.
pub fn viscosity(lambda: f64, h: f64, p: usize) -> f64 {
    lambda * h / (2.0 * p as f64)
}

fn state_of(cell_values: &[f64], ncomp: usize, nodes: usize, evaluate: impl Fn(&[f64]) -> f64) -> State {
    let mut s = [0.0; 4];
    for c in 0..ncomp {
        s[c] = evaluate(&cell_values[c * nodes..(c + 1) * nodes]);
    }
    s
}

/// Largest flux-Jacobian spectral radius over the nodal and quadrature points of a cell.
///
/// `cell_values` holds all components of the cell (`[comp][node]`).
pub fn local_wavespeed(
    law: &ConservationLaw,
    cell_values: &[f64],
    ops: &ElementOperators,
    geometry: &CellGeometry,
    cell: usize,
) -> Result<f64> {
    if let Some(speed) = law.global_wave_speed() {
        return Ok(speed);
    }
    let m = law.num_components();
    let nd = ops.ndofs;
    let mut lambda: f64 = 0.0;
    for (i, xi) in ops.node_points.iter().enumerate() {
        let x = geometry.to_physical(*xi);
        let u = state_of(cell_values, m, nd, |b| b[i]);
        lambda = lambda.max(law.max_speed(&u, x).map_err(|e| e.at(cell, x))?);
    }
    for (q, xi) in ops.quad.points.iter().enumerate() {
        let x = geometry.to_physical(*xi);
        let row = ops.basis.row(q);
        let u = state_of(cell_values, m, nd, |b| row.iter().zip(b).map(|(a, v)| a * v).sum());
        lambda = lambda.max(law.max_speed(&u, x).map_err(|e| e.at(cell, x))?);
    }
    Ok(lambda)
}

fn gradient_at_quad(u: &[f64], ops: &ElementOperators) -> Vec<[f64; 2]> {
    let nq = ops.quad.len();
    let mut g = vec![[0.0; 2]; nq];
    for d in 0..ops.dim {
        for (q, gq) in g.iter_mut().enumerate() {
            gq[d] = ops.grad[d].row(q).iter().zip(u).map(|(a, b)| a * b).sum();
        }
    }
    g
}

fn values_at_quad(v: &[f64], ops: &ElementOperators) -> Vec<f64> {
    let mut out = vec![0.0; ops.quad.len()];
    ops.values_at_quad(v, &mut out);
    out
}

/// Adds `Σ_q c_q ∇φ_i(x_q)·v_q` to `out`.
fn add_weak_gradient(v: &[[f64; 2]], coeff: impl Fn(usize) -> f64, ops: &ElementOperators, out: &mut [f64]) {
    for (q, vq) in v.iter().enumerate() {
        let c = coeff(q);
        for d in 0..ops.dim {
            let s = c * vq[d];
            for (o, g) in out.iter_mut().zip(ops.grad[d].row(q)) {
                *o += s * g;
            }
        }
    }
}

fn weight(ops: &ElementOperators, alpha: Option<&[f64]>, q: usize) -> f64 {
    match alpha {
        Some(a) => a[q] * ops.weights[q],
        None => ops.weights[q],
    }
}

/// Low-order term `ν Σ_q α_q ω_q ∇φ_i·∇u_h`; `alpha = None` means all ones.
pub fn apply_low_order(u: &[f64], ops: &ElementOperators, nu: f64, alpha: Option<&[f64]>, out: &mut [f64]) {
    let g = gradient_at_quad(u, ops);
    add_weak_gradient(&g, |q| nu * weight(ops, alpha, q), ops, out);
}

/// Blended term `ν Σ_q α_q ω_q ∇φ_i·(∇u_h − γ P_h∇u_h)`.
///
/// `projected` holds the nodal values of `P_h∇u_h` on this cell, one slice per axis.
/// For DG pass `None`: the cellwise L2 projection reproduces `∇u_h`, so the operator
/// reduces to `(1−γ)` times the low-order term.
pub fn apply_high_order(
    u: &[f64],
    projected: Option<&[&[f64]]>,
    ops: &ElementOperators,
    nu: f64,
    gamma: f64,
    alpha: Option<&[f64]>,
    out: &mut [f64],
) {
    let mut g = gradient_at_quad(u, ops);
    match projected {
        Some(pg) => {
            for d in 0..ops.dim {
                let pq = values_at_quad(pg[d], ops);
                for (gq, p) in g.iter_mut().zip(&pq) {
                    gq[d] -= gamma * p;
                }
            }
            add_weak_gradient(&g, |q| nu * weight(ops, alpha, q), ops, out);
        }
        None => add_weak_gradient(&g, |q| (1.0 - gamma) * nu * weight(ops, alpha, q), ops, out),
    }
}

/// Cell dissipation rate `D_e = ν Σ_q ω_q f_q` and the integrand values `f_q`.
pub fn dissipation_rate(
    u: &[f64],
    projected: Option<&[&[f64]]>,
    ops: &ElementOperators,
    gamma: f64,
    nu: f64,
) -> (f64, Vec<f64>) {
    let g = gradient_at_quad(u, ops);
    let f: Vec<f64> = match projected {
        None => g.iter().map(|gq| (1.0 - gamma) * (gq[0] * gq[0] + gq[1] * gq[1])).collect(),
        Some(pg) => {
            let pq: Vec<Vec<f64>> = (0..ops.dim).map(|d| values_at_quad(pg[d], ops)).collect();
            g.iter()
                .enumerate()
                .map(|(q, gq)| {
                    let mut s = gq[0] * gq[0] + gq[1] * gq[1];
                    for d in 0..ops.dim {
                        s -= gamma * gq[d] * pq[d][q];
                    }
                    s
                })
                .collect()
        }
    };
    let d = nu * f.iter().zip(&ops.weights).map(|(a, w)| a * w).sum::<f64>();
    (d, f)
}

/// Scaling factors `α_q` of the shock-capturing WENO quadrature.
///
/// Falls back to all ones when `γ_e ≥ cutoff`, `p = 1`, or the normalization is
/// degenerate (zero semi-norm, zero dissipation, or a vanishing denominator).
pub fn shock_capturing_weights(u: &[f64], ops: &ElementOperators, f: &[f64], gamma: f64, cutoff: f64) -> Vec<f64> {
    let nq = ops.quad.len();
    let ones = vec![1.0; nq];
    if gamma >= cutoff || ops.degree == 1 {
        return ones;
    }
    let norm = ops.seminorm(u);
    let total: f64 = f.iter().zip(&ops.weights).map(|(a, w)| a * w).sum();
    if !(norm > 0.0) || total == 0.0 {
        return ones;
    }
    let prelim: Vec<f64> = (0..nq).map(|q| ops.quad_point_seminorm(u, q) / norm).collect();
    let scaled: f64 = (0..nq).map(|q| ops.weights[q] * prelim[q] * f[q]).sum();
    if !(scaled.abs() > 1e-14 * total.abs()) {
        return ones;
    }
    let factor = total / scaled;
    let alpha: Vec<f64> = prelim.iter().map(|a| a * factor).collect();
    if alpha.iter().all(|a| a.is_finite()) {
        alpha
    } else {
        ones
    }
}

/// Nodal gradients of every component: component `c*dim + d` holds `∂_d u_c`.
pub fn cell_gradients(field: &ElementField, ops: &ElementOperators) -> ElementField {
    let dim = ops.dim;
    let m = field.num_components();
    let mut out = ElementField::zeros(field.num_cells(), m * dim, ops.ndofs);
    for e in 0..field.num_cells() {
        for c in 0..m {
            for d in 0..dim {
                let g = ops.node_grad[d].matvec(field.block(e, c));
                out.block_mut(e, c * dim + d).copy_from_slice(&g);
            }
        }
    }
    out
}

fn moments(v: &[f64], ops: &ElementOperators) -> Vec<f64> {
    let vq = values_at_quad(v, ops);
    let wv: Vec<f64> = vq.iter().zip(&ops.weights).map(|(a, w)| a * w).collect();
    let mut b = vec![0.0; ops.ndofs];
    ops.basis.tr_matvec_add(&wv, &mut b);
    b
}

/// Per-cell L2 projection `M_e^{-1} ∫ φ_j g` of every component.
pub fn l2_project_cellwise(field: &ElementField, ops: &ElementOperators) -> ElementField {
    let mut out = field.clone();
    for e in 0..field.num_cells() {
        for c in 0..field.num_components() {
            let b = moments(field.block(e, c), ops);
            out.block_mut(e, c).copy_from_slice(&ops.mass_inv.matvec(&b));
        }
    }
    out
}

/// Scott-Zhang quasi-interpolation of broken per-cell data into the continuous space.
///
/// Each global node takes the dual functional `ψ_i = Σ_j (M_e^{-1})_{ij} φ_j` applied
/// to the data of the lowest-index cell containing it. For nodal `Q_p` data the local
/// projection is the identity, so this is the owner cell's nodal value.
pub fn scott_zhang_project(field: &ElementField, map: &DofMap) -> Result<ElementField> {
    if map.space() != SpaceKind::Continuous {
        return Err(Error::Usage("Scott-Zhang projection needs a continuous space".into()));
    }
    let m = field.num_components();
    Ok(map.gather(&map.from_cells(field), m))
}

/// Equal-weight average of the adjacent cells' nodal values at every shared node.
pub fn nodal_average_project(field: &ElementField, map: &DofMap) -> Result<ElementField> {
    if map.space() != SpaceKind::Continuous {
        return Err(Error::Usage("nodal averaging needs a continuous space".into()));
    }
    let m = field.num_components();
    let n = map.num_dofs();
    let mut sum = vec![0.0; m * n];
    let mut count = vec![0.0; n];
    for e in 0..field.num_cells() {
        let dofs = map.cell_dofs(e);
        for &g in dofs {
            count[g] += 1.0;
        }
        for c in 0..m {
            for (v, &g) in field.block(e, c).iter().zip(dofs) {
                sum[c * n + g] += v;
            }
        }
    }
    for c in 0..m {
        for g in 0..n {
            sum[c * n + g] /= count[g];
        }
    }
    Ok(map.gather(&sum, m))
}

/// Lumped-mass L2 projection: `P g(x_i) = Σ_e ∫ φ_i g_e / Σ_e ∫ φ_i`.
pub fn lumped_l2_project(field: &ElementField, ops: &ElementOperators, map: &DofMap) -> Result<ElementField> {
    if map.space() != SpaceKind::Continuous {
        return Err(Error::Usage("lumped L2 projection needs a continuous space".into()));
    }
    let m = field.num_components();
    let n = map.num_dofs();
    let mut num = vec![0.0; m * n];
    let mut den = vec![0.0; n];
    for e in 0..field.num_cells() {
        let dofs = map.cell_dofs(e);
        for (j, &g) in dofs.iter().enumerate() {
            den[g] += ops.average[j] * ops.measure;
        }
        for c in 0..m {
            let b = moments(field.block(e, c), ops);
            for (j, &g) in dofs.iter().enumerate() {
                num[c * n + g] += b[j];
            }
        }
    }
    for c in 0..m {
        for g in 0..n {
            num[c * n + g] /= den[g];
        }
    }
    Ok(map.gather(&num, m))
}

/// Continuous projection of the per-cell gradients, using the configured variant.
pub fn project_gradients(
    field: &ElementField,
    ops: &ElementOperators,
    map: &DofMap,
    projection: Projection,
) -> Result<ElementField> {
    let grads = cell_gradients(field, ops);
    match projection {
        Projection::ScottZhang => scott_zhang_project(&grads, map),
        Projection::NodalAverage => nodal_average_project(&grads, map),
        Projection::LumpedL2 => lumped_l2_project(&grads, ops, map),
    }
}
