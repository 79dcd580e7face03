//! Hermite-WENO reconstructions and the smoothness sensor.
//!
//! Two candidate families are provided. Cell-cell (CC) candidates are the face
//! neighbours' polynomials extended onto the target cell and shifted to its mean.
//! Cell-vertex (CV) candidates are vertex-centred WENO averages of the patch
//! polynomials; they are built in two passes, first the nonlinear weights per vertex,
//! then one extension per (cell, vertex) pair.
//!
//! All routines act on scalar fields; for systems the caller extracts the sensing
//! component.

use serde::{Deserialize, Serialize};

use crate::element::{
    pointwise_seminorm, taylor_from_nodal, ElementField, ElementOperators, ReferenceElement, SpaceKind, TaylorPoly,
};
use crate::mesh::{FaceNeighbor, StructuredMesh};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WenoScheme {
    #[serde(rename = "cc")]
    CellCell,
    #[serde(rename = "cv")]
    CellVertex,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WenoParams {
    pub epsilon: f64,
    pub r: f64,
    pub q_sensor: f64,
    pub q_beta: f64,
    pub gamma_vertex: f64,
    pub scheme: WenoScheme,
}

impl Default for WenoParams {
    fn default() -> Self {
        Self {
            epsilon: 1e-6,
            r: 2.0,
            q_sensor: 1.0,
            q_beta: 2.0,
            gamma_vertex: 1e-3,
            scheme: WenoScheme::CellVertex,
        }
    }
}

impl WenoParams {
    pub fn with_scheme(scheme: WenoScheme) -> Self {
        Self {
            scheme,
            ..Self::default()
        }
    }

    /// `candidates_per_cell` is `v_e` (CV) or the face count (CC).
    pub fn validate(&self, candidates_per_cell: usize) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(format!("invalid WENO parameter: {what}")));
        if !(self.epsilon > 0.0) {
            return bad("epsilon must be > 0");
        }
        if !(self.r >= 1.0) {
            return bad("r must be >= 1");
        }
        if !(self.q_sensor >= 1.0) {
            return bad("q_sensor must be >= 1");
        }
        if !(self.q_beta >= 1.0) {
            return bad("q_beta must be >= 1");
        }
        let total = self.gamma_vertex * candidates_per_cell as f64;
        if !(self.gamma_vertex > 0.0 && total < 1.0) {
            return bad("need 0 < gamma_vertex * v_e < 1");
        }
        Ok(())
    }
}

/// `ω_l = (γ_l/(ε+β_l)^r) / Σ_j γ_j/(ε+β_j)^r`. Linear weights are normalized first.
pub fn jiang_shu_weights(betas: &[f64], linear: &[f64], epsilon: f64, r: f64) -> Vec<f64> {
    assert_eq!(betas.len(), linear.len());
    let lin_sum: f64 = linear.iter().sum();
    let raw: Vec<f64> = betas
        .iter()
        .zip(linear)
        .map(|(b, g)| (g / lin_sum) / (epsilon + b).powf(r))
        .collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|w| w / total).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateSource {
    SelfCell,
    FaceNeighbor(usize),
    Vertex(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub source: CandidateSource,
    /// Nodal coefficients on the target cell.
    pub coeffs: Vec<f64>,
    pub beta: f64,
    pub linear_weight: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub target: usize,
    pub candidates: Vec<Candidate>,
}

impl CandidateSet {
    /// Builds the set from the target polynomial and extra candidates, assigning
    /// `γ_vert` to each extra candidate, the remainder to the target's own polynomial,
    /// and Jiang-Shu weights from element semi-norm indicators.
    fn weighted(
        target: usize,
        own: &[f64],
        extra: Vec<(CandidateSource, Vec<f64>)>,
        ops: &ElementOperators,
        params: &WenoParams,
    ) -> Self {
        let g0 = 1.0 - extra.len() as f64 * params.gamma_vertex;
        let mut candidates = Vec::with_capacity(extra.len() + 1);
        candidates.push(Candidate {
            source: CandidateSource::SelfCell,
            beta: ops.seminorm(own).powf(params.q_beta),
            coeffs: own.to_vec(),
            linear_weight: g0,
            weight: 0.0,
        });
        for (source, coeffs) in extra {
            candidates.push(Candidate {
                source,
                beta: ops.seminorm(&coeffs).powf(params.q_beta),
                coeffs,
                linear_weight: params.gamma_vertex,
                weight: 0.0,
            });
        }
        let betas: Vec<f64> = candidates.iter().map(|c| c.beta).collect();
        let lin: Vec<f64> = candidates.iter().map(|c| c.linear_weight).collect();
        for (c, w) in candidates.iter_mut().zip(jiang_shu_weights(&betas, &lin, params.epsilon, params.r)) {
            c.weight = w;
        }
        Self { target, candidates }
    }

    /// `Σ_l ω_l u_l` on the target cell.
    pub fn reconstruction(&self) -> Vec<f64> {
        let n = self.candidates[0].coeffs.len();
        let mut out = vec![0.0; n];
        for c in &self.candidates {
            for (o, v) in out.iter_mut().zip(&c.coeffs) {
                *o += c.weight * v;
            }
        }
        out
    }
}

/// Adds the constant that makes the candidate's mean equal to that of `target_coeffs`.
pub fn mean_corrected_candidate(candidate: &[f64], target_coeffs: &[f64], ops: &ElementOperators) -> Vec<f64> {
    let shift = ops.average(target_coeffs) - ops.average(candidate);
    candidate.iter().map(|v| v + shift).collect()
}

/// Cell-cell HWENO candidates of `target`: the own polynomial and one mean-corrected
/// extension per face neighbour (boundary faces contribute none).
pub fn cell_cell_candidates(
    field: &ElementField,
    mesh: &StructuredMesh,
    ops: &ElementOperators,
    target: usize,
    params: &WenoParams,
) -> Result<CandidateSet> {
    let own = field.block(target, 0);
    let mut extra = Vec::with_capacity(4);
    for (face, nb) in mesh.face_neighbors(target)?.iter().enumerate() {
        if let FaceNeighbor::Cell(e) = *nb {
            let ext = ops.extend_from_face(field.block(e, 0), face);
            extra.push((CandidateSource::FaceNeighbor(e), mean_corrected_candidate(&ext, own, ops)));
        }
    }
    Ok(CandidateSet::weighted(target, own, extra, ops, params))
}

/// Nonlinear weights of the cells of one vertex patch, aligned with
/// [`StructuredMesh::patch_entries`].
pub fn vertex_weights(
    field: &ElementField,
    mesh: &StructuredMesh,
    ops: &ElementOperators,
    vertex: usize,
    params: &WenoParams,
) -> Result<Vec<f64>> {
    let entries = mesh.patch_entries(vertex)?;
    if entries.is_empty() {
        return Err(Error::Connectivity(format!("vertex {vertex} has an empty patch")));
    }
    let betas: Vec<f64> = entries
        .iter()
        .map(|pe| ops.corner_seminorm(field.block(pe.cell, 0), pe.corner).powf(params.q_beta))
        .collect();
    Ok(jiang_shu_weights(&betas, &vec![1.0; betas.len()], params.epsilon, params.r))
}

/// Vertex-centred WENO average of the patch polynomials as a Taylor polynomial about the vertex.
pub fn vertex_candidate(
    field: &ElementField,
    mesh: &StructuredMesh,
    elem: &ReferenceElement,
    vertex: usize,
    params: &WenoParams,
) -> Result<TaylorPoly> {
    let x = mesh.vertex_coords(vertex)?;
    let entries = mesh.patch_entries(vertex)?;
    if entries.is_empty() {
        return Err(Error::Connectivity(format!("vertex {vertex} has an empty patch")));
    }
    let mut polys = Vec::with_capacity(entries.len());
    let mut betas = Vec::with_capacity(entries.len());
    for pe in entries {
        let cell = mesh.cell_geometry(pe.cell);
        let corner = cell.corner(pe.corner);
        let coeffs = field.block(pe.cell, 0);
        betas.push(pointwise_seminorm(elem, coeffs, &cell, corner)?.powf(params.q_beta));
        let mut t = taylor_from_nodal(elem, coeffs, &cell, corner)?;
        // on periodic meshes the corner may be an image of the vertex
        t.center = x;
        polys.push(t);
    }
    let w = jiang_shu_weights(&betas, &vec![1.0; betas.len()], params.epsilon, params.r);
    let terms: Vec<(f64, &TaylorPoly)> = w.iter().copied().zip(polys.iter()).collect();
    Ok(TaylorPoly::weighted_sum(&terms))
}

/// Offset (in cells) of the patch cell touching a vertex at `other_corner`, relative to
/// the cell touching it at `corner`.
fn corner_offset(corner: usize, other_corner: usize) -> [i32; 2] {
    [
        (corner & 1) as i32 - (other_corner & 1) as i32,
        ((corner >> 1) & 1) as i32 - ((other_corner >> 1) & 1) as i32,
    ]
}

/// Nodal values on `target` of the vertex candidate at its corner `corner`, given the
/// patch weights from [`vertex_weights`].
fn vertex_candidate_on_cell(
    field: &ElementField,
    mesh: &StructuredMesh,
    ops: &ElementOperators,
    vertex: usize,
    corner: usize,
    weights: &[f64],
    scratch: &mut [f64],
) -> Result<Vec<f64>> {
    let mut out = vec![0.0; ops.ndofs];
    for (pe, w) in mesh.patch_entries(vertex)?.iter().zip(weights) {
        ops.extend(field.block(pe.cell, 0), corner_offset(corner, pe.corner), scratch);
        for (o, v) in out.iter_mut().zip(scratch.iter()) {
            *o += w * v;
        }
    }
    Ok(out)
}

fn cv_set_with_weights(
    field: &ElementField,
    mesh: &StructuredMesh,
    ops: &ElementOperators,
    target: usize,
    params: &WenoParams,
    weights_of: &dyn Fn(usize) -> Result<Vec<f64>>,
) -> Result<CandidateSet> {
    let mut scratch = vec![0.0; ops.ndofs];
    let mut extra = Vec::with_capacity(4);
    for (corner, &v) in mesh.cell_vertices(target).iter().enumerate() {
        let w = weights_of(v)?;
        let cand = vertex_candidate_on_cell(field, mesh, ops, v, corner, &w, &mut scratch)?;
        extra.push((CandidateSource::Vertex(v), cand));
    }
    Ok(CandidateSet::weighted(target, field.block(target, 0), extra, ops, params))
}

/// Cell-vertex candidate set of `target` (own polynomial plus one candidate per vertex).
pub fn cell_vertex_candidates(
    field: &ElementField,
    mesh: &StructuredMesh,
    ops: &ElementOperators,
    target: usize,
    params: &WenoParams,
) -> Result<CandidateSet> {
    cv_set_with_weights(field, mesh, ops, target, params, &|v| vertex_weights(field, mesh, ops, v, params))
}

/// `u_h^{e,*}` of the cell-vertex scheme on `target`, without mean correction.
pub fn cell_vertex_reconstruct(
    field: &ElementField,
    mesh: &StructuredMesh,
    ops: &ElementOperators,
    target: usize,
    params: &WenoParams,
) -> Result<Vec<f64>> {
    Ok(cell_vertex_candidates(field, mesh, ops, target, params)?.reconstruction())
}

/// `γ_e = 1 − min(1, ‖u − u*‖_e / ‖u‖_e)^q`; constant cells count as smooth.
pub fn smoothness_sensor(u: &[f64], reconstruction: &[f64], ops: &ElementOperators, params: &WenoParams) -> f64 {
    let norm = ops.seminorm(u);
    let diff: Vec<f64> = u.iter().zip(reconstruction).map(|(a, b)| a - b).collect();
    let dev = ops.seminorm(&diff);
    if norm < 1e-14 * ops.average(u).abs() || (norm == 0.0 && dev == 0.0) {
        return 1.0;
    }
    1.0 - (dev / norm).min(1.0).powf(params.q_sensor)
}

/// Reconstructions of every cell with the configured scheme (two passes for CV).
pub fn reconstruct_all(
    field: &ElementField,
    mesh: &StructuredMesh,
    ops: &ElementOperators,
    params: &WenoParams,
) -> Result<Vec<CandidateSet>> {
    match params.scheme {
        WenoScheme::CellCell => (0..mesh.num_cells())
            .map(|e| cell_cell_candidates(field, mesh, ops, e, params))
            .collect(),
        WenoScheme::CellVertex => {
            // Each vertex candidate is formed once on the first cell of its patch and
            // then extended to the remaining patch cells.
            let ncorners = 1 << mesh.dim();
            let mut on_cell: Vec<Vec<f64>> = vec![Vec::new(); mesh.num_cells() * ncorners];
            let mut scratch = vec![0.0; ops.ndofs];
            for v in 0..mesh.num_vertices() {
                let w = vertex_weights(field, mesh, ops, v, params)?;
                let entries = mesh.patch_entries(v)?;
                let first = entries[0];
                let cand = vertex_candidate_on_cell(field, mesh, ops, v, first.corner, &w, &mut scratch)?;
                for pe in &entries[1..] {
                    let mut out = vec![0.0; ops.ndofs];
                    ops.extend(&cand, corner_offset(pe.corner, first.corner), &mut out);
                    on_cell[pe.cell * ncorners + pe.corner] = out;
                }
                on_cell[first.cell * ncorners + first.corner] = cand;
            }
            (0..mesh.num_cells())
                .map(|e| {
                    let extra = mesh
                        .cell_vertices(e)
                        .iter()
                        .enumerate()
                        .map(|(corner, &v)| {
                            (CandidateSource::Vertex(v), std::mem::take(&mut on_cell[e * ncorners + corner]))
                        })
                        .collect();
                    Ok(CandidateSet::weighted(e, field.block(e, 0), extra, ops, params))
                })
                .collect()
        }
    }
}

/// Smoothness sensor of every cell.
pub fn sensor_field(
    field: &ElementField,
    mesh: &StructuredMesh,
    ops: &ElementOperators,
    params: &WenoParams,
) -> Result<Vec<f64>> {
    let sets = reconstruct_all(field, mesh, ops, params)?;
    Ok(sets
        .iter()
        .enumerate()
        .map(|(e, set)| smoothness_sensor(field.block(e, 0), &set.reconstruction(), ops, params))
        .collect())
}

/// HWENO limiter for DG fields: cells with `γ_e < threshold` are overwritten by their
/// mean-corrected reconstruction. Every component is limited with its own sensor.
pub fn hweno_limit(
    field: &ElementField,
    mesh: &StructuredMesh,
    ops: &ElementOperators,
    space: SpaceKind,
    params: &WenoParams,
    threshold: f64,
) -> Result<ElementField> {
    if space != SpaceKind::Discontinuous {
        return Err(Error::Usage("the HWENO limiter overwrites cell polynomials and needs a DG field".into()));
    }
    let mut out = field.clone();
    for c in 0..field.num_components() {
        let comp = field.component(c);
        let sets = reconstruct_all(&comp, mesh, ops, params)?;
        for (e, set) in sets.iter().enumerate() {
            let u = comp.block(e, 0);
            let rec = set.reconstruction();
            if smoothness_sensor(u, &rec, ops, params) < threshold {
                out.block_mut(e, c).copy_from_slice(&mean_corrected_candidate(&rec, u, ops));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_mesh;
    use crate::Point;

    fn setup(dim: usize, p: usize, n: usize, periodic: bool) -> (StructuredMesh, ReferenceElement, ElementOperators) {
        let mesh = build_mesh(dim, [[0.0, 1.0], [0.0, 1.0]], [n, n], [periodic; 2]).unwrap();
        let elem = ReferenceElement::new(dim, p).unwrap();
        let ops = ElementOperators::new(&elem, mesh.spacing(), false).unwrap();
        (mesh, elem, ops)
    }

    fn interpolate(mesh: &StructuredMesh, elem: &ReferenceElement, f: impl Fn(Point) -> f64) -> ElementField {
        let blocks: Vec<Vec<f64>> = (0..mesh.num_cells())
            .map(|e| elem.interpolate(&mesh.cell_geometry(e), &f))
            .collect();
        ElementField::from_blocks(&blocks)
    }

    #[test]
    fn jiang_shu_examples() {
        let w = jiang_shu_weights(&[0.3; 4], &[1.0; 4], 1e-6, 2.0);
        assert!(w.iter().all(|v| (v - 0.25).abs() < 1e-15));
        let w = jiang_shu_weights(&[0.0, 1e12], &[0.5, 0.5], 1e-6, 2.0);
        assert!(w[0] >= 1.0 - 1e-15 && w[1] < 1e-30);
        let w = jiang_shu_weights(&[1.0, 3.0], &[0.5, 0.5], 1e-6, 2.0);
        let a = 1.0 / (1.0 + 1e-6f64).powi(2);
        let b = 1.0 / (3.0 + 1e-6f64).powi(2);
        assert!((w[0] - a / (a + b)).abs() < 1e-15);
        assert!((w[0] - 0.9).abs() < 5e-6);
    }

    #[test]
    fn cc_candidate_hand_example() {
        let mesh = build_mesh(1, [[0.0, 2.0], [0.0, 1.0]], [2, 1], [false, false]).unwrap();
        let elem = ReferenceElement::new(1, 1).unwrap();
        let ops = ElementOperators::new(&elem, mesh.spacing(), false).unwrap();
        let field = ElementField::from_blocks(&[vec![0.0, 0.0], vec![0.0, 1.0]]);
        let set = cell_cell_candidates(&field, &mesh, &ops, 0, &WenoParams::default()).unwrap();
        assert_eq!(set.candidates.len(), 2);
        assert_eq!(set.candidates[1].source, CandidateSource::FaceNeighbor(1));
        let c = &set.candidates[1].coeffs;
        assert!((c[0] + 0.5).abs() < 1e-14 && (c[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn mean_correction_examples() {
        let elem = ReferenceElement::new(1, 1).unwrap();
        let ops = ElementOperators::new(&elem, [1.0, 1.0], false).unwrap();
        let out = mean_corrected_candidate(&[0.0, 2.0], &[-1.0, 1.0], &ops);
        assert!((out[0] + 1.0).abs() < 1e-15 && (out[1] - 1.0).abs() < 1e-15);
        let out = mean_corrected_candidate(&[4.0, 4.0], &[1.0, 2.0], &ops);
        assert!(out.iter().all(|v| (v - 1.5).abs() < 1e-15));
        let same = mean_corrected_candidate(&[1.0, 3.0], &[0.0, 4.0], &ops);
        assert_eq!(same, vec![1.0, 3.0]);
    }

    #[test]
    fn vertex_candidate_examples() {
        let params = WenoParams::default();
        // slopes 0 and 100 on unit cells around x = 1
        let mesh = build_mesh(1, [[0.0, 2.0], [0.0, 1.0]], [2, 1], [false, false]).unwrap();
        let elem = ReferenceElement::new(1, 1).unwrap();
        let field = ElementField::from_blocks(&[vec![0.0, 0.0], vec![0.0, 100.0]]);
        let t = vertex_candidate(&field, &mesh, &elem, 1, &params).unwrap();
        assert!(t.coeffs[1].abs() <= 1e-20 * 100.0 + 1e-18);
        // equal indicators give plain averages
        let field = ElementField::from_blocks(&[vec![0.0, 1.0], vec![3.0, 2.0]]);
        let t = vertex_candidate(&field, &mesh, &elem, 1, &params).unwrap();
        assert!((t.coeffs[0] - 2.0).abs() < 1e-14 && t.coeffs[1].abs() < 1e-14);
    }

    #[test]
    fn fast_vertex_path_matches_taylor_api() {
        for dim in 1..=2 {
            let (mesh, elem, ops) = setup(dim, 3, 4, true);
            let field = interpolate(&mesh, &elem, |x| (6.0 * x[0]).sin() + (x[1] * 9.0).cos().abs());
            let params = WenoParams::default();
            for e in [0, mesh.num_cells() - 1] {
                let set = cell_vertex_candidates(&field, &mesh, &ops, e, &params).unwrap();
                let cell = mesh.cell_geometry(e);
                for (corner, &v) in mesh.cell_vertices(e).iter().enumerate() {
                    let mut t = vertex_candidate(&field, &mesh, &elem, v, &params).unwrap();
                    t.center = cell.corner(corner);
                    let slow = crate::element::nodal_from_taylor(&elem, &t, &cell);
                    for (a, b) in set.candidates[corner + 1].coeffs.iter().zip(&slow) {
                        assert!((a - b).abs() < 1e-10 * b.abs().max(1.0), "dim={dim} e={e}: {a} vs {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn candidate_counts_and_weight_sums() {
        for dim in 1..=2 {
            let (mesh, elem, ops) = setup(dim, 2, 3, false);
            let field = interpolate(&mesh, &elem, |x| if x[0] + 0.3 * x[1] < 0.45 { 1.0 } else { 0.2 });
            let params = WenoParams::default();
            for e in 0..mesh.num_cells() {
                let set = cell_vertex_candidates(&field, &mesh, &ops, e, &params).unwrap();
                assert_eq!(set.candidates.len(), (1 << dim) + 1);
                let lin: f64 = set.candidates.iter().map(|c| c.linear_weight).sum();
                let w: f64 = set.candidates.iter().map(|c| c.weight).sum();
                assert!((lin - 1.0).abs() < 1e-14);
                assert!((w - 1.0).abs() < 1e-12);
                assert!(set.candidates.iter().all(|c| c.weight >= 0.0));
                let cc = cell_cell_candidates(&field, &mesh, &ops, e, &params).unwrap();
                let lin: f64 = cc.candidates.iter().map(|c| c.linear_weight).sum();
                assert!((lin - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn sensor_examples() {
        let elem = ReferenceElement::new(1, 1).unwrap();
        let ops = ElementOperators::new(&elem, [0.5, 1.0], false).unwrap();
        let p = WenoParams::default();
        let u = [0.0, 1.0];
        assert_eq!(smoothness_sensor(&u, &u, &ops, &p), 1.0);
        assert_eq!(smoothness_sensor(&u, &[0.0, -2.0], &ops, &p), 0.0);
        assert!((smoothness_sensor(&u, &[0.0, 0.5], &ops, &p) - 0.5).abs() < 1e-15);
        assert_eq!(smoothness_sensor(&[3.0, 3.0], &[3.0, 7.0], &ops, &p), 1.0);
    }

    #[test]
    fn limiter_rejects_cg_and_preserves_means() {
        let (mesh, elem, ops) = setup(1, 2, 6, false);
        let field = interpolate(&mesh, &elem, |x| if x[0] < 0.55 { 0.0 } else { 1.0 });
        let p = WenoParams::default();
        assert!(matches!(
            hweno_limit(&field, &mesh, &ops, SpaceKind::Continuous, &p, 0.9),
            Err(Error::Usage(_))
        ));
        let out = hweno_limit(&field, &mesh, &ops, SpaceKind::Discontinuous, &p, 0.9).unwrap();
        for e in 0..mesh.num_cells() {
            assert!((ops.average(out.block(e, 0)) - ops.average(field.block(e, 0))).abs() < 1e-12);
        }
        assert_ne!(out, field);
    }
}
