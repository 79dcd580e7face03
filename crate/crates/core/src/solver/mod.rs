//! Semi-discrete residual assembly, mass solves and time stepping.

mod boundary;
mod dofmap;
mod limiter;

pub use boundary::{reflect, BoundaryCondition, BoundaryConditions, GhostFn, StateFn};
pub use dofmap::DofMap;
pub use limiter::zhang_shu_limit;

use serde::{Deserialize, Serialize};

use crate::element::{gauss_rule, ElementField, ElementOperators, ReferenceElement, SpaceKind};
use crate::linalg::{CsrMatrix, EnvelopeCholesky, Matrix};
use crate::mesh::{face_normal, FaceNeighbor, StructuredMesh};
use crate::physics::{ConservationLaw, State};
use crate::stabilization::{
    apply_high_order, dissipation_rate, local_wavespeed, project_gradients, shock_capturing_weights, viscosity,
    StabilizationParams, StabilizationState,
};
use crate::weno::{sensor_field, WenoParams};
use crate::{Error, Point, Result};

/// Source of the blending factor `γ_e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SensorMode {
    /// No stabilization term at all.
    Off,
    /// The same `γ_e` on every cell (0: low order, 1: high order).
    Fixed(f64),
    /// HWENO smoothness sensor of the configured scheme.
    Weno,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Initialization {
    Interpolation,
    L2Projection,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeOptions {
    pub sensor: SensorMode,
    pub weno: WenoParams,
    pub stabilization: StabilizationParams,
    /// Zhang-Shu limiting after every stage (DG Euler only).
    pub limiter: bool,
    pub eps_pos: f64,
    /// One extra Gauss point per axis for flux integrals.
    pub over_integrate: bool,
}

impl Default for SchemeOptions {
    fn default() -> Self {
        Self {
            sensor: SensorMode::Weno,
            weno: WenoParams::default(),
            stabilization: StabilizationParams::default(),
            limiter: false,
            eps_pos: 1e-8,
            over_integrate: true,
        }
    }
}

/// A discretized conservation law: `M du/dt = r(u, t)`.
pub struct DiscreteSystem {
    pub mesh: StructuredMesh,
    pub elem: ReferenceElement,
    pub ops: ElementOperators,
    pub map: DofMap,
    pub law: ConservationLaw,
    pub bcs: BoundaryConditions,
    pub options: SchemeOptions,
    mass: Option<CsrMatrix>,
    /// Cholesky factors of the 1D global mass matrices per axis; `M = M_y ⊗ M_x`.
    tensor_factors: Option<Vec<EnvelopeCholesky>>,
    /// `∫ φ_g` per global dof of one component.
    integrals: Vec<f64>,
    /// `λ_e` for laws whose wave speed does not depend on the state.
    fixed_wavespeeds: Option<Vec<f64>>,
}

impl std::fmt::Debug for DiscreteSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DiscreteSystem")
            .field("space", &self.map.space())
            .field("law", &self.law)
            .field("degree", &self.elem.degree())
            .field("cells", &self.mesh.num_cells())
            .finish()
    }
}

/// Shu-Osher SSP-RK3 step for a generic right-hand side `l(u, t)`, with `post`
/// applied after every stage.
pub fn ssp_rk3(
    u: &[f64],
    dt: f64,
    t: f64,
    l: impl Fn(&[f64], f64) -> Result<Vec<f64>>,
    post: impl Fn(&mut [f64]) -> Result<()>,
) -> Result<Vec<f64>> {
    let k0 = l(u, t)?;
    let mut u1: Vec<f64> = u.iter().zip(&k0).map(|(a, k)| a + dt * k).collect();
    post(&mut u1)?;
    let k1 = l(&u1, t + dt)?;
    let mut u2: Vec<f64> = (0..u.len()).map(|i| 0.75 * u[i] + 0.25 * (u1[i] + dt * k1[i])).collect();
    post(&mut u2)?;
    let k2 = l(&u2, t + 0.5 * dt)?;
    let mut u3: Vec<f64> = (0..u.len())
        .map(|i| u[i] / 3.0 + 2.0 / 3.0 * (u2[i] + dt * k2[i]))
        .collect();
    post(&mut u3)?;
    Ok(u3)
}

impl DiscreteSystem {
    pub fn new(
        mesh: StructuredMesh,
        degree: usize,
        space: SpaceKind,
        law: ConservationLaw,
        bcs: BoundaryConditions,
        options: SchemeOptions,
    ) -> Result<Self> {
        let dim = mesh.dim();
        if let ConservationLaw::Euler { dim: d, .. } = law {
            if d != dim {
                return Err(Error::Config(format!("Euler equations in {d}D on a {dim}D mesh")));
            }
        }
        if matches!(law, ConservationLaw::Kpp) && dim != 2 {
            return Err(Error::Config("the KPP problem is two-dimensional".into()));
        }
        bcs.validate(dim, mesh.periodic(), &law)?;
        if options.limiter && !(space == SpaceKind::Discontinuous && law.is_euler()) {
            return Err(Error::Config("the Zhang-Shu limiter is available for DG Euler runs only".into()));
        }
        if let SensorMode::Fixed(g) = options.sensor {
            if !(0.0..=1.0).contains(&g) {
                return Err(Error::Config(format!("fixed gamma {g} outside [0, 1]")));
            }
        }
        let ncand = match options.weno.scheme {
            crate::weno::WenoScheme::CellCell => 2 * dim,
            crate::weno::WenoScheme::CellVertex => 1 << dim,
        };
        options.weno.validate(ncand)?;
        let elem = ReferenceElement::new(dim, degree)?;
        let ops = ElementOperators::new(&elem, mesh.spacing(), options.over_integrate)?;
        let map = DofMap::new(&mesh, &elem, space);
        let nd = ops.ndofs;
        let mut integrals = vec![0.0; map.num_dofs()];
        for e in 0..mesh.num_cells() {
            for (j, &g) in map.cell_dofs(e).iter().enumerate() {
                integrals[g] += ops.average[j] * ops.measure;
            }
        }
        let mass = match space {
            SpaceKind::Discontinuous => None,
            SpaceKind::Continuous => {
                let mut triplets = Vec::with_capacity(mesh.num_cells() * nd * nd);
                for e in 0..mesh.num_cells() {
                    let dofs = map.cell_dofs(e);
                    for i in 0..nd {
                        for j in 0..nd {
                            triplets.push((dofs[i], dofs[j], ops.mass[(i, j)]));
                        }
                    }
                }
                Some(CsrMatrix::from_triplets(map.num_dofs(), triplets))
            }
        };
        let tensor_factors = match space {
            SpaceKind::Discontinuous => None,
            SpaceKind::Continuous => Some(tensor_mass_factors(&mesh, degree)?),
        };
        let fixed_wavespeeds = match law {
            ConservationLaw::Advection { .. } => {
                let zero = vec![0.0; nd];
                Some(
                    (0..mesh.num_cells())
                        .map(|e| local_wavespeed(&law, &zero, &ops, &mesh.cell_geometry(e), e))
                        .collect::<Result<Vec<_>>>()?,
                )
            }
            _ => None,
        };
        Ok(Self {
            mesh,
            elem,
            ops,
            map,
            law,
            bcs,
            options,
            mass,
            tensor_factors,
            integrals,
            fixed_wavespeeds,
        })
    }

    pub fn space(&self) -> SpaceKind {
        self.map.space()
    }

    pub fn num_components(&self) -> usize {
        self.law.num_components()
    }

    pub fn degree(&self) -> usize {
        self.elem.degree()
    }

    /// Length of a global state vector.
    pub fn len(&self) -> usize {
        self.num_components() * self.map.num_dofs()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_field(&self, u: &[f64]) -> ElementField {
        self.map.gather(u, self.num_components())
    }

    pub fn global_vector(&self, field: &ElementField) -> Vec<f64> {
        self.map.from_cells(field)
    }

    pub fn mass_matrix(&self) -> Option<&CsrMatrix> {
        self.mass.as_ref()
    }

    /// `∫ u_c` for every component.
    pub fn total_mass(&self, u: &[f64]) -> Vec<f64> {
        let m = self.num_components();
        match self.space() {
            SpaceKind::Continuous => {
                let n = self.map.num_dofs();
                (0..m)
                    .map(|c| u[c * n..(c + 1) * n].iter().zip(&self.integrals).map(|(a, b)| a * b).sum())
                    .collect()
            }
            SpaceKind::Discontinuous => {
                let f = self.cell_field(u);
                (0..m)
                    .map(|c| {
                        (0..self.mesh.num_cells())
                            .map(|e| self.ops.average(f.block(e, c)) * self.ops.measure)
                            .sum()
                    })
                    .collect()
            }
        }
    }

    /// Nodal interpolation or L2 projection of `f` into the discrete space.
    pub fn initialize(&self, f: &dyn Fn(Point) -> State, mode: Initialization) -> Result<Vec<f64>> {
        let m = self.num_components();
        let nd = self.ops.ndofs;
        let ncells = self.mesh.num_cells();
        let mut local = ElementField::zeros(ncells, m, nd);
        match mode {
            Initialization::Interpolation => {
                for e in 0..ncells {
                    let geom = self.mesh.cell_geometry(e);
                    for (i, xi) in self.ops.node_points.iter().enumerate() {
                        let s = f(geom.to_physical(*xi));
                        for c in 0..m {
                            local.block_mut(e, c)[i] = s[c];
                        }
                    }
                }
                Ok(self.map.from_cells(&local))
            }
            Initialization::L2Projection => {
                let rule = gauss_rule(self.mesh.dim(), self.degree() + 2);
                let basis = self.elem.tabulate([0, 0], &rule.points);
                for e in 0..ncells {
                    let geom = self.mesh.cell_geometry(e);
                    for (q, xi) in rule.points.iter().enumerate() {
                        let s = f(geom.to_physical(*xi));
                        let w = rule.weights[q] * self.ops.measure;
                        for c in 0..m {
                            for (b, phi) in local.block_mut(e, c).iter_mut().zip(basis.row(q)) {
                                *b += w * phi * s[c];
                            }
                        }
                    }
                }
                let mut rhs = vec![0.0; self.len()];
                self.map.scatter_add(&local, &mut rhs);
                self.solve_mass(&rhs)
            }
        }
    }

    /// `M^{-1} r`, per component.
    pub fn solve_mass(&self, r: &[f64]) -> Result<Vec<f64>> {
        match &self.mass {
            None => {
                let nd = self.ops.ndofs;
                let mut out = vec![0.0; r.len()];
                for (o, b) in out.chunks_mut(nd).zip(r.chunks(nd)) {
                    self.ops.mass_inv.matvec_into(b, o);
                }
                Ok(out)
            }
            Some(mass) => {
                let n = self.map.num_dofs();
                let mut out = vec![0.0; r.len()];
                for c in 0..self.num_components() {
                    let (b, x) = (&r[c * n..(c + 1) * n], &mut out[c * n..(c + 1) * n]);
                    x.copy_from_slice(b);
                    if let Some(factors) = &self.tensor_factors {
                        tensor_solve(factors, x);
                    }
                    mass.solve_pcg(b, x, 1e-12, 10 * n + 100)?;
                }
                Ok(out)
            }
        }
    }

    /// `λ_e` of every cell.
    pub fn wavespeeds(&self, field: &ElementField) -> Result<Vec<f64>> {
        if let Some(fixed) = &self.fixed_wavespeeds {
            return Ok(fixed.clone());
        }
        (0..self.mesh.num_cells())
            .map(|e| local_wavespeed(&self.law, field.cell(e), &self.ops, &self.mesh.cell_geometry(e), e))
            .collect()
    }

    /// `γ_e`, `λ_e`, `ν_e`, `α_q` for the current field, plus the projected gradients (CG).
    pub fn stabilization_state(&self, field: &ElementField) -> Result<(StabilizationState, Option<ElementField>)> {
        let ncells = self.mesh.num_cells();
        let gamma = match self.options.sensor {
            SensorMode::Off => vec![1.0; ncells],
            SensorMode::Fixed(g) => vec![g; ncells],
            SensorMode::Weno => sensor_field(&field.component(0), &self.mesh, &self.ops, &self.options.weno)?,
        };
        let lambda = self.wavespeeds(field)?;
        let nu: Vec<f64> = lambda
            .iter()
            .map(|&l| viscosity(l, self.ops.diameter, self.degree()))
            .collect();
        let projected = match (self.space(), self.options.sensor) {
            (SpaceKind::Continuous, SensorMode::Fixed(g)) if g == 0.0 => None,
            (SpaceKind::Continuous, SensorMode::Off) => None,
            (SpaceKind::Continuous, _) => Some(project_gradients(
                field,
                &self.ops,
                &self.map,
                self.options.stabilization.projection,
            )?),
            (SpaceKind::Discontinuous, _) => None,
        };
        let dim = self.mesh.dim();
        let alpha = if self.options.stabilization.redistribution && self.options.sensor != SensorMode::Off {
            (0..ncells)
                .map(|e| {
                    let pg = projected
                        .as_ref()
                        .map(|p| (0..dim).map(|d| p.block(e, d)).collect::<Vec<_>>());
                    let u = field.block(e, 0);
                    let (_, f) = dissipation_rate(u, pg.as_deref(), &self.ops, gamma[e], nu[e]);
                    shock_capturing_weights(u, &self.ops, &f, gamma[e], self.options.stabilization.cutoff)
                })
                .collect()
        } else {
            Vec::new()
        };
        Ok((
            StabilizationState {
                gamma,
                lambda,
                nu,
                alpha,
            },
            projected,
        ))
    }

    fn face_states(&self, field: &ElementField, e: usize, face: usize, k: usize) -> State {
        let mut s = [0.0; 4];
        let row = self.ops.face_traces[face].row(k);
        for c in 0..self.num_components() {
            s[c] = row.iter().zip(field.block(e, c)).map(|(a, b)| a * b).sum();
        }
        s
    }

    fn add_face_flux(&self, local: &mut ElementField, e: usize, face: usize, k: usize, flux: &State, sign: f64) {
        let w = self.ops.face_weights[face][k];
        let row = self.ops.face_traces[face].row(k).to_vec();
        for c in 0..self.num_components() {
            let s = sign * w * flux[c];
            for (o, phi) in local.block_mut(e, c).iter_mut().zip(&row) {
                *o += s * phi;
            }
        }
    }

    /// Residual `r = −a(u_h, φ_i) − s_h(u_h, φ_i)` and the stabilization state used.
    pub fn evaluate(&self, u: &[f64], t: f64) -> Result<(Vec<f64>, StabilizationState)> {
        let field = self.cell_field(u);
        let m = self.num_components();
        let nd = self.ops.ndofs;
        let dim = self.mesh.dim();
        let ncells = self.mesh.num_cells();
        let mut local = ElementField::zeros(ncells, m, nd);

        for e in 0..ncells {
            let geom = self.mesh.cell_geometry(e);
            for (q, xi) in self.ops.flux_quad.points.iter().enumerate() {
                let x = geom.to_physical(*xi);
                let row = self.ops.flux_basis.row(q);
                let mut s = [0.0; 4];
                for c in 0..m {
                    s[c] = row.iter().zip(field.block(e, c)).map(|(a, b)| a * b).sum();
                }
                let f = self.law.flux(&s, x).map_err(|err| err.at(e, x))?;
                let w = self.ops.flux_weights[q];
                for c in 0..m {
                    let out = local.block_mut(e, c);
                    for d in 0..dim {
                        let s = w * f[c][d];
                        for (o, g) in out.iter_mut().zip(self.ops.flux_grad[d].row(q)) {
                            *o += s * g;
                        }
                    }
                }
            }
        }

        let dg = self.space() == SpaceKind::Discontinuous;
        for e in 0..ncells {
            let geom = self.mesh.cell_geometry(e);
            let neighbors = self.mesh.face_neighbors(e)?;
            for face in 0..2 * dim {
                let n = face_normal(face);
                let nq = self.ops.face_weights[face].len();
                match neighbors[face] {
                    FaceNeighbor::Cell(nb) => {
                        // each interior face once, from its lower side
                        if !dg || face % 2 == 0 {
                            continue;
                        }
                        let opposite = face - 1;
                        for k in 0..nq {
                            let x = geom.to_physical(self.ops.face_points[face][k]);
                            let ul = self.face_states(&field, e, face, k);
                            let ur = self.face_states(&field, nb, opposite, k);
                            let flux = self.law.numerical_flux(&ul, &ur, x, n).map_err(|err| err.at(e, x))?;
                            self.add_face_flux(&mut local, e, face, k, &flux, -1.0);
                            self.add_face_flux(&mut local, nb, opposite, k, &flux, 1.0);
                        }
                    }
                    FaceNeighbor::Boundary(_) => {
                        let bc = self.bcs.get(face);
                        for k in 0..nq {
                            let x = geom.to_physical(self.ops.face_points[face][k]);
                            let ul = self.face_states(&field, e, face, k);
                            let ghost = bc.ghost(&self.law, &ul, x, n, t);
                            let flux = self.law.numerical_flux(&ul, &ghost, x, n).map_err(|err| err.at(e, x))?;
                            self.add_face_flux(&mut local, e, face, k, &flux, -1.0);
                        }
                    }
                }
            }
        }

        let (state, projected) = self.stabilization_state(&field)?;
        if self.options.sensor != SensorMode::Off {
            let mut s = vec![0.0; nd];
            for e in 0..ncells {
                let alpha = state.alpha.get(e).map(|a| a.as_slice());
                for c in 0..m {
                    s.iter_mut().for_each(|v| *v = 0.0);
                    let pg = projected
                        .as_ref()
                        .map(|p| (0..dim).map(|d| p.block(e, c * dim + d)).collect::<Vec<_>>());
                    let gamma = if self.space() == SpaceKind::Continuous && projected.is_none() {
                        0.0
                    } else {
                        state.gamma[e]
                    };
                    apply_high_order(field.block(e, c), pg.as_deref(), &self.ops, state.nu[e], gamma, alpha, &mut s);
                    for (o, v) in local.block_mut(e, c).iter_mut().zip(&s) {
                        *o -= v;
                    }
                }
            }
        }

        let mut r = vec![0.0; self.len()];
        self.map.scatter_add(&local, &mut r);
        Ok((r, state))
    }

    pub fn assemble_rhs(&self, u: &[f64], t: f64) -> Result<Vec<f64>> {
        Ok(self.evaluate(u, t)?.0)
    }

    /// `du/dt = M^{-1} r(u, t)`.
    pub fn time_derivative(&self, u: &[f64], t: f64) -> Result<Vec<f64>> {
        self.solve_mass(&self.assemble_rhs(u, t)?)
    }

    /// Applies the configured stage limiter in place; returns the number of limited cells.
    pub fn limit(&self, u: &mut [f64]) -> Result<usize> {
        if !self.options.limiter {
            return Ok(0);
        }
        let ConservationLaw::Euler { dim, gamma } = self.law else {
            return Ok(0);
        };
        let mut field = self.cell_field(u);
        let n = zhang_shu_limit(&mut field, &self.ops, dim, gamma, self.options.eps_pos)?;
        if n > 0 {
            u.copy_from_slice(field.as_slice());
        }
        Ok(n)
    }

    pub fn ssp_rk3_step(&self, u: &[f64], dt: f64, t: f64) -> Result<Vec<f64>> {
        if !(dt > 0.0) {
            return Err(Error::Usage(format!("time step must be positive, got {dt}")));
        }
        ssp_rk3(u, dt, t, |v, s| self.time_derivative(v, s), |v| self.limit(v).map(|_| ()))
    }

    /// `dt = cfl · min_e h_e / (λ_e (2p + 1))`, capped by `t_end − t`.
    pub fn cfl_timestep(&self, u: &[f64], cfl: f64, t: f64, t_end: f64) -> Result<f64> {
        if !(cfl > 0.0) {
            return Err(Error::Usage(format!("CFL number must be positive, got {cfl}")));
        }
        let lambda = self.wavespeeds(&self.cell_field(u))?;
        let lmax = lambda.iter().cloned().fold(0.0, f64::max).max(1e-12);
        let dt = cfl_formula(cfl, self.ops.diameter, lmax, self.degree());
        Ok(dt.min(t_end - t))
    }
}

/// Cholesky factors of the 1D global CG mass matrices, one per mesh axis.
fn tensor_mass_factors(mesh: &StructuredMesh, degree: usize) -> Result<Vec<EnvelopeCholesky>> {
    let elem = ReferenceElement::new(1, degree)?;
    let cells = mesh.cells_per_axis();
    let periodic = mesh.periodic();
    let spacing = mesh.spacing();
    (0..mesh.dim())
        .map(|d| {
            let ops = ElementOperators::new(&elem, [spacing[d], spacing[d]], false)?;
            let n = if periodic[d] { cells[d] * degree } else { cells[d] * degree + 1 };
            let mut m = Matrix::zeros(n, n);
            for e in 0..cells[d] {
                for i in 0..=degree {
                    for j in 0..=degree {
                        m[((e * degree + i) % n, (e * degree + j) % n)] += ops.mass[(i, j)];
                    }
                }
            }
            EnvelopeCholesky::factor(n, |i, j| m[(i, j)])
        })
        .collect()
}

/// Applies `(M_y ⊗ M_x)^{-1}` in place to one component with x-fastest dof numbering.
fn tensor_solve(factors: &[EnvelopeCholesky], x: &mut [f64]) {
    let nx = factors[0].n();
    for row in x.chunks_mut(nx) {
        factors[0].solve_in_place(row);
    }
    if let Some(fy) = factors.get(1) {
        let mut col = vec![0.0; fy.n()];
        for gx in 0..nx {
            for (gy, c) in col.iter_mut().enumerate() {
                *c = x[gy * nx + gx];
            }
            fy.solve_in_place(&mut col);
            for (gy, c) in col.iter().enumerate() {
                x[gy * nx + gx] = *c;
            }
        }
    }
}

/// `cfl · h / (λ (2p + 1))`.
pub fn cfl_formula(cfl: f64, h: f64, lambda: f64, p: usize) -> f64 {
    cfl * h / (lambda * (2 * p + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_mesh;
    use crate::weno::WenoScheme;

    fn advection_system(dim: usize, p: usize, space: SpaceKind, sensor: SensorMode) -> DiscreteSystem {
        let mesh = build_mesh(dim, [[0.0, 1.0], [0.0, 1.0]], [6, 5], [true, true]).unwrap();
        let law = ConservationLaw::constant_advection([1.0, 0.5]);
        let options = SchemeOptions {
            sensor,
            ..SchemeOptions::default()
        };
        DiscreteSystem::new(mesh, p, space, law, BoundaryConditions::periodic(), options).unwrap()
    }

    #[test]
    fn cfl_examples() {
        assert!((cfl_formula(0.3, 0.1, 1.0, 1) - 0.01).abs() < 1e-17);
        assert!((cfl_formula(1.0, 1.0, 1.0, 2) - 0.2).abs() < 1e-17);
        let mesh = build_mesh(1, [[0.0, 1.0], [0.0, 1.0]], [4, 1], [true, false]).unwrap();
        let sys = DiscreteSystem::new(
            mesh,
            2,
            SpaceKind::Continuous,
            ConservationLaw::Burgers,
            BoundaryConditions::periodic(),
            SchemeOptions::default(),
        )
        .unwrap();
        let u = vec![0.0; sys.len()];
        assert_eq!(sys.cfl_timestep(&u, 0.1, 0.3, 0.35).unwrap(), 0.35 - 0.3);
    }

    #[test]
    fn rk3_reproduces_stability_polynomial() {
        for z in [-0.5, -1.3, 0.2, -2.4] {
            let out = ssp_rk3(&[1.0], 1.0, 0.0, |u, _| Ok(vec![z * u[0]]), |_| Ok(())).unwrap();
            let poly = 1.0 + z + z * z / 2.0 + z * z * z / 6.0;
            assert!((out[0] - poly).abs() < 1e-14);
        }
        let frozen = ssp_rk3(&[2.0, -1.0], 0.3, 0.0, |u, _| Ok(vec![0.0; u.len()]), |_| Ok(())).unwrap();
        assert_eq!(frozen, vec![2.0, -1.0]);
    }

    #[test]
    fn constant_state_is_preserved() {
        for dim in 1..=2 {
            for space in [SpaceKind::Continuous, SpaceKind::Discontinuous] {
                for sensor in [SensorMode::Weno, SensorMode::Fixed(0.0), SensorMode::Off] {
                    let sys = advection_system(dim, 2, space, sensor);
                    let u = vec![1.7; sys.len()];
                    let r = sys.assemble_rhs(&u, 0.0).unwrap();
                    assert!(r.iter().all(|v| v.abs() < 1e-12), "{dim} {space:?} {sensor:?}");
                }
            }
        }
    }

    #[test]
    fn periodic_residual_sums_to_zero() {
        for dim in 1..=2 {
            for space in [SpaceKind::Continuous, SpaceKind::Discontinuous] {
                let sys = advection_system(dim, 3, space, SensorMode::Weno);
                let u = sys
                    .initialize(&|x| [(6.0 * x[0]).sin() + (x[1] * 9.0).cos().powi(3), 0.0, 0.0, 0.0], Initialization::Interpolation)
                    .unwrap();
                let r = sys.assemble_rhs(&u, 0.0).unwrap();
                let scale = r.iter().map(|v| v.abs()).fold(0.0, f64::max);
                assert!(r.iter().sum::<f64>().abs() <= 1e-12 * scale.max(1.0));
            }
        }
    }

    #[test]
    fn mass_matrix_is_spd_and_projection_reproduces_space() {
        let sys = advection_system(2, 2, SpaceKind::Continuous, SensorMode::Weno);
        let mass = sys.mass_matrix().unwrap();
        let n = mass.n();
        for i in 0..n {
            for j in 0..n {
                assert!((mass.get(i, j) - mass.get(j, i)).abs() < 1e-16);
            }
        }
        let mut rng_state = 1u64;
        for _ in 0..20 {
            let x: Vec<f64> = (0..n)
                .map(|_| {
                    rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    (rng_state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
                })
                .collect();
            let mut y = vec![0.0; n];
            mass.matvec_into(&x, &mut y);
            assert!(crate::linalg::dot(&x, &y) > 0.0);
        }
        let f = |x: Point| [(2.0 * std::f64::consts::PI * x[0]).sin(), 0.0, 0.0, 0.0];
        let a = sys.initialize(&f, Initialization::Interpolation).unwrap();
        let field = sys.cell_field(&a);
        let interp = |x: Point| {
            let e = sys.mesh.cell_index(((x[0] * 6.0) as usize).min(5), ((x[1] * 5.0) as usize).min(4));
            let geom = sys.mesh.cell_geometry(e);
            let phi = sys.elem.basis_values(geom.to_reference(x));
            [crate::linalg::dot(&phi, field.block(e, 0)), 0.0, 0.0, 0.0]
        };
        let b = sys.initialize(&interp, Initialization::L2Projection).unwrap();
        for (p, q) in a.iter().zip(&b) {
            assert!((p - q).abs() < 1e-11);
        }
    }

    #[test]
    fn dof_counts() {
        let sys = advection_system(2, 3, SpaceKind::Continuous, SensorMode::Weno);
        assert_eq!(sys.map.num_dofs(), 18 * 15);
        let sys = advection_system(2, 3, SpaceKind::Discontinuous, SensorMode::Weno);
        assert_eq!(sys.map.num_dofs(), 30 * 16);
    }

    #[test]
    fn limiter_needs_dg_euler() {
        let mesh = build_mesh(1, [[0.0, 1.0], [0.0, 1.0]], [4, 1], [false, false]).unwrap();
        let options = SchemeOptions {
            limiter: true,
            ..SchemeOptions::default()
        };
        let r = DiscreteSystem::new(
            mesh,
            1,
            SpaceKind::Continuous,
            ConservationLaw::euler(1),
            BoundaryConditions::uniform(BoundaryCondition::Outflow),
            options,
        );
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn cc_and_cv_both_assemble() {
        for scheme in [WenoScheme::CellCell, WenoScheme::CellVertex] {
            let mesh = build_mesh(2, [[0.0, 1.0], [0.0, 1.0]], [4, 4], [true, true]).unwrap();
            let options = SchemeOptions {
                weno: WenoParams::with_scheme(scheme),
                stabilization: StabilizationParams {
                    redistribution: true,
                    ..StabilizationParams::default()
                },
                ..SchemeOptions::default()
            };
            let sys = DiscreteSystem::new(
                mesh,
                2,
                SpaceKind::Continuous,
                ConservationLaw::Kpp,
                BoundaryConditions::periodic(),
                options,
            )
            .unwrap();
            let u = sys
                .initialize(&|x| [if x[0] < 0.5 { 3.0 } else { 1.0 }, 0.0, 0.0, 0.0], Initialization::Interpolation)
                .unwrap();
            let (r, state) = sys.evaluate(&u, 0.0).unwrap();
            assert!(r.iter().all(|v| v.is_finite()));
            assert!(state.gamma.iter().any(|&g| g < 0.9));
            assert_eq!(state.alpha.len(), 16);
        }
    }
}
