//! Benchmark driver: configuration, time loop, error norms and convergence tables.

pub mod benchmarks;
mod config;
pub mod output;
pub mod selftest;

pub use benchmarks::{benchmark, cells_for_dofs, Benchmark, BenchmarkId};
pub use config::{BenchmarkConfig, OutputConfig, ResolvedConfig, Scheme, StabilizationOverrides, WenoOverrides};

use std::cell::Cell;
use std::path::Path;
use std::time::Instant;

use crate::element::{gauss_rule, SpaceKind};
use crate::mesh::build_mesh;
use crate::solver::{ssp_rk3, DiscreteSystem};
use crate::{Error, Point, Result};

/// Summary of a finished run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub benchmark: BenchmarkId,
    pub space: SpaceKind,
    pub scheme: Scheme,
    pub p: usize,
    pub cells: [usize; 2],
    /// Scalar unknowns per component.
    pub ndofs: usize,
    pub t_end: f64,
    pub steps: usize,
    pub wall_time: f64,
    /// L1 error of component 0 (density for Euler) when an exact solution is known.
    pub l1_error: Option<f64>,
    /// Nodal minimum and maximum per component.
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    /// `γ_e` statistics of the final state: min, mean, max.
    pub gamma: [f64; 3],
    /// Cells modified by the positivity limiter, summed over all stages.
    pub limited_cells: usize,
    pub mass_initial: Vec<f64>,
    pub mass_final: Vec<f64>,
}

impl RunReport {
    pub fn summary(&self) -> String {
        let err = self.l1_error.map(|e| format!("{e:.6e}")).unwrap_or_else(|| "n/a".into());
        let [gmin, gmean, gmax] = self.gamma;
        format!(
            "benchmark={} space={} scheme={} p={} cells={}x{} dofs={} t={} steps={} wall={:.2}s l1={} \
             min={:.6e} max={:.6e} gamma=[{gmin:.3},{gmean:.3},{gmax:.3}] limited={}",
            self.benchmark,
            match self.space {
                SpaceKind::Continuous => "cg",
                SpaceKind::Discontinuous => "dg",
            },
            self.scheme,
            self.p,
            self.cells[0],
            self.cells[1],
            self.ndofs,
            self.t_end,
            self.steps,
            self.wall_time,
            err,
            self.min[0],
            self.max[0],
            self.limited_cells,
        )
    }
}

/// Final state of a run together with the system that produced it.
#[derive(Debug)]
pub struct RunOutcome {
    pub report: RunReport,
    pub system: DiscreteSystem,
    pub solution: Vec<f64>,
}

pub fn build_system(config: &ResolvedConfig) -> Result<(Benchmark, DiscreteSystem)> {
    let bench = benchmark(config.benchmark);
    let mesh = build_mesh(bench.dim, bench.bounds, config.cells, bench.periodic)?;
    let system = DiscreteSystem::new(
        mesh,
        config.p,
        config.space,
        bench.law.clone(),
        bench.bcs.clone(),
        config.options,
    )?;
    Ok((bench, system))
}

fn check_finite(system: &DiscreteSystem, u: &[f64], step: usize) -> Result<()> {
    let Some(i) = u.iter().position(|v| !v.is_finite()) else {
        return Ok(());
    };
    let cell = match system.space() {
        SpaceKind::Continuous => system.map.owner(i % system.map.num_dofs()).0,
        SpaceKind::Discontinuous => i / (system.num_components() * system.ops.ndofs),
    };
    Err(Error::Numerical(format!(
        "non-finite value {} at step {step} in cell {cell} (unknown {i})",
        u[i]
    )))
}

fn gamma_stats(system: &DiscreteSystem, u: &[f64]) -> Result<[f64; 3]> {
    let (state, _) = system.stabilization_state(&system.cell_field(u))?;
    let g = &state.gamma;
    let min = g.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok([min, g.iter().sum::<f64>() / g.len() as f64, max])
}

fn write_snapshot(dir: &Path, name: &str, system: &DiscreteSystem, u: &[f64], t: f64) -> Result<()> {
    match system.mesh.dim() {
        1 => output::write_csv_line(&dir.join(format!("{name}.csv")), system, u),
        _ => output::write_vtk(&dir.join(format!("{name}.vtk")), system, u, &format!("t = {t}")),
    }
}

/// Runs one benchmark to its final time.
pub fn run(config: &BenchmarkConfig) -> Result<RunOutcome> {
    let resolved = config.resolve()?;
    let (bench, system) = build_system(&resolved)?;
    let start = Instant::now();
    let mut u = system.initialize(&*bench.initial, resolved.initialization)?;
    check_finite(&system, &u, 0)?;
    // projected discontinuous data can leave the admissible set before the first step
    let limited = Cell::new(system.limit(&mut u)?);
    let mass_initial = system.total_mass(&u);
    let t_end = resolved.t_end;
    let dir = resolved.output.dir.as_deref();
    let every = resolved.output.every;
    let mut t = 0.0;
    let mut steps = 0;
    if let (Some(d), true) = (dir, every > 0) {
        write_snapshot(d, "step_000000", &system, &u, t)?;
    }
    while t < t_end {
        let dt = system.cfl_timestep(&u, resolved.cfl, t, t_end)?;
        if !(dt > 0.0) {
            break;
        }
        u = ssp_rk3(
            &u,
            dt,
            t,
            |v, s| system.time_derivative(v, s),
            |v| {
                limited.set(limited.get() + system.limit(v)?);
                Ok(())
            },
        )
        .map_err(|e| match e {
            Error::State { cell, point, reason } => Error::State {
                cell,
                point,
                reason: format!("{reason} (step {})", steps + 1),
            },
            other => other,
        })?;
        steps += 1;
        check_finite(&system, &u, steps)?;
        t = if t_end - (t + dt) <= 1e-14 * t_end { t_end } else { t + dt };
        if let (Some(d), true) = (dir, every > 0 && steps % every.max(1) == 0) {
            write_snapshot(d, &format!("step_{steps:06}"), &system, &u, t)?;
        }
    }
    let wall_time = start.elapsed().as_secs_f64();
    let l1 = bench
        .exact
        .as_ref()
        .map(|exact| l1_error(&system, &u, 0, &|x| exact(x, t_end)[0]));
    let field = system.cell_field(&u);
    let ncomp = system.num_components();
    let (mut min, mut max) = (vec![f64::INFINITY; ncomp], vec![f64::NEG_INFINITY; ncomp]);
    for e in 0..system.mesh.num_cells() {
        for c in 0..ncomp {
            for &v in field.block(e, c) {
                min[c] = min[c].min(v);
                max[c] = max[c].max(v);
            }
        }
    }
    let report = RunReport {
        benchmark: resolved.benchmark,
        space: resolved.space,
        scheme: resolved.scheme,
        p: resolved.p,
        cells: resolved.cells,
        ndofs: system.map.num_dofs(),
        t_end,
        steps,
        wall_time,
        l1_error: l1,
        min,
        max,
        gamma: gamma_stats(&system, &u)?,
        limited_cells: limited.get(),
        mass_initial,
        mass_final: system.total_mass(&u),
    };
    if let Some(d) = dir {
        write_snapshot(d, "final", &system, &u, t)?;
    }
    Ok(RunOutcome {
        report,
        system,
        solution: u,
    })
}

/// `Σ_e Σ_q ω_q |u_h(x_q) − u_ex(x_q)|` for one component, with `p + 2` Gauss points per axis.
pub fn l1_error(system: &DiscreteSystem, u: &[f64], comp: usize, exact: &dyn Fn(Point) -> f64) -> f64 {
    let rule = gauss_rule(system.mesh.dim(), system.degree() + 2);
    let basis = system.elem.tabulate([0, 0], &rule.points);
    let field = system.cell_field(u);
    let mut total = 0.0;
    for e in 0..system.mesh.num_cells() {
        let geom = system.mesh.cell_geometry(e);
        let v = field.block(e, comp);
        let measure = geom.measure();
        for (q, xi) in rule.points.iter().enumerate() {
            let uh: f64 = basis.row(q).iter().zip(v).map(|(a, b)| a * b).sum();
            total += rule.weights[q] * measure * (uh - exact(geom.to_physical(*xi))).abs();
        }
    }
    total
}

/// One level of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EocRow {
    pub cells: usize,
    pub h: f64,
    pub error: f64,
    /// `log(e_coarse/e_fine) / log(h_coarse/h_fine)`; `None` on the first row or when
    /// an error is not positive.
    pub eoc: Option<f64>,
}

pub fn eoc_table(errors: &[(f64, f64)]) -> Vec<EocRow> {
    errors
        .iter()
        .enumerate()
        .map(|(i, &(h, error))| {
            let eoc = (i > 0)
                .then(|| errors[i - 1])
                .filter(|&(_, ec)| ec > 0.0 && error > 0.0)
                .map(|(hc, ec)| (ec / error).ln() / (hc / h).ln());
            EocRow { cells: 0, h, error, eoc }
        })
        .collect()
}

/// Runs `config` on each 1D cell count in `levels` and tabulates the L1 errors.
pub fn convergence(config: &BenchmarkConfig, levels: &[usize]) -> Result<Vec<EocRow>> {
    let bench = benchmark(config.benchmark);
    if bench.exact.is_none() {
        return Err(Error::Unsupported(format!("{} has no exact solution", config.benchmark)));
    }
    if levels.len() < 2 {
        return Err(Error::Config("a convergence study needs at least two levels".into()));
    }
    let length = bench.bounds[0][1] - bench.bounds[0][0];
    let mut errors = Vec::with_capacity(levels.len());
    for &e in levels {
        let mut c = config.clone();
        c.cells = Some(vec![e]);
        c.dofs = None;
        let outcome = run(&c)?;
        errors.push((length / e as f64, outcome.report.l1_error.unwrap_or(f64::NAN)));
    }
    let mut rows = eoc_table(&errors);
    for (row, &e) in rows.iter_mut().zip(levels) {
        row.cells = e;
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::ConservationLaw;
    use crate::solver::{BoundaryConditions, Initialization, SchemeOptions};

    fn unit_system(p: usize) -> DiscreteSystem {
        let mesh = build_mesh(1, [[0.0, 1.0], [0.0, 1.0]], [5, 1], [true, false]).unwrap();
        DiscreteSystem::new(
            mesh,
            p,
            SpaceKind::Continuous,
            ConservationLaw::constant_advection([1.0, 0.0]),
            BoundaryConditions::periodic(),
            SchemeOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn l1_examples() {
        let s = unit_system(2);
        let zero = vec![0.0; s.len()];
        assert!((l1_error(&s, &zero, 0, &|_| 1.0) - 1.0).abs() < 1e-14);
        assert!((l1_error(&s, &zero, 0, &|x| x[0]) - 0.5).abs() < 1e-14);
        let u = s
            .initialize(&|x| [x[0] * (1.0 - x[0]), 0.0, 0.0, 0.0], Initialization::Interpolation)
            .unwrap();
        assert!(l1_error(&s, &u, 0, &|x| x[0] * (1.0 - x[0])) < 1e-15);
    }

    #[test]
    fn eoc_examples() {
        let rows = eoc_table(&[(0.1, 0.01), (0.05, 0.0025), (0.025, 0.000625)]);
        assert!(rows[0].eoc.is_none());
        for r in &rows[1..] {
            assert!((r.eoc.unwrap() - 2.0).abs() < 1e-10);
        }
        let flat = eoc_table(&[(0.1, 1e-3), (0.05, 1e-3)]);
        assert_eq!(flat[1].eoc, Some(0.0));
        let exact = eoc_table(&[(0.1, 1e-3), (0.05, 0.0)]);
        assert!(exact[1].eoc.is_none());
        // Table 3, p = 3: E = 512 -> 768
        let t3 = eoc_table(&[(1.0 / 512.0, 3.93e-10), (1.0 / 768.0, 8.29e-11)]);
        assert!((t3[1].eoc.unwrap() - 3.84).abs() < 0.01);
    }

    #[test]
    fn convergence_needs_exact_solution_and_levels() {
        let c = BenchmarkConfig::new(BenchmarkId::Kpp);
        assert!(matches!(convergence(&c, &[4, 8]), Err(Error::Unsupported(_))));
        let b = BenchmarkConfig::new(BenchmarkId::Burgers1d);
        assert!(matches!(convergence(&b, &[4]), Err(Error::Config(_))));
    }

    #[test]
    fn short_burgers_run_reports() {
        let mut c = BenchmarkConfig::new(BenchmarkId::Burgers1d);
        c.cells = Some(vec![16]);
        c.t_end = Some(0.01);
        let out = run(&c).unwrap();
        let r = &out.report;
        assert!(r.steps > 0);
        assert_eq!(r.ndofs, 32);
        assert!(r.l1_error.unwrap() < 1e-3);
        assert!((r.mass_final[0] - r.mass_initial[0]).abs() < 1e-12);
        assert!(r.gamma[0] >= 0.0 && r.gamma[2] <= 1.0);
        assert!(r.summary().contains("benchmark=burgers-1d"));
    }
}
