//! Benchmark problem definitions: domains, laws, boundary and initial data, exact solutions.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::element::SpaceKind;
use crate::physics::{conserved_from_primitive, exact_riemann, ConservationLaw, Primitive, State};
use crate::solver::{BoundaryCondition, BoundaryConditions, Initialization};
use crate::{Error, Point, Result};

pub const GAMMA_AIR: f64 = 1.4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchmarkId {
    SolidBodyRotation,
    #[serde(rename = "burgers-1d")]
    Burgers1d,
    #[serde(rename = "advection-1d-smooth-step")]
    Advection1dSmoothStep,
    Kpp,
    SodModified,
    BlastWave,
    DoubleMach,
}

impl BenchmarkId {
    pub const ALL: [BenchmarkId; 7] = [
        BenchmarkId::SolidBodyRotation,
        BenchmarkId::Burgers1d,
        BenchmarkId::Advection1dSmoothStep,
        BenchmarkId::Kpp,
        BenchmarkId::SodModified,
        BenchmarkId::BlastWave,
        BenchmarkId::DoubleMach,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchmarkId::SolidBodyRotation => "solid-body-rotation",
            BenchmarkId::Burgers1d => "burgers-1d",
            BenchmarkId::Advection1dSmoothStep => "advection-1d-smooth-step",
            BenchmarkId::Kpp => "kpp",
            BenchmarkId::SodModified => "sod-modified",
            BenchmarkId::BlastWave => "blast-wave",
            BenchmarkId::DoubleMach => "double-mach",
        }
    }
}

impl fmt::Display for BenchmarkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchmarkId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BenchmarkId::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::Lookup(format!("unknown benchmark '{s}'")))
    }
}

/// Initial data as a function of position.
pub type InitialFn = Arc<dyn Fn(Point) -> State + Send + Sync>;
/// Exact solution as a function of position and time.
pub type ExactFn = Arc<dyn Fn(Point, f64) -> State + Send + Sync>;

/// Everything needed to set up one benchmark.
pub struct Benchmark {
    pub id: BenchmarkId,
    pub dim: usize,
    pub bounds: [[f64; 2]; 2],
    pub periodic: [bool; 2],
    pub law: ConservationLaw,
    pub bcs: BoundaryConditions,
    pub initial: InitialFn,
    pub exact: Option<ExactFn>,
    pub t_end: f64,
    /// Per-axis DOF budget used when no cell count is given.
    pub default_dofs: usize,
    pub default_cells: Option<[usize; 2]>,
    pub default_space: SpaceKind,
    pub initialization: Initialization,
    pub limiter: bool,
}

impl fmt::Debug for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Benchmark")
            .field("id", &self.id)
            .field("law", &self.law)
            .field("t_end", &self.t_end)
            .finish()
    }
}

/// Solid body rotation shapes (LeVeque 1996): slotted cylinder, cone and hump, each of
/// radius 0.15 on the unit square.
pub mod rotation {
    use super::*;

    pub const RADIUS: f64 = 0.15;
    pub const CYLINDER: Point = [0.5, 0.75];
    pub const CONE: Point = [0.5, 0.25];
    pub const HUMP: Point = [0.25, 0.5];
    pub const SLOT_HALF_WIDTH: f64 = 0.025;
    pub const SLOT_TOP: f64 = 0.85;

    fn dist(x: Point, c: Point) -> f64 {
        ((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2)).sqrt() / RADIUS
    }

    pub fn shapes(x: Point) -> f64 {
        if dist(x, CYLINDER) <= 1.0 {
            if (x[0] - CYLINDER[0]).abs() >= SLOT_HALF_WIDTH || x[1] >= SLOT_TOP {
                return 1.0;
            }
            return 0.0;
        }
        let rc = dist(x, CONE);
        if rc <= 1.0 {
            return 1.0 - rc;
        }
        let rh = dist(x, HUMP);
        if rh <= 1.0 {
            return 0.25 * (1.0 + (PI * rh).cos());
        }
        0.0
    }

    /// One revolution per unit time.
    pub fn velocity(x: Point) -> Point {
        [2.0 * PI * (0.5 - x[1]), 2.0 * PI * (x[0] - 0.5)]
    }
}

/// Exact Burgers solution for `u0 = sin(2πx)` before shock formation (`t < 1/(2π)`),
/// by Newton iteration on `u = sin(2π(x − u t))`.
pub fn burgers_exact(x: f64, t: f64) -> f64 {
    let mut u = (2.0 * PI * x).sin();
    for _ in 0..100 {
        let arg = 2.0 * PI * (x - u * t);
        let g = u - arg.sin();
        let dg = 1.0 + 2.0 * PI * t * arg.cos();
        let du = g / dg;
        u -= du;
        if du.abs() < 1e-16 {
            break;
        }
    }
    u
}

pub const SMOOTH_STEP_WIDTH: f64 = 0.02;

/// Periodic smoothed box on (0, 1): `½[tanh((x−¼)/δ) − tanh((x−¾)/δ)]`, summed over the
/// neighbouring periodic images.
pub fn smooth_step(x: f64) -> f64 {
    let d = SMOOTH_STEP_WIDTH;
    (-1..=1)
        .map(|k| {
            let y = x + k as f64;
            0.5 * (((y - 0.25) / d).tanh() - ((y - 0.75) / d).tanh())
        })
        .sum()
}

pub const SOD_LEFT: Primitive = Primitive { rho: 1.0, u: 0.75, p: 1.0 };
pub const SOD_RIGHT: Primitive = Primitive { rho: 0.125, u: 0.0, p: 0.1 };
pub const SOD_SPLIT: f64 = 0.25;

fn euler_state(rho: f64, v: Point, p: f64, dim: usize) -> State {
    conserved_from_primitive(rho, v, p, dim, GAMMA_AIR)
}

/// Double Mach reflection data.
pub mod double_mach {
    use super::*;

    pub fn post_shock() -> State {
        let a = 30f64.to_radians();
        euler_state(8.0, [8.25 * a.cos(), -8.25 * a.sin()], 116.5, 2)
    }

    pub fn pre_shock() -> State {
        euler_state(1.4, [0.0, 0.0], 1.0, 2)
    }

    /// Shock position along the line `y` at time `t`.
    pub fn shock_x(y: f64, t: f64) -> f64 {
        1.0 / 6.0 + (y + 20.0 * t) / 3f64.sqrt()
    }

    pub fn initial(x: Point) -> State {
        if x[0] < shock_x(x[1], 0.0) {
            post_shock()
        } else {
            pre_shock()
        }
    }

    /// Top boundary state: post-shock iff `x < 1/6 + (1 + 20t)/√3`.
    pub fn top(x: Point, t: f64) -> State {
        if x[0] < shock_x(1.0, t) {
            post_shock()
        } else {
            pre_shock()
        }
    }
}

pub fn benchmark(id: BenchmarkId) -> Benchmark {
    let unit = [[0.0, 1.0], [0.0, 1.0]];
    match id {
        BenchmarkId::SolidBodyRotation => Benchmark {
            id,
            dim: 2,
            bounds: unit,
            periodic: [false, false],
            law: ConservationLaw::Advection {
                velocity: Arc::new(rotation::velocity),
            },
            bcs: BoundaryConditions::uniform(BoundaryCondition::constant([0.0; 4])),
            initial: Arc::new(|x| [rotation::shapes(x), 0.0, 0.0, 0.0]),
            exact: Some(Arc::new(|x, t| {
                // rotate back by the angle travelled
                let a = -2.0 * PI * t;
                let (dx, dy) = (x[0] - 0.5, x[1] - 0.5);
                let y = [0.5 + a.cos() * dx - a.sin() * dy, 0.5 + a.sin() * dx + a.cos() * dy];
                [rotation::shapes(y), 0.0, 0.0, 0.0]
            })),
            t_end: 1.0,
            default_dofs: 257,
            default_cells: None,
            default_space: SpaceKind::Continuous,
            initialization: Initialization::Interpolation,
            limiter: false,
        },
        BenchmarkId::Burgers1d => Benchmark {
            id,
            dim: 1,
            bounds: unit,
            periodic: [true, false],
            law: ConservationLaw::Burgers,
            bcs: BoundaryConditions::periodic(),
            initial: Arc::new(|x| [(2.0 * PI * x[0]).sin(), 0.0, 0.0, 0.0]),
            exact: Some(Arc::new(|x, t| [burgers_exact(x[0], t), 0.0, 0.0, 0.0])),
            t_end: 0.1,
            default_dofs: 257,
            default_cells: None,
            default_space: SpaceKind::Continuous,
            initialization: Initialization::L2Projection,
            limiter: false,
        },
        BenchmarkId::Advection1dSmoothStep => Benchmark {
            id,
            dim: 1,
            bounds: unit,
            periodic: [true, false],
            law: ConservationLaw::constant_advection([1.0, 0.0]),
            bcs: BoundaryConditions::periodic(),
            initial: Arc::new(|x| [smooth_step(x[0]), 0.0, 0.0, 0.0]),
            exact: Some(Arc::new(|x, t| [smooth_step((x[0] - t).rem_euclid(1.0)), 0.0, 0.0, 0.0])),
            t_end: 1.0,
            default_dofs: 257,
            default_cells: None,
            default_space: SpaceKind::Continuous,
            initialization: Initialization::L2Projection,
            limiter: false,
        },
        BenchmarkId::Kpp => Benchmark {
            id,
            dim: 2,
            bounds: [[-2.0, 2.0], [-2.5, 1.5]],
            periodic: [false, false],
            law: ConservationLaw::Kpp,
            bcs: BoundaryConditions::uniform(BoundaryCondition::constant([PI / 4.0, 0.0, 0.0, 0.0])),
            initial: Arc::new(|x| {
                let v = if x[0] * x[0] + x[1] * x[1] <= 1.0 { 3.5 * PI } else { PI / 4.0 };
                [v, 0.0, 0.0, 0.0]
            }),
            exact: None,
            t_end: 1.0,
            default_dofs: 257,
            default_cells: None,
            default_space: SpaceKind::Continuous,
            initialization: Initialization::Interpolation,
            limiter: false,
        },
        BenchmarkId::SodModified => {
            let left = euler_state(SOD_LEFT.rho, [SOD_LEFT.u, 0.0], SOD_LEFT.p, 1);
            let right = euler_state(SOD_RIGHT.rho, [SOD_RIGHT.u, 0.0], SOD_RIGHT.p, 1);
            let riemann = exact_riemann(SOD_LEFT, SOD_RIGHT, GAMMA_AIR).expect("Sod data are admissible");
            Benchmark {
                id,
                dim: 1,
                bounds: unit,
                periodic: [false, false],
                law: ConservationLaw::euler(1),
                bcs: BoundaryConditions([
                    BoundaryCondition::constant(left),
                    BoundaryCondition::Reflective,
                    BoundaryCondition::Periodic,
                    BoundaryCondition::Periodic,
                ]),
                initial: Arc::new(move |x| if x[0] < SOD_SPLIT { left } else { right }),
                exact: Some(Arc::new(move |x, t| {
                    if t <= 0.0 {
                        return if x[0] < SOD_SPLIT { left } else { right };
                    }
                    let s = riemann.sample((x[0] - SOD_SPLIT) / t);
                    euler_state(s.rho, [s.u, 0.0], s.p, 1)
                })),
                t_end: 0.2,
                default_dofs: 257,
                default_cells: None,
                default_space: SpaceKind::Continuous,
                initialization: Initialization::Interpolation,
                limiter: false,
            }
        }
        BenchmarkId::BlastWave => Benchmark {
            id,
            dim: 1,
            bounds: unit,
            periodic: [false, false],
            law: ConservationLaw::euler(1),
            bcs: BoundaryConditions([
                BoundaryCondition::Reflective,
                BoundaryCondition::Reflective,
                BoundaryCondition::Periodic,
                BoundaryCondition::Periodic,
            ]),
            initial: Arc::new(|x| {
                let p = if x[0] < 0.1 {
                    1000.0
                } else if x[0] <= 0.9 {
                    0.01
                } else {
                    100.0
                };
                euler_state(1.0, [0.0, 0.0], p, 1)
            }),
            exact: None,
            t_end: 0.038,
            default_dofs: 1025,
            default_cells: None,
            default_space: SpaceKind::Continuous,
            initialization: Initialization::Interpolation,
            limiter: false,
        },
        BenchmarkId::DoubleMach => {
            let bottom: Arc<dyn Fn(&State, Point, Point, f64) -> State + Send + Sync> =
                Arc::new(|u: &State, x: Point, n: Point, _t: f64| {
                    if x[0] < 1.0 / 6.0 {
                        double_mach::post_shock()
                    } else {
                        crate::solver::reflect(&ConservationLaw::euler(2), u, n)
                    }
                });
            Benchmark {
                id,
                dim: 2,
                bounds: [[0.0, 4.0], [0.0, 1.0]],
                periodic: [false, false],
                law: ConservationLaw::euler(2),
                bcs: BoundaryConditions([
                    BoundaryCondition::constant(double_mach::post_shock()),
                    BoundaryCondition::Outflow,
                    BoundaryCondition::Custom(bottom),
                    BoundaryCondition::Inflow(Arc::new(double_mach::top)),
                ]),
                initial: Arc::new(double_mach::initial),
                exact: None,
                t_end: 0.2,
                default_dofs: 0,
                default_cells: Some([192, 48]),
                default_space: SpaceKind::Discontinuous,
                initialization: Initialization::Interpolation,
                limiter: true,
            }
        }
    }
}

/// 1D cell count reaching a per-axis DOF budget: `E·p + 1 ≈ N` (CG), `E·(p+1) ≈ N` (DG).
pub fn cells_for_dofs(dofs: usize, p: usize, space: SpaceKind) -> usize {
    let e = match space {
        SpaceKind::Continuous => (dofs.saturating_sub(1) as f64 / p as f64).round(),
        SpaceKind::Discontinuous => (dofs as f64 / (p + 1) as f64).round(),
    };
    (e as usize).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dof_targeting() {
        assert_eq!(cells_for_dofs(257, 4, SpaceKind::Continuous), 64);
        assert_eq!(cells_for_dofs(256, 1, SpaceKind::Discontinuous), 128);
        assert_eq!(cells_for_dofs(257, 32, SpaceKind::Continuous), 8);
        assert_eq!(cells_for_dofs(1025, 2, SpaceKind::Continuous), 512);
    }

    #[test]
    fn names_round_trip() {
        for b in BenchmarkId::ALL {
            assert_eq!(b.name().parse::<BenchmarkId>().unwrap(), b);
        }
        assert!("nope".parse::<BenchmarkId>().is_err());
    }

    #[test]
    fn burgers_exact_solves_characteristics() {
        for &x in &[0.1, 0.37, 0.5, 0.93] {
            let t = 0.1;
            let u = burgers_exact(x, t);
            assert!((u - (2.0 * PI * (x - u * t)).sin()).abs() < 1e-14);
        }
        assert!((burgers_exact(0.3, 0.0) - (0.6 * PI).sin()).abs() < 1e-15);
    }

    #[test]
    fn smooth_step_is_periodic_and_bounded() {
        assert!((smooth_step(0.0) - smooth_step(1.0)).abs() < 1e-14);
        assert!((smooth_step(0.5) - 1.0).abs() < 1e-10);
        assert!(smooth_step(0.0).abs() < 1e-9);
        let h = 1e-6;
        let d0 = (smooth_step(h) - smooth_step(-h)) / (2.0 * h);
        let d1 = (smooth_step(1.0 + h) - smooth_step(1.0 - h)) / (2.0 * h);
        assert!((d0 - d1).abs() < 1e-8);
    }

    #[test]
    fn rotation_shapes() {
        use rotation::*;
        assert_eq!(shapes(CYLINDER), 0.0); // inside the slot
        assert_eq!(shapes([0.5, 0.88]), 1.0);
        assert_eq!(shapes([0.4, 0.75]), 1.0);
        assert!((shapes(CONE) - 1.0).abs() < 1e-15);
        assert!((shapes(HUMP) - 0.5).abs() < 1e-15);
        assert_eq!(shapes([0.9, 0.9]), 0.0);
        let b = benchmark(BenchmarkId::SolidBodyRotation);
        let exact = b.exact.unwrap();
        for x in [[0.31, 0.52], [0.5, 0.2], [0.45, 0.8]] {
            assert!((exact(x, 1.0)[0] - shapes(x)).abs() < 1e-12);
        }
        // a quarter turn carries the cone (below the centre) to the right
        assert!((exact([0.75, 0.5], 0.25)[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn double_mach_boundary_logic() {
        use double_mach::*;
        let t = 0.1;
        let xs = 1.0 / 6.0 + (1.0 + 20.0 * t) / 3f64.sqrt();
        assert_eq!(top([xs - 1e-9, 1.0], t), post_shock());
        assert_eq!(top([xs + 1e-9, 1.0], t), pre_shock());
        assert_eq!(initial([0.1, 0.0]), post_shock());
        assert_eq!(initial([1.0, 0.5]), pre_shock());
    }

    #[test]
    fn sod_exact_at_zero_time_and_far_field() {
        let b = benchmark(BenchmarkId::SodModified);
        let exact = b.exact.unwrap();
        assert_eq!(exact([0.1, 0.0], 0.0)[0], 1.0);
        assert_eq!(exact([0.9, 0.0], 0.2)[0], 0.125);
        assert_eq!(exact([0.05, 0.0], 0.2)[0], 1.0);
    }
}
