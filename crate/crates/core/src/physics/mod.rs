//! Flux functions, wave-speed bounds and numerical fluxes.
//!
//! States are fixed-size arrays; scalar laws use entry 0. Euler states are stored as
//! `(ρ, ρv_x, ρE)` in 1D and `(ρ, ρv_x, ρv_y, ρE)` in 2D.

mod riemann;

pub use riemann::{exact_riemann, Primitive, RiemannSolution, Wave};

use std::fmt;
use std::sync::Arc;

use crate::{Error, Point, Result};

pub const MAX_COMPONENTS: usize = 4;
pub type State = [f64; MAX_COMPONENTS];
/// `flux[c][d]`: component `c`, spatial direction `d`.
pub type Flux = [[f64; 2]; MAX_COMPONENTS];

/// Absolute admissibility floor for density and pressure.
pub const ADMISSIBILITY_TOL: f64 = 1e-12;

pub type VelocityField = Arc<dyn Fn(Point) -> Point + Send + Sync>;

#[derive(Clone)]
pub enum ConservationLaw {
    /// `f(u) = v(x) u`.
    Advection { velocity: VelocityField },
    /// `f(u) = u²/2` along x.
    Burgers,
    /// `f(u) = (sin u, cos u)`.
    Kpp,
    /// Compressible Euler equations with a polytropic ideal gas.
    Euler { dim: usize, gamma: f64 },
}

impl fmt::Debug for ConservationLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConservationLaw::Advection { .. } => write!(f, "Advection"),
            ConservationLaw::Burgers => write!(f, "Burgers"),
            ConservationLaw::Kpp => write!(f, "Kpp"),
            ConservationLaw::Euler { dim, gamma } => write!(f, "Euler {{ dim: {dim}, gamma: {gamma} }}"),
        }
    }
}

impl ConservationLaw {
    pub fn constant_advection(v: Point) -> Self {
        ConservationLaw::Advection {
            velocity: Arc::new(move |_| v),
        }
    }

    pub fn euler(dim: usize) -> Self {
        ConservationLaw::Euler { dim, gamma: 1.4 }
    }

    pub fn num_components(&self) -> usize {
        match self {
            ConservationLaw::Euler { dim, .. } => dim + 2,
            _ => 1,
        }
    }

    pub fn is_euler(&self) -> bool {
        matches!(self, ConservationLaw::Euler { .. })
    }

    /// Fixed global wave speed, if the law prescribes one (KPP uses 1).
    pub fn global_wave_speed(&self) -> Option<f64> {
        match self {
            ConservationLaw::Kpp => Some(1.0),
            _ => None,
        }
    }

    pub fn check_admissible(&self, u: &State) -> Result<()> {
        if let ConservationLaw::Euler { dim, gamma } = self {
            pressure(u, *dim, *gamma)?;
        } else if !u[0].is_finite() {
            return Err(Error::nonphysical(format!("non-finite value {}", u[0])));
        }
        Ok(())
    }

    pub fn flux(&self, u: &State, x: Point) -> Result<Flux> {
        let mut f = [[0.0; 2]; MAX_COMPONENTS];
        match self {
            ConservationLaw::Advection { velocity } => {
                let v = velocity(x);
                f[0] = [v[0] * u[0], v[1] * u[0]];
            }
            ConservationLaw::Burgers => f[0][0] = 0.5 * u[0] * u[0],
            ConservationLaw::Kpp => f[0] = [u[0].sin(), u[0].cos()],
            ConservationLaw::Euler { dim, gamma } => {
                let p = pressure(u, *dim, *gamma)?;
                let rho = u[0];
                let e = u[dim + 1];
                for d in 0..*dim {
                    let vd = u[1 + d] / rho;
                    f[0][d] = u[1 + d];
                    for c in 0..*dim {
                        f[1 + c][d] = u[1 + c] * vd;
                    }
                    f[1 + d][d] += p;
                    f[dim + 1][d] = (e + p) * vd;
                }
            }
        }
        Ok(f)
    }

    /// Normal flux `f(u)·n`.
    pub fn normal_flux(&self, u: &State, x: Point, n: Point) -> Result<State> {
        let f = self.flux(u, x)?;
        let mut out = [0.0; MAX_COMPONENTS];
        for c in 0..self.num_components() {
            out[c] = f[c][0] * n[0] + f[c][1] * n[1];
        }
        Ok(out)
    }

    /// Spectral radius of the flux Jacobian in direction `n` (unit vector).
    pub fn directional_speed(&self, u: &State, x: Point, n: Point) -> Result<f64> {
        Ok(match self {
            ConservationLaw::Advection { velocity } => {
                let v = velocity(x);
                (v[0] * n[0] + v[1] * n[1]).abs()
            }
            ConservationLaw::Burgers => (u[0] * n[0]).abs(),
            ConservationLaw::Kpp => (u[0].cos() * n[0] - u[0].sin() * n[1]).abs(),
            ConservationLaw::Euler { dim, gamma } => {
                let c = sound_speed(u, *dim, *gamma)?;
                let vn: f64 = (0..*dim).map(|d| u[1 + d] / u[0] * n[d]).sum();
                vn.abs() + c
            }
        })
    }

    /// Maximum over all directions of the Jacobian spectral radius.
    pub fn max_speed(&self, u: &State, x: Point) -> Result<f64> {
        if let Some(s) = self.global_wave_speed() {
            return Ok(s);
        }
        Ok(match self {
            ConservationLaw::Advection { velocity } => {
                let v = velocity(x);
                v[0].hypot(v[1])
            }
            ConservationLaw::Burgers => u[0].abs(),
            ConservationLaw::Kpp => 1.0,
            ConservationLaw::Euler { dim, gamma } => {
                let c = sound_speed(u, *dim, *gamma)?;
                let v2: f64 = (0..*dim).map(|d| (u[1 + d] / u[0]).powi(2)).sum();
                v2.sqrt() + c
            }
        })
    }

    /// LLF for scalar laws, HLL for Euler.
    pub fn numerical_flux(&self, ul: &State, ur: &State, x: Point, n: Point) -> Result<State> {
        match self {
            ConservationLaw::Euler { dim, gamma } => hll_flux(ul, ur, n, *dim, *gamma),
            _ => llf_flux(self, ul, ur, x, n),
        }
    }
}

/// `p = (γ-1)(ρE - |ρv|²/(2ρ))`.
pub fn pressure(u: &State, dim: usize, gamma: f64) -> Result<f64> {
    let rho = u[0];
    if !(rho >= ADMISSIBILITY_TOL) {
        return Err(Error::nonphysical(format!("density {rho}")));
    }
    let m2: f64 = (0..dim).map(|d| u[1 + d] * u[1 + d]).sum();
    let p = (gamma - 1.0) * (u[dim + 1] - 0.5 * m2 / rho);
    if !(p >= ADMISSIBILITY_TOL) {
        return Err(Error::nonphysical(format!("pressure {p}")));
    }
    Ok(p)
}

/// Pressure without admissibility checks (used by limiters probing states).
pub fn pressure_unchecked(u: &State, dim: usize, gamma: f64) -> f64 {
    let m2: f64 = (0..dim).map(|d| u[1 + d] * u[1 + d]).sum();
    (gamma - 1.0) * (u[dim + 1] - 0.5 * m2 / u[0])
}

pub fn sound_speed(u: &State, dim: usize, gamma: f64) -> Result<f64> {
    Ok((gamma * pressure(u, dim, gamma)? / u[0]).sqrt())
}

pub fn conserved_from_primitive(rho: f64, v: Point, p: f64, dim: usize, gamma: f64) -> State {
    let mut u = [0.0; MAX_COMPONENTS];
    u[0] = rho;
    let mut kin = 0.0;
    for d in 0..dim {
        u[1 + d] = rho * v[d];
        kin += v[d] * v[d];
    }
    u[dim + 1] = p / (gamma - 1.0) + 0.5 * rho * kin;
    u
}

/// `(ρ, v, p)` of an admissible state.
pub fn primitive_from_conserved(u: &State, dim: usize, gamma: f64) -> Result<(f64, Point, f64)> {
    let p = pressure(u, dim, gamma)?;
    let mut v = [0.0; 2];
    for d in 0..dim {
        v[d] = u[1 + d] / u[0];
    }
    Ok((u[0], v, p))
}

/// `½(f(uL)+f(uR))·n − ½λ(uR−uL)` with λ the larger endpoint speed (1 for KPP).
pub fn llf_flux(law: &ConservationLaw, ul: &State, ur: &State, x: Point, n: Point) -> Result<State> {
    let fl = law.normal_flux(ul, x, n)?;
    let fr = law.normal_flux(ur, x, n)?;
    let lambda = match law.global_wave_speed() {
        Some(s) => s,
        None => law.directional_speed(ul, x, n)?.max(law.directional_speed(ur, x, n)?),
    };
    let mut out = [0.0; MAX_COMPONENTS];
    for c in 0..law.num_components() {
        out[c] = 0.5 * (fl[c] + fr[c]) - 0.5 * lambda * (ur[c] - ul[c]);
    }
    Ok(out)
}

/// HLL flux with Davis wave-speed bounds.
pub fn hll_flux(ul: &State, ur: &State, n: Point, dim: usize, gamma: f64) -> Result<State> {
    let law = ConservationLaw::Euler { dim, gamma };
    let vn = |u: &State| -> f64 { (0..dim).map(|d| u[1 + d] / u[0] * n[d]).sum() };
    let cl = sound_speed(ul, dim, gamma)?;
    let cr = sound_speed(ur, dim, gamma)?;
    let (vl, vr) = (vn(ul), vn(ur));
    let sl = (vl - cl).min(vr - cr);
    let sr = (vl + cl).max(vr + cr);
    let fl = law.normal_flux(ul, [0.0; 2], n)?;
    if sl >= 0.0 {
        return Ok(fl);
    }
    let fr = law.normal_flux(ur, [0.0; 2], n)?;
    if sr <= 0.0 {
        return Ok(fr);
    }
    let mut out = [0.0; MAX_COMPONENTS];
    for c in 0..dim + 2 {
        out[c] = (sr * fl[c] - sl * fr[c] + sl * sr * (ur[c] - ul[c])) / (sr - sl);
    }
    Ok(out)
}
