use std::fmt;
use std::sync::Arc;

use crate::physics::{ConservationLaw, State};
use crate::{Error, Point, Result};

/// Exterior state as a function of the interior state, position, outward normal and time.
pub type GhostFn = Arc<dyn Fn(&State, Point, Point, f64) -> State + Send + Sync>;
/// Prescribed state as a function of position and time.
pub type StateFn = Arc<dyn Fn(Point, f64) -> State + Send + Sync>;

#[derive(Clone)]
pub enum BoundaryCondition {
    Periodic,
    /// Dirichlet inflow: the ghost state is prescribed.
    Inflow(StateFn),
    /// Slip wall: mirrored normal momentum (Euler only).
    Reflective,
    /// Zero-gradient outflow: the ghost copies the interior.
    Outflow,
    /// Position/time dependent mix of the above.
    Custom(GhostFn),
}

impl fmt::Debug for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            BoundaryCondition::Periodic => "Periodic",
            BoundaryCondition::Inflow(_) => "Inflow",
            BoundaryCondition::Reflective => "Reflective",
            BoundaryCondition::Outflow => "Outflow",
            BoundaryCondition::Custom(_) => "Custom",
        };
        f.write_str(name)
    }
}

impl BoundaryCondition {
    pub fn constant(state: State) -> Self {
        BoundaryCondition::Inflow(Arc::new(move |_, _| state))
    }

    pub fn ghost(&self, law: &ConservationLaw, interior: &State, x: Point, n: Point, t: f64) -> State {
        match self {
            BoundaryCondition::Periodic | BoundaryCondition::Outflow => *interior,
            BoundaryCondition::Inflow(f) => f(x, t),
            BoundaryCondition::Reflective => reflect(law, interior, n),
            BoundaryCondition::Custom(f) => f(interior, x, n, t),
        }
    }
}

/// `(ρ, ρv − 2(ρv·n)n, ρE)`; for scalar laws the state is copied.
pub fn reflect(law: &ConservationLaw, u: &State, n: Point) -> State {
    let mut out = *u;
    if let ConservationLaw::Euler { dim, .. } = law {
        let mn: f64 = (0..*dim).map(|d| u[1 + d] * n[d]).sum();
        for d in 0..*dim {
            out[1 + d] = u[1 + d] - 2.0 * mn * n[d];
        }
    }
    out
}

/// Conditions for faces `-x, +x, -y, +y`.
#[derive(Debug, Clone)]
pub struct BoundaryConditions(pub [BoundaryCondition; 4]);

impl BoundaryConditions {
    pub fn periodic() -> Self {
        Self(std::array::from_fn(|_| BoundaryCondition::Periodic))
    }

    pub fn uniform(bc: BoundaryCondition) -> Self {
        Self(std::array::from_fn(|_| bc.clone()))
    }

    pub fn get(&self, face: usize) -> &BoundaryCondition {
        &self.0[face]
    }

    /// Every periodic axis carries `Periodic` on both ends and no other face does.
    pub fn validate(&self, dim: usize, periodic: [bool; 2], law: &ConservationLaw) -> Result<()> {
        for face in 0..2 * dim {
            let axis = face / 2;
            let is_periodic = matches!(self.0[face], BoundaryCondition::Periodic);
            if is_periodic != periodic[axis] {
                return Err(Error::Config(format!(
                    "face {face}: boundary condition {:?} does not match mesh periodicity {}",
                    self.0[face], periodic[axis]
                )));
            }
            if matches!(self.0[face], BoundaryCondition::Reflective) && !law.is_euler() {
                return Err(Error::Config(format!("face {face}: reflective walls need the Euler equations")));
            }
        }
        Ok(())
    }
}
