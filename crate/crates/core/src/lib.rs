//! High-order continuous and discontinuous Galerkin discretizations of hyperbolic
//! conservation laws on structured meshes, stabilized by dissipation-based
//! Hermite-WENO smoothness sensing.
//!
//! The crate is organized bottom-up:
//!
//! * [`mesh`] structured interval / Cartesian quadrilateral meshes with vertex patches,
//! * [`element`] Lagrange reference elements, quadrature, Taylor transforms and semi-norms,
//! * [`weno`] cell-cell and cell-vertex HWENO reconstructions and the smoothness sensor,
//! * [`stabilization`] the blended artificial-viscosity operator and WENO quadrature weights,
//! * [`physics`] fluxes, numerical fluxes and an exact Riemann solver,
//! * [`solver`] residual assembly, mass solves, SSP-RK3 and positivity limiting,
//! * [`harness`] benchmark definitions, error norms, output writers and the CLI driver.

pub mod element;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod mesh;
pub mod physics;
pub mod solver;
pub mod stabilization;
pub mod weno;

pub use error::{Error, Result};

/// Physical or reference coordinates. In 1D only the first entry is used.
pub type Point = [f64; 2];
