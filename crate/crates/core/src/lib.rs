//! Structure-preserving integrators for Lie-Poisson Hamiltonian systems.
//!
//! The crate is organised bottom-up:
//!
//! * [`lie3`]: exact kernel for so(3), so(3)* and SO(3) (hat/vee, exponential,
//!   `dexpinv`, adjoint and coadjoint actions).
//! * [`poisson`]: generic Poisson structures on R^m, the [`StepMap`] contract and
//!   the Poisson-map defect diagnostic.
//! * [`models`]: the free rigid body, a constant-bivector oscillator and a
//!   high-accuracy reference flow.
//! * [`solvers`]: damped fixed-point iteration and finite-difference Newton.
//! * [`integrators`]: midpoint, discrete Euler-Poincaré / Lie-Poisson,
//!   retraction-based, collective, discrete-gradient and generating-function
//!   schemes, plus attitude reconstruction.

pub mod error;
pub mod integrators;
pub mod lie3;
pub mod models;
pub mod poisson;
pub mod solvers;

pub use error::{Error, Result};
pub use lie3::{AlgebraPoint, CoalgebraPoint, GroupElement};
pub use models::{RigidBody, Trajectory};
pub use poisson::{PoissonSystem, StepMap};
pub use solvers::SolverSettings;
