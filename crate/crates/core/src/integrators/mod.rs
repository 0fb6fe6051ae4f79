//! Integrator families. Each constructor returns a [`StepMap`](crate::StepMap) on the
//! state space of its [`PoissonSystem`](crate::PoissonSystem); schemes with an internal
//! lifted or group state expose that state through a dedicated type as well.

mod collective;
mod discrete;
mod generating;
mod gradient;
mod midpoint;
mod reconstruct;
mod retraction;

pub use collective::{
    collective_step, hopf_map, hopf_section, CollectiveIntegrator, HopfLift, COLLECTIVE_TOLERANCE,
};
pub use discrete::{discrete_ep_rigid_step, discrete_lp_step, lie_euler_step, DiscreteRigidBody};
pub use generating::{hj_generating_step, GeneratingSeries};
pub use gradient::{
    discrete_gradient_step, gauss_legendre, mean_value_gradient, midpoint_gradient,
    DiscreteGradientKind, DISCRETE_GRADIENT_TOLERANCE,
};
pub use midpoint::{exact_flow_step, explicit_euler_step, midpoint_step};
pub use reconstruct::reconstruct;
pub use retraction::{retraction_lp_step, RetractionScaling, RetractionVariant};

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::models::RigidBody;

/// Largest admissible `h ‖∇H(μ)‖` for schemes working in the exponential chart.
pub const CHART_STEP_LIMIT: f64 = 1.0;

pub(crate) fn check_chart_step(body: &RigidBody, mu: &Vector3<f64>, h: f64) -> Result<()> {
    let norm = h.abs() * body.angular_velocity(mu).norm();
    if norm > CHART_STEP_LIMIT {
        return Err(Error::ChartViolation {
            norm,
            limit: CHART_STEP_LIMIT,
        });
    }
    Ok(())
}
