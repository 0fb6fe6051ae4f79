use liepoisson::integrators::{
    collective_step, discrete_ep_rigid_step, discrete_gradient_step, exact_flow_step,
    explicit_euler_step, hj_generating_step, lie_euler_step, midpoint_step, retraction_lp_step,
    DiscreteGradientKind, RetractionScaling, RetractionVariant,
};
use liepoisson::models::harmonic_oscillator;
use liepoisson::{PoissonSystem, RigidBody, StepMap};
use nalgebra::{DVector, Vector3};

use crate::config::{Scaling, StudyConfig};
use crate::error::{HarnessError, Result};

pub const MODELS: &[&str] = &["rigidbody", "oscillator"];

pub const INTEGRATORS: &[&str] = &[
    "midpoint",
    "dep-rigid",
    "dlp",
    "retraction-h",
    "retraction-l",
    "collective",
    "dgrad-mean",
    "dgrad-mid",
    "hj1",
    "hj2",
    "euler",
    "exact",
];

/// Integrators that only make sense on the rigid body.
const RIGID_ONLY: &[&str] = &[
    "dep-rigid",
    "dlp",
    "retraction-h",
    "retraction-l",
    "collective",
    "hj1",
    "hj2",
];

/// Per-step tolerance of the `exact` pseudo-integrator, below the order-study error floor.
const EXACT_STEP_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    RigidBody(RigidBody),
    Oscillator,
}

impl Model {
    pub fn from_config(cfg: &StudyConfig) -> Result<Self> {
        match cfg.model.as_str() {
            "rigidbody" => {
                if cfg.inertia.len() != 3 {
                    return Err(HarnessError::config("inertia needs three components"));
                }
                let inertia = Vector3::new(cfg.inertia[0], cfg.inertia[1], cfg.inertia[2]);
                RigidBody::new(inertia)
                    .map(Model::RigidBody)
                    .map_err(|e| HarnessError::config(e.to_string()))
            }
            "oscillator" => Ok(Model::Oscillator),
            other => Err(HarnessError::config(format!("unknown model {other:?}"))),
        }
    }

    pub fn system(&self) -> PoissonSystem {
        match self {
            Model::RigidBody(b) => b.system(),
            Model::Oscillator => harmonic_oscillator(),
        }
    }

    /// Initial state checked against the model dimension.
    pub fn initial_state(&self, mu0: &[f64]) -> Result<DVector<f64>> {
        let dim = self.system().dim();
        if mu0.len() != dim {
            return Err(HarnessError::config(format!(
                "mu0 has {} components, model needs {dim}",
                mu0.len()
            )));
        }
        Ok(DVector::from_column_slice(mu0))
    }
}

fn retraction_scaling(s: Scaling) -> RetractionScaling {
    match s {
        Scaling::Half => RetractionScaling::Half,
        Scaling::Full => RetractionScaling::Full,
    }
}

/// Step map named by `cfg.integrator`, with solver overrides from the config applied.
pub fn build_step_map(cfg: &StudyConfig) -> Result<StepMap> {
    let model = Model::from_config(cfg)?;
    let sys = model.system();
    let name = cfg.integrator.as_str();
    let body = match &model {
        Model::RigidBody(b) => Some(*b),
        Model::Oscillator => None,
    };
    if RIGID_ONLY.contains(&name) && body.is_none() {
        return Err(HarnessError::config(format!(
            "integrator {name:?} requires the rigidbody model"
        )));
    }
    let rigid = || body.expect("checked above");
    let map = match name {
        "midpoint" => midpoint_step(&sys),
        "euler" => explicit_euler_step(&sys),
        "exact" => exact_flow_step(&sys, EXACT_STEP_TOLERANCE),
        "dgrad-mean" => discrete_gradient_step(&sys, DiscreteGradientKind::MeanValue),
        "dgrad-mid" => discrete_gradient_step(&sys, DiscreteGradientKind::Midpoint),
        "dep-rigid" => discrete_ep_rigid_step(&rigid()),
        "dlp" => lie_euler_step(&rigid()),
        "retraction-h" => retraction_lp_step(
            &rigid(),
            RetractionVariant::Hamiltonian,
            retraction_scaling(cfg.scaling),
        ),
        "retraction-l" => retraction_lp_step(
            &rigid(),
            RetractionVariant::Lagrangian,
            retraction_scaling(cfg.scaling),
        ),
        "collective" => collective_step(&rigid()),
        "hj1" => hj_generating_step(&rigid(), 1)?,
        "hj2" => hj_generating_step(&rigid(), 2)?,
        other => {
            return Err(HarnessError::config(format!(
                "unknown integrator {other:?}"
            )));
        }
    };
    let mut settings = *map.settings();
    if let Some(tol) = cfg.tol {
        settings = settings.with_tolerance(tol);
    }
    if let Some(n) = cfg.max_iterations {
        settings = settings.with_max_iterations(n);
    }
    settings
        .validate()
        .map_err(|e| HarnessError::config(e.to_string()))?;
    Ok(map.with_settings(settings))
}
