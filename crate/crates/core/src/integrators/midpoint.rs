use nalgebra::DVector;

use crate::models::reference_flow;
use crate::poisson::{PoissonSystem, StepMap};
use crate::solvers::{fixed_point, SolverSettings};

/// Implicit midpoint rule `(z' − z)/h = Π(m) ∇H(m)`, `m = (z + z')/2`, solved by
/// fixed-point iteration from an explicit-Euler predictor.
pub fn midpoint_step(sys: &PoissonSystem) -> StepMap {
    let system = sys.clone();
    StepMap::new(
        "midpoint",
        sys.clone(),
        SolverSettings::default(),
        move |z, h, s| {
            let predictor = z + (system.bivector(z) * system.gradient(z)) * h;
            let inner = |x: &DVector<f64>| {
                let m = (z + x) * 0.5;
                Ok(z + (system.bivector(&m) * system.gradient(&m)) * h)
            };
            fixed_point(inner, predictor, s).map(|sol| sol.x)
        },
    )
}

/// Explicit Euler `z' = z + h Π(z)∇H(z)`; first-order baseline.
pub fn explicit_euler_step(sys: &PoissonSystem) -> StepMap {
    let system = sys.clone();
    StepMap::new(
        "euler",
        sys.clone(),
        SolverSettings::default(),
        move |z, h, _| Ok(z + (system.bivector(z) * system.gradient(z)) * h),
    )
}

/// The reference flow wrapped as a step map; errors sit at the oracle's tolerance.
pub fn exact_flow_step(sys: &PoissonSystem, tol: f64) -> StepMap {
    let system = sys.clone();
    StepMap::new(
        "exact",
        sys.clone(),
        SolverSettings::default(),
        move |z, h, _| reference_flow(&system, z, h, tol),
    )
}
