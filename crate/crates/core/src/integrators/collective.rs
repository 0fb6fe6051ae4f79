//! Collective integrator through the Hopf realization `T*R² → so(3)*`.
//!
//! With `a = q₁ + i p₁`, `b = q₂ + i p₂` the map reads `μ₁ + i μ₂ = ā b / 2`,
//! `μ₃ = (|a|² − |b|²)/4`, and `‖μ‖ = (|a|² + |b|²)/4`.
//!
//! Under the canonical matrix `Ω = [[0, I], [−I, 0]]` one has `DJ Ω DJᵀ = −hat(J)`,
//! so the lifted flow uses `ż = −Ω ∇(H∘J)` (`q̇ = −∂K/∂p`, `ṗ = ∂K/∂q`) to project onto
//! `μ̇ = μ × ∇H(μ)`. The midpoint rule is symplectic for either sign.

use nalgebra::{DVector, Matrix3x4, Vector4};

use crate::error::{Error, Result};
use crate::lie3::CoalgebraPoint;
use crate::models::{from_vec3, to_vec3, RigidBody};
use crate::poisson::StepMap;
use crate::solvers::{fixed_point, SolverSettings};

/// Default solver tolerance of [`collective_step`]. The lifted midpoint rule conserves
/// `|z|²`, hence `‖μ‖`, only up to the residual of its implicit solve.
pub const COLLECTIVE_TOLERANCE: f64 = 1e-14;

/// Point `(q₁, q₂, p₁, p₂)` of T*R².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopfLift(pub Vector4<f64>);

impl HopfLift {
    pub fn new(q1: f64, q2: f64, p1: f64, p2: f64) -> Self {
        HopfLift(Vector4::new(q1, q2, p1, p2))
    }
}

/// `J(q, p) = ¼ (2q₁q₂ + 2p₁p₂, 2q₁p₂ − 2q₂p₁, q₁² + p₁² − q₂² − p₂²)`.
pub fn hopf_map(z: &HopfLift) -> CoalgebraPoint {
    let [q1, q2, p1, p2] = [z.0[0], z.0[1], z.0[2], z.0[3]];
    CoalgebraPoint::new(
        0.5 * (q1 * q2 + p1 * p2),
        0.5 * (q1 * p2 - q2 * p1),
        0.25 * (q1 * q1 + p1 * p1 - q2 * q2 - p2 * p2),
    )
}

fn hopf_jacobian(z: &Vector4<f64>) -> Matrix3x4<f64> {
    let [q1, q2, p1, p2] = [z[0], z[1], z[2], z[3]];
    Matrix3x4::new(
        q2, q1, p2, p1, //
        p2, -p1, -q2, q1, //
        q1, -q2, p1, -p2,
    ) * 0.5
}

/// Right inverse of [`hopf_map`].
///
/// On the northern hemisphere (`μ₃ ≥ 0`) `a` is taken real and positive; on the
/// southern one `b` is, which keeps both branches away from their degenerate pole.
pub fn hopf_section(mu: &CoalgebraPoint) -> Result<HopfLift> {
    let [x, y, z] = [mu.0.x, mu.0.y, mu.0.z];
    let r = mu.norm();
    if !r.is_finite() {
        return Err(Error::domain("non-finite momentum"));
    }
    if r == 0.0 {
        return Err(Error::domain("Hopf fibre degenerates at μ = 0"));
    }
    if z >= 0.0 {
        // a = √(2(r + μ₃)), b = 2(μ₁ + iμ₂)/a
        let a = (2.0 * (r + z)).sqrt();
        Ok(HopfLift::new(a, 2.0 * x / a, 0.0, 2.0 * y / a))
    } else {
        // b = √(2(r − μ₃)), a = 2(μ₁ − iμ₂)/b
        let b = (2.0 * (r - z)).sqrt();
        Ok(HopfLift::new(2.0 * x / b, b, -2.0 * y / b, 0.0))
    }
}

/// Midpoint rule applied to the collective Hamiltonian `H∘J` on T*R².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectiveIntegrator {
    body: RigidBody,
}

impl CollectiveIntegrator {
    pub fn new(body: RigidBody) -> Self {
        CollectiveIntegrator { body }
    }

    pub fn collective_hamiltonian(&self, z: &HopfLift) -> f64 {
        self.body.energy(&hopf_map(z).0)
    }

    /// Lifted vector field `−Ω ∇(H∘J)`.
    pub fn lifted_vector_field(&self, z: &Vector4<f64>) -> Vector4<f64> {
        let mu = hopf_map(&HopfLift(*z)).0;
        let grad = hopf_jacobian(z).transpose() * self.body.angular_velocity(&mu);
        // −Ω ∇K = (−∂K/∂p, ∂K/∂q)
        Vector4::new(-grad[2], -grad[3], grad[0], grad[1])
    }

    pub fn step_lifted(&self, z: &HopfLift, h: f64, s: &SolverSettings) -> Result<HopfLift> {
        let z0 = DVector::from_column_slice(z.0.as_slice());
        let vf = |x: &DVector<f64>| {
            let v = self.lifted_vector_field(&Vector4::new(x[0], x[1], x[2], x[3]));
            DVector::from_column_slice(v.as_slice())
        };
        let predictor = &z0 + vf(&z0) * h;
        let inner = |x: &DVector<f64>| Ok(&z0 + vf(&((&z0 + x) * 0.5)) * h);
        let sol = fixed_point(inner, predictor, s)?;
        Ok(HopfLift(Vector4::new(
            sol.x[0], sol.x[1], sol.x[2], sol.x[3],
        )))
    }
}

/// Collective step on so(3)*: lift by [`hopf_section`], advance the lift, project by
/// [`hopf_map`]. The lifted midpoint rule commutes with the fibre rotation, so the
/// result does not depend on the section.
pub fn collective_step(body: &RigidBody) -> StepMap {
    let integrator = CollectiveIntegrator::new(*body);
    let settings = SolverSettings::default().with_tolerance(COLLECTIVE_TOLERANCE);
    StepMap::new("collective", body.system(), settings, move |z, h, s| {
        let lift = hopf_section(&CoalgebraPoint(to_vec3(z)))?;
        let next = integrator.step_lifted(&lift, h, s)?;
        Ok(from_vec3(&hopf_map(&next).0))
    })
}
