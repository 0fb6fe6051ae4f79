//! Concrete models and the reference flow used as ground truth.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::lie3::{hat, AlgebraPoint, CoalgebraPoint};
use crate::poisson::{FirstIntegral, PoissonSystem};

/// Free rigid body with diagonal inertia `(I₁, I₂, I₃)`.
///
/// Hamiltonian form on so(3)*: `H(μ) = ½ Σ μᵢ² / Iᵢ`, bivector `Π(μ) = hat(μ)`, so
/// `μ̇ = μ × Ω` with `Ω = ∇H(μ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidBody {
    inertia: Vector3<f64>,
}

impl RigidBody {
    pub fn new(inertia: Vector3<f64>) -> Result<Self> {
        if !inertia.iter().all(|i| i.is_finite() && *i > 0.0) {
            return Err(Error::domain(format!(
                "inertia components must be positive, got {inertia:?}"
            )));
        }
        Ok(RigidBody { inertia })
    }

    pub fn inertia(&self) -> &Vector3<f64> {
        &self.inertia
    }

    /// `J = ½ diag(−I₁+I₂+I₃, I₁−I₂+I₃, I₁+I₂−I₃)`, so that
    /// `½ Tr(hat(Ω) J hat(Ω)ᵀ) = ½ Σ Iᵢ Ωᵢ²`.
    pub fn trace_form_j(&self) -> Matrix3<f64> {
        let [i1, i2, i3] = [self.inertia.x, self.inertia.y, self.inertia.z];
        Matrix3::from_diagonal(&Vector3::new(-i1 + i2 + i3, i1 - i2 + i3, i1 + i2 - i3)) * 0.5
    }

    pub fn energy(&self, mu: &Vector3<f64>) -> f64 {
        0.5 * mu.component_div(&self.inertia).dot(mu)
    }

    /// `∇H(μ)`, the body angular velocity.
    pub fn angular_velocity(&self, mu: &Vector3<f64>) -> Vector3<f64> {
        mu.component_div(&self.inertia)
    }

    /// `μ × ∇H(μ)`.
    pub fn vector_field(&self, mu: &Vector3<f64>) -> Vector3<f64> {
        mu.cross(&self.angular_velocity(mu))
    }

    /// Reduced Lagrangian `l(ξ) = ½ Σ Iᵢ ξᵢ²`.
    pub fn lagrangian(&self, xi: &AlgebraPoint) -> f64 {
        0.5 * xi.0.component_mul(&self.inertia).dot(&xi.0)
    }

    /// Trace form `½ Tr(Ω J Ωᵀ)` for a skew matrix `Ω`.
    pub fn trace_lagrangian(&self, omega: &Matrix3<f64>) -> f64 {
        0.5 * (omega * self.trace_form_j() * omega.transpose()).trace()
    }

    /// Legendre transform `ξ ↦ δl/δξ = (I₁ξ₁, I₂ξ₂, I₃ξ₃)`.
    pub fn legendre(&self, xi: &AlgebraPoint) -> CoalgebraPoint {
        CoalgebraPoint(xi.0.component_mul(&self.inertia))
    }

    pub fn legendre_inverse(&self, mu: &CoalgebraPoint) -> AlgebraPoint {
        AlgebraPoint(mu.0.component_div(&self.inertia))
    }

    /// Lie-Poisson system on so(3)* with Casimir `C = ½ ‖μ‖²` registered.
    pub fn system(&self) -> PoissonSystem {
        let body = *self;
        let hamiltonian = FirstIntegral::new(
            "H",
            move |z: &DVector<f64>| body.energy(&to_vec3(z)),
            move |z: &DVector<f64>| from_vec3(&body.angular_velocity(&to_vec3(z))),
        );
        let casimir = FirstIntegral::new(
            "C",
            |z: &DVector<f64>| 0.5 * z.norm_squared(),
            |z: &DVector<f64>| z.clone(),
        );
        PoissonSystem::new(
            3,
            |z: &DVector<f64>| {
                let m = hat(&to_vec3(z));
                DMatrix::from_iterator(3, 3, m.iter().cloned())
            },
            hamiltonian,
        )
        .expect("dimension 3 is valid")
        .with_casimir(casimir)
    }
}

pub(crate) fn to_vec3(z: &DVector<f64>) -> Vector3<f64> {
    Vector3::new(z[0], z[1], z[2])
}

pub(crate) fn from_vec3(v: &Vector3<f64>) -> DVector<f64> {
    DVector::from_column_slice(v.as_slice())
}

/// Harmonic oscillator on R² with constant bivector `[[0, 1], [−1, 0]]` and
/// `H = ½ (q² + p²)`.
pub fn harmonic_oscillator() -> PoissonSystem {
    let hamiltonian = FirstIntegral::new(
        "H",
        |z: &DVector<f64>| 0.5 * z.norm_squared(),
        |z: &DVector<f64>| z.clone(),
    );
    PoissonSystem::new(
        2,
        |_: &DVector<f64>| DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]),
        hamiltonian,
    )
    .expect("dimension 2 is valid")
}

/// Per-state diagnostics recorded along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub energy: f64,
    /// One value per registered Casimir, in registration order.
    pub casimirs: Vec<f64>,
    /// `‖z‖`, the coadjoint-orbit radius on so(3)*.
    pub orbit_radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<DVector<f64>>,
    diagnostics: Vec<Diagnostics>,
}

impl Trajectory {
    pub fn new(sys: &PoissonSystem, times: Vec<f64>, states: Vec<DVector<f64>>) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::domain(format!(
                "{} times for {} states",
                times.len(),
                states.len()
            )));
        }
        if states.is_empty() {
            return Err(Error::domain("trajectory must contain at least one state"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain(
                "trajectory times must be strictly increasing",
            ));
        }
        let diagnostics = states
            .iter()
            .map(|z| Diagnostics {
                energy: sys.energy(z),
                casimirs: sys.casimirs().iter().map(|c| c.value(z)).collect(),
                orbit_radius: z.norm(),
            })
            .collect();
        Ok(Trajectory {
            times,
            states,
            diagnostics,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DVector<f64>] {
        &self.states
    }

    pub fn diagnostics(&self) -> &[Diagnostics] {
        &self.diagnostics
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &DVector<f64> {
        self.states.last().expect("trajectory is never empty")
    }

    /// `max_k |H(z_k) − H(z_0)|`.
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.diagnostics[0].energy;
        self.diagnostics
            .iter()
            .map(|d| (d.energy - e0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest drift over all registered Casimirs.
    pub fn casimir_drift(&self) -> f64 {
        let c0 = &self.diagnostics[0].casimirs;
        self.diagnostics
            .iter()
            .flat_map(|d| d.casimirs.iter().zip(c0).map(|(c, c0)| (c - c0).abs()))
            .fold(0.0, f64::max)
    }

    /// `max_k | ‖z_k‖ − ‖z_0‖ |`.
    pub fn orbit_error(&self) -> f64 {
        let r0 = self.diagnostics[0].orbit_radius;
        self.diagnostics
            .iter()
            .map(|d| (d.orbit_radius - r0).abs())
            .fold(0.0, f64::max)
    }
}

/// Initial RK4 step width before refinement.
const REFERENCE_INITIAL_STEP: f64 = 0.05;
const REFERENCE_MAX_REFINEMENTS: usize = 16;

fn rk4_fixed<F>(f: &F, z0: &DVector<f64>, t: f64, n: usize) -> DVector<f64>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let dt = t / n as f64;
    let mut z = z0.clone();
    for _ in 0..n {
        let k1 = f(&z);
        let k2 = f(&(&z + &k1 * (0.5 * dt)));
        let k3 = f(&(&z + &k2 * (0.5 * dt)));
        let k4 = f(&(&z + &k3 * dt));
        z += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    }
    z
}

/// Classical RK4 for `ż = f(z)` on `[0, t]`, halving the step until two successive
/// refinements differ by less than `tol`. Returns the finer solution.
pub fn reference_ode<F>(f: F, z0: &DVector<f64>, t: f64, tol: f64) -> Result<DVector<f64>>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain("reference flow needs a finite t >= 0"));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("reference tolerance must be positive"));
    }
    if t == 0.0 {
        return Ok(z0.clone());
    }
    let mut n = ((t / REFERENCE_INITIAL_STEP).ceil() as usize).max(1);
    let mut coarse = rk4_fixed(&f, z0, t, n);
    let mut diff = f64::INFINITY;
    for _ in 0..REFERENCE_MAX_REFINEMENTS {
        n *= 2;
        let fine = rk4_fixed(&f, z0, t, n);
        diff = (&fine - &coarse).norm();
        if diff < tol {
            return Ok(fine);
        }
        coarse = fine;
    }
    Err(Error::NonConvergence {
        iterations: REFERENCE_MAX_REFINEMENTS,
        residual: diff,
    })
}

/// High-accuracy flow of `ż = Π(z)∇H(z)` over time `t`; see [`reference_ode`].
pub fn reference_flow(
    sys: &PoissonSystem,
    z0: &DVector<f64>,
    t: f64,
    tol: f64,
) -> Result<DVector<f64>> {
    sys.check_state(z0)?;
    reference_ode(|z| sys.bivector(z) * sys.gradient(z), z0, t, tol)
}
