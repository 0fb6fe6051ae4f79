//! Finite-dimensional Poisson structures and the one-step map contract.
//!
//! Dynamics are `ż = Π(z) ∇H(z)` with `Π` supplied per model. A [`StepMap`] is any
//! deterministic `(z, h) ↦ z'` built on top of a [`PoissonSystem`]; every diagnostic in
//! the crate consumes step maps.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::models::Trajectory;
use crate::solvers::{fd_jacobian, SolverSettings};

/// Default central-difference step for defect and Jacobi diagnostics.
pub const DEFAULT_FD_STEP: f64 = 1e-6;

type ScalarFn = dyn Fn(&DVector<f64>) -> f64 + Send + Sync;
type VectorFn = dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync;
type MatrixFn = dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync;

/// Scalar function with its gradient (Hamiltonian or Casimir).
#[derive(Clone)]
pub struct FirstIntegral {
    name: String,
    value: Arc<ScalarFn>,
    gradient: Arc<VectorFn>,
}

impl FirstIntegral {
    pub fn new(
        name: impl Into<String>,
        value: impl Fn(&DVector<f64>) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
    ) -> Self {
        FirstIntegral {
            name: name.into(),
            value: Arc::new(value),
            gradient: Arc::new(gradient),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn value(&self, z: &DVector<f64>) -> f64 {
        (self.value)(z)
    }

    pub fn gradient(&self, z: &DVector<f64>) -> DVector<f64> {
        (self.gradient)(z)
    }
}

impl fmt::Debug for FirstIntegral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FirstIntegral")
            .field("name", &self.name)
            .finish()
    }
}

#[derive(Clone)]
pub struct PoissonSystem {
    dim: usize,
    bivector: Arc<MatrixFn>,
    hamiltonian: FirstIntegral,
    casimirs: Vec<FirstIntegral>,
}

impl fmt::Debug for PoissonSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PoissonSystem")
            .field("dim", &self.dim)
            .field("hamiltonian", &self.hamiltonian)
            .field("casimirs", &self.casimirs)
            .finish()
    }
}

impl PoissonSystem {
    pub fn new(
        dim: usize,
        bivector: impl Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync + 'static,
        hamiltonian: FirstIntegral,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("Poisson system dimension must be positive"));
        }
        Ok(PoissonSystem {
            dim,
            bivector: Arc::new(bivector),
            hamiltonian,
            casimirs: Vec::new(),
        })
    }

    pub fn with_casimir(mut self, casimir: FirstIntegral) -> Self {
        self.casimirs.push(casimir);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bivector(&self, z: &DVector<f64>) -> DMatrix<f64> {
        (self.bivector)(z)
    }

    pub fn hamiltonian(&self) -> &FirstIntegral {
        &self.hamiltonian
    }

    pub fn energy(&self, z: &DVector<f64>) -> f64 {
        self.hamiltonian.value(z)
    }

    pub fn gradient(&self, z: &DVector<f64>) -> DVector<f64> {
        self.hamiltonian.gradient(z)
    }

    pub fn casimirs(&self) -> &[FirstIntegral] {
        &self.casimirs
    }

    pub(crate) fn check_state(&self, z: &DVector<f64>) -> Result<()> {
        if z.len() != self.dim {
            return Err(Error::domain(format!(
                "state has dimension {}, system expects {}",
                z.len(),
                self.dim
            )));
        }
        if !z.iter().all(|x| x.is_finite()) {
            return Err(Error::domain("non-finite state"));
        }
        Ok(())
    }

    /// `‖Π(z) + Π(z)ᵀ‖_F`.
    pub fn skew_residual(&self, z: &DVector<f64>) -> f64 {
        let p = self.bivector(z);
        (&p + p.transpose()).norm()
    }

    /// Largest Jacobi-identity residual
    /// `Σ_l Π^{il} ∂_l Π^{jk} + Π^{jl} ∂_l Π^{ki} + Π^{kl} ∂_l Π^{ij}`
    /// over all index triples, with `∂_l Π` by central differences.
    pub fn jacobi_residual(&self, z: &DVector<f64>, fd_step: f64) -> f64 {
        let m = self.dim;
        let p = self.bivector(z);
        let mut dp = Vec::with_capacity(m);
        let mut probe = z.clone();
        for l in 0..m {
            let orig = probe[l];
            probe[l] = orig + fd_step;
            let plus = self.bivector(&probe);
            probe[l] = orig - fd_step;
            let minus = self.bivector(&probe);
            probe[l] = orig;
            dp.push((plus - minus) / (2.0 * fd_step));
        }
        let mut worst = 0.0_f64;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let s: f64 = (0..m)
                        .map(|l| {
                            p[(i, l)] * dp[l][(j, k)]
                                + p[(j, l)] * dp[l][(k, i)]
                                + p[(k, l)] * dp[l][(i, j)]
                        })
                        .sum();
                    worst = worst.max(s.abs());
                }
            }
        }
        worst
    }

    /// Largest `‖Π(z) ∇C(z)‖` over the registered Casimirs.
    pub fn casimir_residual(&self, z: &DVector<f64>) -> f64 {
        let p = self.bivector(z);
        self.casimirs
            .iter()
            .map(|c| (&p * c.gradient(z)).norm())
            .fold(0.0, f64::max)
    }

    /// Poisson bracket `{f, g}(z) = ∇f(z)ᵀ Π(z) ∇g(z)`.
    pub fn bracket(&self, f: &FirstIntegral, g: &FirstIntegral, z: &DVector<f64>) -> f64 {
        f.gradient(z).dot(&(self.bivector(z) * g.gradient(z)))
    }
}

/// Hamiltonian vector field `Π(z) ∇H(z)`.
pub fn hamiltonian_vf(sys: &PoissonSystem, z: &DVector<f64>) -> Result<DVector<f64>> {
    sys.check_state(z)?;
    Ok(sys.bivector(z) * sys.gradient(z))
}

/// Central-difference Jacobian of `f` at `z`.
pub fn jacobian_fd<F>(mut f: F, z: &DVector<f64>, step: f64) -> Result<DMatrix<f64>>
where
    F: FnMut(&DVector<f64>) -> Result<DVector<f64>>,
{
    if !(step > 0.0) {
        return Err(Error::domain("finite-difference step must be positive"));
    }
    fd_jacobian(&mut f, z, step)
}

pub type StepFn = dyn Fn(&DVector<f64>, f64, &SolverSettings) -> Result<DVector<f64>> + Send + Sync;

/// One-step integrator `(z_k, h) ↦ z_{k+1}` bound to a system and solver settings.
#[derive(Clone)]
pub struct StepMap {
    name: String,
    system: PoissonSystem,
    settings: SolverSettings,
    stepper: Arc<StepFn>,
}

impl fmt::Debug for StepMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StepMap")
            .field("name", &self.name)
            .field("settings", &self.settings)
            .finish()
    }
}

impl StepMap {
    pub fn new(
        name: impl Into<String>,
        system: PoissonSystem,
        settings: SolverSettings,
        stepper: impl Fn(&DVector<f64>, f64, &SolverSettings) -> Result<DVector<f64>>
            + Send
            + Sync
            + 'static,
    ) -> Self {
        StepMap {
            name: name.into(),
            system,
            settings,
            stepper: Arc::new(stepper),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn system(&self) -> &PoissonSystem {
        &self.system
    }

    pub fn settings(&self) -> &SolverSettings {
        &self.settings
    }

    pub fn with_settings(mut self, settings: SolverSettings) -> Self {
        self.settings = settings;
        self
    }

    pub fn step(&self, z: &DVector<f64>, h: f64) -> Result<DVector<f64>> {
        self.system.check_state(z)?;
        if !(h.is_finite()) {
            return Err(Error::domain("step size must be finite"));
        }
        (self.stepper)(z, h, &self.settings)
    }

    /// Applies the map `steps` times from `z0`; failures carry the step index.
    pub fn integrate(&self, z0: &DVector<f64>, h: f64, steps: usize) -> Result<Trajectory> {
        if !(h > 0.0) {
            return Err(Error::domain("step size must be positive"));
        }
        self.system.check_state(z0)?;
        let mut states = Vec::with_capacity(steps + 1);
        states.push(z0.clone());
        for k in 0..steps {
            let next = self.step(&states[k], h).map_err(|e| Error::StepFailed {
                step: k,
                source: Box::new(e),
            })?;
            states.push(next);
        }
        let times = (0..=steps).map(|k| k as f64 * h).collect();
        Trajectory::new(&self.system, times, states)
    }
}

/// `‖Dφ Π(z) Dφᵀ − Π(φ(z))‖_F` for `φ = map.step(·, h)`, with `Dφ` by central
/// differences of width `fd_step`. Vanishes when `φ` is a Poisson map at `z`.
pub fn poisson_defect(map: &StepMap, z: &DVector<f64>, h: f64, fd_step: f64) -> Result<f64> {
    let sys = map.system();
    let image = map.step(z, h)?;
    let d = jacobian_fd(|x| map.step(x, h), z, fd_step)?;
    let pushed = &d * sys.bivector(z) * d.transpose();
    Ok((pushed - sys.bivector(&image)).norm())
}

/// `max_k |f(z_k) − f(z_0)|` along a trajectory.
pub fn first_integral_drift(traj: &Trajectory, f: impl Fn(&DVector<f64>) -> f64) -> f64 {
    let states = traj.states();
    let Some(first) = states.first() else {
        return 0.0;
    };
    let f0 = f(first);
    states.iter().map(|z| (f(z) - f0).abs()).fold(0.0, f64::max)
}
