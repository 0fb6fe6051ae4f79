//! Implicit-equation solvers shared by every implicit step.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Jacobians with a condition estimate above this are treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    /// Residual norm accepted as converged.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Central-difference step for Newton Jacobians.
    pub fd_step: f64,
    /// Relaxation factor in (0, 1].
    pub damping: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            tolerance: 1e-12,
            max_iterations: 50,
            fd_step: 1e-7,
            damping: 1.0,
        }
    }
}

impl SolverSettings {
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::domain("solver tolerance must be positive"));
        }
        if self.max_iterations < 1 {
            return Err(Error::domain("max_iterations must be at least 1"));
        }
        if !(self.fd_step > 0.0) {
            return Err(Error::domain("fd_step must be positive"));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::domain("damping must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// Converged iterate with its bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub x: DVector<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Damped fixed-point iteration `x ← (1 − d) x + d g(x)` until `‖x − g(x)‖ ≤ tol`.
pub fn fixed_point<G>(mut g: G, x0: DVector<f64>, s: &SolverSettings) -> Result<Solution>
where
    G: FnMut(&DVector<f64>) -> Result<DVector<f64>>,
{
    s.validate()?;
    let mut x = x0;
    let mut residual = f64::INFINITY;
    for iterations in 0..=s.max_iterations {
        let gx = g(&x)?;
        residual = (&x - &gx).norm();
        if !residual.is_finite() {
            break;
        }
        if residual <= s.tolerance {
            return Ok(Solution {
                x,
                iterations,
                residual,
            });
        }
        if iterations == s.max_iterations {
            break;
        }
        x = if s.damping == 1.0 {
            gx
        } else {
            &x * (1.0 - s.damping) + gx * s.damping
        };
    }
    Err(Error::NonConvergence {
        iterations: s.max_iterations,
        residual,
    })
}

/// Central-difference Jacobian of `f` at `x`.
pub(crate) fn fd_jacobian<F>(f: &mut F, x: &DVector<f64>, step: f64) -> Result<DMatrix<f64>>
where
    F: FnMut(&DVector<f64>) -> Result<DVector<f64>>,
{
    let n = x.len();
    let mut jac: Option<DMatrix<f64>> = None;
    let mut probe = x.clone();
    for j in 0..n {
        let orig = probe[j];
        probe[j] = orig + step;
        let plus = f(&probe)?;
        probe[j] = orig - step;
        let minus = f(&probe)?;
        probe[j] = orig;
        let col = (plus - minus) / (2.0 * step);
        let m = jac.get_or_insert_with(|| DMatrix::zeros(col.len(), n));
        m.set_column(j, &col);
    }
    Ok(jac.unwrap_or_else(|| DMatrix::zeros(0, 0)))
}

/// Ratio of extreme singular values; infinite when the smallest vanishes.
pub(crate) fn condition_estimate(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0_f64, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 || !min.is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Newton iteration with a central-difference Jacobian until `‖F(x)‖ ≤ tol`.
pub fn newton_fd<F>(mut f: F, x0: DVector<f64>, s: &SolverSettings) -> Result<Solution>
where
    F: FnMut(&DVector<f64>) -> Result<DVector<f64>>,
{
    s.validate()?;
    let mut x = x0;
    let mut fx = f(&x)?;
    let mut residual = fx.norm();
    for iterations in 0..=s.max_iterations {
        if !residual.is_finite() {
            break;
        }
        if residual <= s.tolerance {
            return Ok(Solution {
                x,
                iterations,
                residual,
            });
        }
        if iterations == s.max_iterations {
            break;
        }
        let jac = fd_jacobian(&mut f, &x, s.fd_step)?;
        let condition = condition_estimate(&jac);
        if condition > MAX_CONDITION {
            return Err(Error::Singular { condition });
        }
        let delta = jac.lu().solve(&fx).ok_or(Error::Singular {
            condition: f64::INFINITY,
        })?;
        x -= delta * s.damping;
        fx = f(&x)?;
        residual = fx.norm();
    }
    Err(Error::NonConvergence {
        iterations: s.max_iterations,
        residual,
    })
}
