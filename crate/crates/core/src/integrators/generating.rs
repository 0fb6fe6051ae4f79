//! Lie-Poisson maps from truncated solutions of the Hamilton-Jacobi equation on T*SO(3).
//!
//! Work in the exponential chart `g = exp(x)` with fibre coordinate `p`, so that the
//! identity section is `{x = 0}`. A generating function `S(t, p)` defines the
//! Lagrangian submanifold `x = ∂S/∂p`, and in these coordinates
//!
//! ```text
//! J_R(x, p) = (dexpinv_x)* p,   J_L(x, p) = dexpinv_x p = Ad*_{exp x} J_R(x, p).
//! ```
//!
//! The induced map solves `J_R(∂S/∂p, p) = μ_k` for `p` and returns
//! `μ_{k+1} = J_L(∂S/∂p, p)`. The Hamilton-Jacobi equation
//! `∂S/∂t = H(J_L(∂S/∂p, p))` with `S(0, ·) = 0` is expanded as
//! `S = Σ tⁱ/i! Sᵢ(p)`; differentiating in `t` at `t = 0` gives
//!
//! ```text
//! S₀ = 0
//! S₁ = H(p)
//! S₂ = ∂_x H(J_L(x, p))|_{x=0} · ∂S₁/∂p = ∇H(p) · (½ p × ∇H(p))
//! ```
//!
//! `S₂` is a triple product with a repeated factor and vanishes identically on so(3)*,
//! so the order-1 and order-2 truncations induce the same map; that map is symmetric
//! in `h` and therefore second-order accurate.

use nalgebra::{DVector, Vector3};

use crate::error::{Error, Result};
use crate::lie3::{dexpinv, dexpinv_star, AlgebraPoint, CoalgebraPoint};
use crate::models::{from_vec3, to_vec3, RigidBody};
use crate::poisson::{jacobian_fd, StepMap};
use crate::solvers::{newton_fd, SolverSettings, MAX_CONDITION};

use super::check_chart_step;

/// Central-difference step for `∂S₂/∂p`.
const SERIES_FD_STEP: f64 = 1e-5;

/// Truncated Taylor series of the generating function in `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratingSeries {
    body: RigidBody,
    order: usize,
}

impl GeneratingSeries {
    pub fn new(body: RigidBody, order: usize) -> Result<Self> {
        if order > 2 {
            return Err(Error::domain(format!(
                "generating series implemented up to order 2, got {order}"
            )));
        }
        Ok(GeneratingSeries { body, order })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn s2(&self, p: &Vector3<f64>) -> f64 {
        let w = self.body.angular_velocity(p);
        0.5 * w.dot(&p.cross(&w))
    }

    /// Coefficients `[S₀(p), S₁(p), S₂(p)]`.
    pub fn coefficients(&self, p: &Vector3<f64>) -> [f64; 3] {
        [0.0, self.body.energy(p), self.s2(p)]
    }

    /// `Sᵏ(t, p) = Σ_{i≤k} Sᵢ(p) tⁱ/i!`.
    pub fn value(&self, t: f64, p: &Vector3<f64>) -> f64 {
        let c = self.coefficients(p);
        let mut sum = 0.0;
        let mut factor = 1.0;
        for (i, ci) in c.iter().enumerate().take(self.order + 1) {
            if i > 0 {
                factor *= t / i as f64;
            }
            sum += ci * factor;
        }
        sum
    }

    /// Chart point `x = ∂Sᵏ/∂p (t, p)`.
    pub fn chart_point(&self, t: f64, p: &Vector3<f64>) -> Vector3<f64> {
        let mut x = Vector3::zeros();
        if self.order >= 1 {
            x += self.body.angular_velocity(p) * t;
        }
        if self.order >= 2 {
            let mut grad = Vector3::zeros();
            for j in 0..3 {
                let mut e = Vector3::zeros();
                e[j] = SERIES_FD_STEP;
                grad[j] = (self.s2(&(p + e)) - self.s2(&(p - e))) / (2.0 * SERIES_FD_STEP);
            }
            x += grad * (0.5 * t * t);
        }
        x
    }

    /// `J_R(∂Sᵏ/∂p, p)`.
    pub fn right_momentum(&self, t: f64, p: &Vector3<f64>) -> Result<Vector3<f64>> {
        let x = self.chart_point(t, p);
        Ok(dexpinv_star(&AlgebraPoint(x), &CoalgebraPoint(*p))?.0)
    }

    /// `J_L(∂Sᵏ/∂p, p)`.
    pub fn left_momentum(&self, t: f64, p: &Vector3<f64>) -> Result<Vector3<f64>> {
        let x = self.chart_point(t, p);
        Ok(dexpinv(&AlgebraPoint(x), &AlgebraPoint(*p))?.0)
    }

    /// Condition estimate of `∂J_R/∂p`; the implicit map is well defined where finite.
    pub fn nondegeneracy(&self, t: f64, p: &Vector3<f64>) -> Result<f64> {
        let jac = jacobian_fd(
            |q| self.right_momentum(t, &to_vec3(q)).map(|v| from_vec3(&v)),
            &from_vec3(p),
            SERIES_FD_STEP,
        )?;
        Ok(crate::solvers::condition_estimate(&jac))
    }

    /// One step `μ_k ↦ μ_{k+1}` of the induced map.
    pub fn step(&self, mu: &Vector3<f64>, h: f64, s: &SolverSettings) -> Result<Vector3<f64>> {
        if self.order == 0 {
            return Ok(*mu);
        }
        check_chart_step(&self.body, mu, h)?;
        let predictor = mu + self.body.vector_field(mu) * h;
        let residual = |p: &DVector<f64>| {
            self.right_momentum(h, &to_vec3(p))
                .map(|jr| from_vec3(&(jr - mu)))
        };
        let sol = newton_fd(residual, from_vec3(&predictor), s)?;
        let p = to_vec3(&sol.x);
        let condition = self.nondegeneracy(h, &p)?;
        if condition > MAX_CONDITION {
            return Err(Error::Singular { condition });
        }
        self.left_momentum(h, &p)
    }
}

/// Generating-function integrator of truncation order `order ∈ {0, 1, 2}`.
pub fn hj_generating_step(body: &RigidBody, order: usize) -> Result<StepMap> {
    let series = GeneratingSeries::new(*body, order)?;
    let name = format!("hj{order}");
    Ok(StepMap::new(
        name,
        body.system(),
        SolverSettings::default(),
        move |z, h, s| series.step(&to_vec3(z), h, s).map(|v| from_vec3(&v)),
    ))
}
