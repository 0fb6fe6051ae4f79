//! Discrete Euler-Poincaré / Lie-Poisson schemes.
//!
//! With the trace-form Lagrangian the stationarity condition on consecutive group
//! steps is `J g_k + J g_{k+1}ᵀ = g_kᵀ J + g_{k+1} J`, and the momentum read-out
//! `μ̂_k = J g_kᵀ − g_k J` then satisfies `μ̂_{k+1} = g_kᵀ μ̂_k g_k`. Near the identity
//! `μ̂_k ≈ −h hat(𝕀Ω)`, which fixes the scaling between the skew read-out and the
//! angular-momentum vector used by [`discrete_ep_rigid_step`].

use nalgebra::{DVector, Matrix3, Vector3};

use crate::error::Result;
use crate::lie3::{
    coadjoint, exp_so3, hat, vee_unchecked, AlgebraPoint, CoalgebraPoint, GroupElement,
};
use crate::models::{from_vec3, to_vec3, RigidBody};
use crate::poisson::StepMap;
use crate::solvers::{newton_fd, SolverSettings};

use super::check_chart_step;

/// Moser-Veselov type discretisation of the rigid body on SO(3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteRigidBody {
    body: RigidBody,
    j: Matrix3<f64>,
}

impl DiscreteRigidBody {
    pub fn new(body: RigidBody) -> Self {
        DiscreteRigidBody {
            body,
            j: body.trace_form_j(),
        }
    }

    pub fn body(&self) -> &RigidBody {
        &self.body
    }

    /// Skew momentum read-out `J gᵀ − g J`.
    pub fn momentum(&self, g: &GroupElement) -> Matrix3<f64> {
        let m = g.matrix();
        self.j * m.transpose() - m * self.j
    }

    /// `vee(J g_k + J g_{k+1}ᵀ − g_kᵀ J − g_{k+1} J)`; zero on solutions.
    pub fn ep_residual(&self, gk: &GroupElement, gk1: &GroupElement) -> Vector3<f64> {
        let (a, b) = (gk.matrix(), gk1.matrix());
        let r = self.j * a + self.j * b.transpose() - a.transpose() * self.j - b * self.j;
        vee_unchecked(&r)
    }

    /// Solves the discrete Euler-Poincaré equation for `g_{k+1} = g_k exp(η)`,
    /// starting Newton from `η = 0`.
    pub fn advance(&self, gk: &GroupElement, s: &SolverSettings) -> Result<GroupElement> {
        let residual = |eta: &DVector<f64>| {
            let next = gk * &exp_so3(&AlgebraPoint(to_vec3(eta)));
            Ok(from_vec3(&self.ep_residual(gk, &next)))
        };
        let sol = newton_fd(residual, DVector::zeros(3), s)?;
        Ok(gk * &exp_so3(&AlgebraPoint(to_vec3(&sol.x))))
    }

    /// Inverts the discrete Legendre map: finds `g = exp(η)` with `J gᵀ − g J = target`.
    pub fn solve_momentum(
        &self,
        target: &Matrix3<f64>,
        predictor: Vector3<f64>,
        s: &SolverSettings,
    ) -> Result<GroupElement> {
        let residual = |eta: &DVector<f64>| {
            let g = exp_so3(&AlgebraPoint(to_vec3(eta)));
            Ok(from_vec3(&vee_unchecked(&(self.momentum(&g) - target))))
        };
        let sol = newton_fd(residual, from_vec3(&predictor), s)?;
        Ok(exp_so3(&AlgebraPoint(to_vec3(&sol.x))))
    }

    /// Group step `g_k` generated by angular momentum `μ` at step size `h`.
    pub fn group_step(
        &self,
        mu: &Vector3<f64>,
        h: f64,
        s: &SolverSettings,
    ) -> Result<GroupElement> {
        check_chart_step(&self.body, mu, h)?;
        let predictor = self.body.angular_velocity(mu) * h;
        self.solve_momentum(&(hat(mu) * -h), predictor, s)
    }

    /// Group sequence `g_0, …, g_{n}` from the discrete Euler-Poincaré recursion, with
    /// `g_0` generated by `μ_0`.
    pub fn ep_trajectory(
        &self,
        mu0: &Vector3<f64>,
        h: f64,
        steps: usize,
        s: &SolverSettings,
    ) -> Result<Vec<GroupElement>> {
        let mut gs = Vec::with_capacity(steps + 1);
        gs.push(self.group_step(mu0, h, s)?);
        for k in 0..steps {
            let next = self.advance(&gs[k], s)?;
            gs.push(next);
        }
        Ok(gs)
    }
}

/// Generic discrete Lie-Poisson carrier `μ_{k+1} = Ad*_{g(μ_k, h)} μ_k` on the rigid body.
pub fn discrete_lp_step<G>(body: &RigidBody, name: &str, g_of_mu: G) -> StepMap
where
    G: Fn(&CoalgebraPoint, f64, &SolverSettings) -> Result<GroupElement> + Send + Sync + 'static,
{
    StepMap::new(
        name,
        body.system(),
        SolverSettings::default(),
        move |z, h, s| {
            let mu = CoalgebraPoint(to_vec3(z));
            let g = g_of_mu(&mu, h, s)?;
            Ok(from_vec3(&coadjoint(&g, &mu).0))
        },
    )
}

/// Explicit Lie-Poisson Euler: `g = exp(h ∇H(μ_k))`.
pub fn lie_euler_step(body: &RigidBody) -> StepMap {
    let b = *body;
    discrete_lp_step(body, "dlp", move |mu, h, _| {
        check_chart_step(&b, &mu.0, h)?;
        Ok(exp_so3(&AlgebraPoint(b.angular_velocity(&mu.0) * h)))
    })
}

/// Discrete rigid body on so(3)*: `g_k` solves `J g_kᵀ − g_k J = −h hat(μ_k)`, then
/// `μ_{k+1} = g_kᵀ μ_k`.
pub fn discrete_ep_rigid_step(body: &RigidBody) -> StepMap {
    let drb = DiscreteRigidBody::new(*body);
    discrete_lp_step(body, "dep-rigid", move |mu, h, s| {
        drb.group_step(&mu.0, h, s)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie3::exp_so3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn body() -> RigidBody {
        RigidBody::new(Vector3::new(1.0, 2.0, 3.0)).unwrap()
    }

    #[test]
    fn identity_is_admissible() {
        let drb = DiscreteRigidBody::new(body());
        let e = GroupElement::identity();
        assert_eq!(drb.ep_residual(&e, &e), Vector3::zeros());
        assert_eq!(drb.momentum(&e), Matrix3::zeros());
        let next = drb.advance(&e, &SolverSettings::default()).unwrap();
        assert!((next.matrix() - Matrix3::identity()).norm() <= 1e-12);
    }

    #[test]
    fn steady_spin_about_principal_axis() {
        let drb = DiscreteRigidBody::new(body());
        let g = exp_so3(&AlgebraPoint::new(0.0, 0.0, 0.07));
        let m = drb.momentum(&g);
        // Read-out aligned with e₃ and invariant under conjugation by g.
        let v = vee_unchecked(&m);
        assert!(v.x.abs() <= 1e-15 && v.y.abs() <= 1e-15 && v.z.abs() > 0.0);
        assert!((g.matrix().transpose() * m * g.matrix() - m).norm() <= 1e-15);
        let next = drb.advance(&g, &SolverSettings::default()).unwrap();
        assert!(drb.ep_residual(&g, &next).norm() <= 1e-10);
        assert!((next.matrix() - g.matrix()).norm() <= 1e-10);
    }

    #[test]
    fn newton_converges_quickly_from_predictor() {
        let drb = DiscreteRigidBody::new(body());
        let s = SolverSettings::default();
        let g0 = drb
            .group_step(&Vector3::new(1.0, 0.5, -0.3), 0.05, &s)
            .unwrap();
        let gk = g0;
        let residual = |eta: &DVector<f64>| {
            let next = gk * exp_so3(&AlgebraPoint(to_vec3(eta)));
            Ok(from_vec3(&drb.ep_residual(&gk, &next)))
        };
        let sol = newton_fd(residual, DVector::zeros(3), &s).unwrap();
        assert!(sol.iterations <= 8);
    }

    #[test]
    fn readout_frobenius_norm_is_conserved() {
        let drb = DiscreteRigidBody::new(body());
        let s = SolverSettings::default();
        let gs = drb
            .ep_trajectory(&Vector3::new(1.0, 0.5, -0.3), 0.05, 200, &s)
            .unwrap();
        let n0 = drb.momentum(&gs[0]).norm();
        for (k, pair) in gs.windows(2).enumerate() {
            let (gk, gk1) = (&pair[0], &pair[1]);
            assert!((drb.momentum(gk).norm() - n0).abs() <= 1e-12, "step {k}");
            let lp = gk.matrix().transpose() * drb.momentum(gk) * gk.matrix();
            assert!((drb.momentum(gk1) - lp).norm() <= 1e-10);
        }
    }

    #[test]
    fn readout_scaling_matches_angular_momentum() {
        let drb = DiscreteRigidBody::new(body());
        let mu = Vector3::new(1.0, 0.5, -0.3);
        let h = 0.05;
        let g = drb.group_step(&mu, h, &SolverSettings::default()).unwrap();
        assert!((drb.momentum(&g) + hat(&mu) * h).norm() <= 1e-12);
    }

    #[test]
    fn lp_identity_and_isometry() {
        let b = body();
        let id = discrete_lp_step(&b, "id", |_, _, _| Ok(GroupElement::identity()));
        let z = from_vec3(&Vector3::new(0.3, -1.0, 2.0));
        assert_eq!(id.step(&z, 0.1).unwrap(), z);
        for map in [lie_euler_step(&b), discrete_ep_rigid_step(&b)] {
            let next = map.step(&z, 0.1).unwrap();
            assert!((next.norm() - z.norm()).abs() <= 1e-14);
        }
    }

    #[test]
    fn lp_steps_compose_to_ordered_product() {
        let b = body();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let gs: Vec<GroupElement> = (0..5)
            .map(|_| {
                exp_so3(&AlgebraPoint::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                ))
            })
            .collect();
        let schedule = gs.clone();
        let counter = std::sync::atomic::AtomicUsize::new(0);
        let map = discrete_lp_step(&b, "scheduled", move |_, _, _| {
            let k = counter.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
            Ok(schedule[k])
        });
        let mu0 = Vector3::new(0.4, -0.2, 1.1);
        let mut z = from_vec3(&mu0);
        for _ in 0..5 {
            z = map.step(&z, 0.1).unwrap();
        }
        let product = gs.iter().fold(GroupElement::identity(), |acc, g| acc * *g);
        let direct = coadjoint(&product, &CoalgebraPoint(mu0));
        assert!((to_vec3(&z) - direct.0).norm() <= 1e-12);
    }

    #[test]
    fn chart_guard_rejects_large_steps() {
        let b = body();
        let z = from_vec3(&Vector3::new(10.0, 0.0, 0.0));
        assert!(discrete_ep_rigid_step(&b).step(&z, 0.5).is_err());
    }
}
