//! Lie-Poisson integrators built from a retraction (`τ = exp`) and the cotangent lift
//! of its chart.
//!
//! Hamiltonian variant, unknown `ν ∈ so(3)*`:
//!
//! ```text
//! μ_k     = a · (dexpinv_x)* ν,   x = b ∇H(ν)
//! g       = exp(x)
//! μ_{k+1} = Ad*_g μ_k
//! ```
//!
//! Lagrangian variant, unknown `ξ ∈ so(3)`: the same with `x = b ξ` and `ν = δl/δξ`.
//! `Half` scaling uses `a = b = h/2`; `Full` uses `a = 1, b = h`.

use nalgebra::{DVector, Vector3};

use crate::error::Result;
use crate::lie3::{coadjoint, dexpinv_star, exp_so3, AlgebraPoint, CoalgebraPoint};
use crate::models::{from_vec3, to_vec3, RigidBody};
use crate::poisson::StepMap;
use crate::solvers::{newton_fd, SolverSettings};

use super::check_chart_step;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RetractionVariant {
    Hamiltonian,
    Lagrangian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RetractionScaling {
    /// `h/2` on both the momentum prefactor and the chart argument.
    Half,
    /// Unit momentum prefactor, chart argument `h`.
    #[default]
    Full,
}

impl RetractionScaling {
    /// `(momentum prefactor, chart factor)`.
    fn factors(self, h: f64) -> (f64, f64) {
        match self {
            RetractionScaling::Half => (0.5 * h, 0.5 * h),
            RetractionScaling::Full => (1.0, h),
        }
    }
}

struct Retraction {
    body: RigidBody,
    variant: RetractionVariant,
    scaling: RetractionScaling,
}

impl Retraction {
    /// Chart argument and the covector paired with it, for the current unknown.
    fn chart(&self, unknown: &Vector3<f64>, chart_factor: f64) -> (Vector3<f64>, Vector3<f64>) {
        match self.variant {
            RetractionVariant::Hamiltonian => {
                (self.body.angular_velocity(unknown) * chart_factor, *unknown)
            }
            RetractionVariant::Lagrangian => {
                let nu = self.body.legendre(&AlgebraPoint(*unknown)).0;
                (unknown * chart_factor, nu)
            }
        }
    }

    fn step(&self, mu_k: &Vector3<f64>, h: f64, s: &SolverSettings) -> Result<Vector3<f64>> {
        check_chart_step(&self.body, mu_k, h)?;
        let (prefactor, chart_factor) = self.scaling.factors(h);

        // Explicit-Euler predictor expressed in the unknown's units.
        let euler = mu_k + self.body.vector_field(mu_k) * h;
        let nu0 = euler / prefactor;
        let predictor = match self.variant {
            RetractionVariant::Hamiltonian => nu0,
            RetractionVariant::Lagrangian => self.body.legendre_inverse(&CoalgebraPoint(nu0)).0,
        };

        let residual = |u: &DVector<f64>| -> Result<DVector<f64>> {
            let (x, nu) = self.chart(&to_vec3(u), chart_factor);
            let lifted = dexpinv_star(&AlgebraPoint(x), &CoalgebraPoint(nu))?;
            Ok(from_vec3(&(lifted.0 * prefactor - mu_k)))
        };
        let sol = newton_fd(residual, from_vec3(&predictor), s)?;
        let (x, _) = self.chart(&to_vec3(&sol.x), chart_factor);
        let g = exp_so3(&AlgebraPoint(x));
        Ok(coadjoint(&g, &CoalgebraPoint(*mu_k)).0)
    }
}

/// Retraction-based Lie-Poisson integrator for the rigid body.
pub fn retraction_lp_step(
    body: &RigidBody,
    variant: RetractionVariant,
    scaling: RetractionScaling,
) -> StepMap {
    let name = match variant {
        RetractionVariant::Hamiltonian => "retraction-h",
        RetractionVariant::Lagrangian => "retraction-l",
    };
    let scheme = Retraction {
        body: *body,
        variant,
        scaling,
    };
    StepMap::new(
        name,
        body.system(),
        SolverSettings::default(),
        move |z, h, s| scheme.step(&to_vec3(z), h, s).map(|v| from_vec3(&v)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn body() -> RigidBody {
        RigidBody::new(Vector3::new(1.0, 2.0, 3.0)).unwrap()
    }

    fn all_maps() -> Vec<StepMap> {
        let b = body();
        let mut maps = Vec::new();
        for variant in [
            RetractionVariant::Hamiltonian,
            RetractionVariant::Lagrangian,
        ] {
            for scaling in [RetractionScaling::Half, RetractionScaling::Full] {
                maps.push(retraction_lp_step(&b, variant, scaling));
            }
        }
        maps
    }

    #[test]
    fn zero_momentum_stays_zero() {
        for map in all_maps() {
            let z = DVector::zeros(3);
            assert_eq!(map.step(&z, 0.05).unwrap(), z);
        }
    }

    #[test]
    fn norm_is_preserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for map in all_maps() {
            for _ in 0..20 {
                let z = DVector::from_fn(3, |_, _| rng.gen_range(-1.5..1.5));
                let next = map.step(&z, 0.05).unwrap();
                assert!((next.norm() - z.norm()).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn principal_axis_is_a_discrete_equilibrium() {
        for map in all_maps() {
            let z = DVector::from_vec(vec![1.0, 0.0, 0.0]);
            let next = map.step(&z, 0.05).unwrap();
            assert!((next - &z).norm() <= 1e-10, "{}", map.name());
        }
    }

    #[test]
    fn variants_coincide_for_regular_lagrangian() {
        let b = body();
        let z = DVector::from_vec(vec![1.0, 0.5, -0.3]);
        for scaling in [RetractionScaling::Half, RetractionScaling::Full] {
            let h = retraction_lp_step(&b, RetractionVariant::Hamiltonian, scaling)
                .step(&z, 0.05)
                .unwrap();
            let l = retraction_lp_step(&b, RetractionVariant::Lagrangian, scaling)
                .step(&z, 0.05)
                .unwrap();
            assert!((h - l).norm() <= 1e-12);
        }
    }

    #[test]
    fn full_scaling_is_time_symmetric() {
        let map = retraction_lp_step(
            &body(),
            RetractionVariant::Hamiltonian,
            RetractionScaling::Full,
        );
        let z = DVector::from_vec(vec![1.0, 0.5, -0.3]);
        let forward = map.step(&z, 0.05).unwrap();
        let back = map.step(&forward, -0.05).unwrap();
        assert!((back - z).norm() <= 1e-12);
    }
}
