//! so(3), so(3)* and SO(3).
//!
//! Algebra and coalgebra points are stored as 3-vectors; the skew-matrix form is
//! produced on demand by [`hat`]. Conventions:
//!
//! * `hat(v) * w = v × w`, so the bracket on so(3) is the cross product.
//! * The coadjoint action is `Ad*_g μ = Rᵀ μ`, which makes
//!   `hat(Ad*_g μ) = Rᵀ hat(μ) R` hold verbatim and composes as a right action:
//!   `Ad*_{g2} Ad*_{g1} μ = Ad*_{g1 g2} μ`.
//! * `ad*_ξ μ = μ × ξ`, the transpose of `ad_ξ = ξ × ·` under the dot-product pairing.
//! * [`dexpinv`] inverts the right-trivialised tangent of `exp`:
//!   `d/dε exp(ξ + εδ)|₀ · exp(ξ)ᵀ = hat(dexp_ξ δ)`.

use std::f64::consts::PI;
use std::ops::Mul;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// Below this angle the Rodrigues and `dexpinv` coefficients switch to Taylor branches.
pub const SMALL_ANGLE: f64 = 1e-4;

/// Tolerance used by [`GroupElement::new`] for `‖RᵀR − I‖_F` and `|det R − 1|`.
pub const GROUP_TOLERANCE: f64 = 1e-12;

/// Tolerance on `‖M + Mᵀ‖_F` accepted by [`vee`].
pub const SKEW_TOLERANCE: f64 = 1e-10;

/// Element of so(3) (angular velocity).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraPoint(pub Vector3<f64>);

/// Element of so(3)* (angular momentum).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoalgebraPoint(pub Vector3<f64>);

impl AlgebraPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        AlgebraPoint(Vector3::new(x, y, z))
    }

    pub fn zero() -> Self {
        AlgebraPoint(Vector3::zeros())
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn hat(&self) -> Matrix3<f64> {
        hat(&self.0)
    }
}

impl CoalgebraPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        CoalgebraPoint(Vector3::new(x, y, z))
    }

    pub fn zero() -> Self {
        CoalgebraPoint(Vector3::zeros())
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// Duality pairing `⟨μ, ξ⟩`.
    pub fn pair(&self, xi: &AlgebraPoint) -> f64 {
        self.0.dot(&xi.0)
    }

    pub fn hat(&self) -> Matrix3<f64> {
        hat(&self.0)
    }
}

/// Rotation matrix in SO(3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement(Matrix3<f64>);

impl GroupElement {
    /// Wraps `m` after checking orthogonality and unit determinant.
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        let g = GroupElement(m);
        let orth = g.orthogonality_residual();
        let det = m.determinant();
        if !m.iter().all(|x| x.is_finite()) {
            return Err(Error::domain("non-finite rotation matrix"));
        }
        if orth > GROUP_TOLERANCE || (det - 1.0).abs() > GROUP_TOLERANCE {
            return Err(Error::domain(format!(
                "not a rotation: |RᵀR - I| = {orth:.3e}, det = {det}"
            )));
        }
        Ok(g)
    }

    pub fn identity() -> Self {
        GroupElement(Matrix3::identity())
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        GroupElement(self.0.transpose())
    }

    /// `‖RᵀR − I‖_F`.
    pub fn orthogonality_residual(&self) -> f64 {
        (self.0.transpose() * self.0 - Matrix3::identity()).norm()
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }

    pub fn act(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.0 * v
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;

    fn mul(self, rhs: GroupElement) -> GroupElement {
        GroupElement(self.0 * rhs.0)
    }
}

impl<'a> Mul<&'a GroupElement> for &'a GroupElement {
    type Output = GroupElement;

    fn mul(self, rhs: &GroupElement) -> GroupElement {
        GroupElement(self.0 * rhs.0)
    }
}

/// Cross-product matrix: `hat(v) * w = v × w`.
pub fn hat(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Inverse of [`hat`]. Rejects matrices whose symmetric part exceeds [`SKEW_TOLERANCE`].
pub fn vee(m: &Matrix3<f64>) -> Result<Vector3<f64>> {
    let sym = (m + m.transpose()).norm();
    if !sym.is_finite() || sym > SKEW_TOLERANCE {
        return Err(Error::domain(format!(
            "vee of non-skew matrix (|M + Mᵀ| = {sym:.3e})"
        )));
    }
    Ok(vee_unchecked(m))
}

/// Reads the skew part of `m` without validation.
pub(crate) fn vee_unchecked(m: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(
        0.5 * (m[(2, 1)] - m[(1, 2)]),
        0.5 * (m[(0, 2)] - m[(2, 0)]),
        0.5 * (m[(1, 0)] - m[(0, 1)]),
    )
}

/// Rodrigues coefficients `(sin θ / θ, (1 − cos θ) / θ²)`.
fn rodrigues_coefficients(theta: f64) -> (f64, f64) {
    if theta < SMALL_ANGLE {
        let t2 = theta * theta;
        let t4 = t2 * t2;
        (1.0 - t2 / 6.0 + t4 / 120.0, 0.5 - t2 / 24.0 + t4 / 720.0)
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / (theta * theta))
    }
}

/// Exponential map so(3) → SO(3) (Rodrigues formula).
pub fn exp_so3(xi: &AlgebraPoint) -> GroupElement {
    let theta = xi.norm();
    let (a, b) = rodrigues_coefficients(theta);
    let k = hat(&xi.0);
    GroupElement(Matrix3::identity() + k * a + k * k * b)
}

/// `c(θ) = (1 − (θ/2) cot(θ/2)) / θ²`, continuous at zero.
fn dexpinv_coefficient(theta: f64) -> f64 {
    if theta < SMALL_ANGLE {
        let t2 = theta * theta;
        1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0
    } else {
        let half = 0.5 * theta;
        (1.0 - half / half.tan()) / (theta * theta)
    }
}

fn check_injectivity(xi: &Vector3<f64>) -> Result<f64> {
    let theta = xi.norm();
    if !theta.is_finite() || theta >= 2.0 * PI {
        return Err(Error::ChartViolation {
            norm: theta,
            limit: 2.0 * PI,
        });
    }
    Ok(theta)
}

/// Inverse right-trivialised tangent of `exp`:
/// `η − ½ ξ×η + c(‖ξ‖) ξ×(ξ×η)`. Defined for `‖ξ‖ < 2π`.
pub fn dexpinv(xi: &AlgebraPoint, eta: &AlgebraPoint) -> Result<AlgebraPoint> {
    let theta = check_injectivity(&xi.0)?;
    let c = dexpinv_coefficient(theta);
    let x = &xi.0;
    let xe = x.cross(&eta.0);
    Ok(AlgebraPoint(eta.0 - xe * 0.5 + x.cross(&xe) * c))
}

/// Dual map `(dexpinv_ξ)*` acting on a covector.
///
/// The matrix of `dexpinv_ξ` is `I − ½ hat(ξ) + c hat(ξ)²`; its transpose equals the
/// matrix of `dexpinv_{−ξ}`.
pub fn dexpinv_star(xi: &AlgebraPoint, mu: &CoalgebraPoint) -> Result<CoalgebraPoint> {
    let neg = AlgebraPoint(-xi.0);
    dexpinv(&neg, &AlgebraPoint(mu.0)).map(|v| CoalgebraPoint(v.0))
}

/// Matrix of `dexpinv_ξ`.
pub fn dexpinv_matrix(xi: &AlgebraPoint) -> Result<Matrix3<f64>> {
    let theta = check_injectivity(&xi.0)?;
    let c = dexpinv_coefficient(theta);
    let k = hat(&xi.0);
    Ok(Matrix3::identity() - k * 0.5 + k * k * c)
}

/// Coadjoint action `Ad*_g μ = Rᵀ μ`.
pub fn coadjoint(g: &GroupElement, mu: &CoalgebraPoint) -> CoalgebraPoint {
    CoalgebraPoint(g.0.transpose() * mu.0)
}

/// Adjoint action `Ad_g ξ = R ξ`.
pub fn adjoint(g: &GroupElement, xi: &AlgebraPoint) -> AlgebraPoint {
    AlgebraPoint(g.0 * xi.0)
}

/// Infinitesimal coadjoint action `ad*_ξ μ = μ × ξ`.
pub fn ad_star(xi: &AlgebraPoint, mu: &CoalgebraPoint) -> CoalgebraPoint {
    CoalgebraPoint(mu.0.cross(&xi.0))
}
