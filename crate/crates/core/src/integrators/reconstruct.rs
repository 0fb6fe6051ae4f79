use crate::lie3::{exp_so3, AlgebraPoint, GroupElement};

/// Attitude reconstruction `g_{k+1} = g_k exp(h ξ_k)` from body velocities.
pub fn reconstruct(xi_path: &[AlgebraPoint], g0: GroupElement, h: f64) -> Vec<GroupElement> {
    let mut out = Vec::with_capacity(xi_path.len() + 1);
    out.push(g0);
    for (k, xi) in xi_path.iter().enumerate() {
        let next = out[k] * exp_so3(&AlgebraPoint(xi.0 * h));
        out.push(next);
    }
    out
}
