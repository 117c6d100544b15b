//! Euclidean projections onto the transmit-power ball and the unit-modulus torus.

use crate::model::{BeamformerStack, PhaseVector};
use crate::scalar::{norm, Cx, Real};

/// Scales `v` onto the ball of radius `radius` if it lies outside.
pub fn project_ball_in_place<T: Real>(v: &mut [Cx<T>], radius: T) {
    let n = norm(v);
    if n > radius {
        let s = radius / n;
        for x in v.iter_mut() {
            *x = *x * s;
        }
    }
}

/// `Π_F(f̂) = √P_t f̂ / max(‖f̂‖, √P_t)`.
pub fn project_power_ball<T: Real>(f_hat: &BeamformerStack<T>, p_t: T) -> BeamformerStack<T> {
    let mut out = f_hat.clone();
    let radius = p_t.sqrt();
    let n = out.norm();
    if n > radius {
        let s = radius / n;
        for g in 0..out.groups() {
            for x in out.block_mut(g) {
                *x = *x * s;
            }
        }
    }
    out
}

/// Entrywise `θ̂_m / |θ̂_m|`; a zero entry maps to `1 + 0j`.
pub fn project_unit_modulus_in_place<T: Real>(v: &mut [Cx<T>]) {
    for x in v.iter_mut() {
        let r = x.norm();
        *x = if r > T::zero() {
            *x / r
        } else {
            Cx::new(T::one(), T::zero())
        };
    }
}

pub fn project_unit_modulus<T: Real>(theta_hat: &[Cx<T>]) -> PhaseVector<T> {
    let mut v = theta_hat.to_vec();
    project_unit_modulus_in_place(&mut v);
    PhaseVector::new(v)
}
