//! Log-sum-exp smoothed sum rate and its closed-form complex gradients.
//!
//! The group minimum is replaced by `−(1/τ) ln Σ_k exp(−τ R_{k,g})`, which is a
//! lower bound within `ln(K_g)/τ` of the true minimum. Gradients follow the
//! conjugate-coordinate convention `∇ = ½(∂/∂Re + j ∂/∂Im)`, so a real-valued
//! objective changes by `2 Re(∇^H dx)` along `dx` and `x + α∇` is an ascent step.
//!
//! Everything here is assembled from the same cached quantities: the effective
//! channels `z_u`, the amplitudes `z_u f_j` and the per-user power sums held in
//! [`LinkState`]. Reductions run in a fixed sequential order, so results are
//! bitwise reproducible.

use crate::error::{invalid, Error, Result};
use crate::model::{BeamformerStack, ChannelSet, EffectiveChannels, LinkState, PhaseVector};
use crate::scalar::{all_finite, dot, Cx, Real};

/// Smoothing sharpness `τ > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingParam<T>(T);

impl<T: Real> SmoothingParam<T> {
    pub fn new(tau: T) -> Result<Self> {
        if tau > T::zero() && tau.is_finite() {
            Ok(Self(tau))
        } else {
            Err(invalid("tau", format!("must be finite and positive, got {tau}")))
        }
    }

    pub fn tau(self) -> T {
        self.0
    }
}

/// Gradients of the smoothed sum rate with respect to `f` and `θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientPair<T> {
    /// Length `N·G`, block `i` is `∇_{f_i}`.
    pub grad_f: Vec<Cx<T>>,
    /// Length `M`.
    pub grad_theta: Vec<Cx<T>>,
}

/// Smoothed group terms from flat per-user rates.
///
/// Each term is evaluated as `min_k R_k − ln Σ_k exp(−τ(R_k − min_k R_k)) / τ`,
/// which cannot overflow and reduces to the exact minimum for singleton groups.
pub fn smoothed_from_rates<T: Real>(ch: &ChannelSet<T>, rates: &[T], tau: SmoothingParam<T>) -> T {
    let tau = tau.tau();
    (0..ch.groups())
        .map(|g| {
            let r = &rates[ch.group_range(g)];
            let min = r.iter().copied().fold(T::infinity(), T::min);
            let s: T = r.iter().map(|&x| (-(tau * (x - min))).exp()).sum();
            min - s.ln() / tau
        })
        .sum()
}

/// Softmin weights `exp(−τR_{k,g}) / Σ_k exp(−τR_{k,g})`, flat in user order.
///
/// Within each group the weights are nonnegative and sum to one.
pub fn softmin_weights<T: Real>(ch: &ChannelSet<T>, rates: &[T], tau: SmoothingParam<T>) -> Vec<T> {
    let mut w = vec![T::zero(); rates.len()];
    softmin_weights_into(ch, rates, tau, &mut w);
    w
}

fn softmin_weights_into<T: Real>(ch: &ChannelSet<T>, rates: &[T], tau: SmoothingParam<T>, w: &mut [T]) {
    let tau = tau.tau();
    for g in 0..ch.groups() {
        let range = ch.group_range(g);
        let r = &rates[range.clone()];
        let min = r.iter().copied().fold(T::infinity(), T::min);
        let wg = &mut w[range];
        for (x, &rate) in wg.iter_mut().zip(r) {
            *x = (-(tau * (rate - min))).exp();
        }
        let s: T = wg.iter().copied().sum();
        for x in wg.iter_mut() {
            *x = *x / s;
        }
    }
}

/// Smoothed sum rate `R̃_sum(f, θ)`.
pub fn smoothed_sum_rate<T: Real>(
    ch: &ChannelSet<T>,
    f: &BeamformerStack<T>,
    theta: &PhaseVector<T>,
    tau: SmoothingParam<T>,
) -> Result<T> {
    let z = EffectiveChannels::compute(ch, theta)?;
    let state = LinkState::new(ch, &z, f)?;
    Ok(smoothed_from_rates(ch, state.rates(), tau))
}

/// `∇_{f_i} R_{k,i} = z^H (z f_i) / (1 + Σ_{g∈𝒢} |z f_g|²)` for user `k` of group `i`.
pub fn grad_user_rate_own<T: Real>(
    ch: &ChannelSet<T>,
    f: &BeamformerStack<T>,
    theta: &PhaseVector<T>,
    k: usize,
    i: usize,
) -> Result<Vec<Cx<T>>> {
    let u = ch.user_index(k, i)?;
    let (z, state) = single_user_state(ch, f, theta)?;
    let coeff = state.total_power(u).recip();
    Ok(scaled_conj(z.row(u), state.amplitude(u, i) * coeff))
}

/// `∇_{f_i} R_{k,ℓ}` for user `k` of group `ℓ ≠ i`:
/// `[(1 + Σ_g |z f_g|²)⁻¹ − (1 + Σ_{ȷ≠ℓ} |z f_ȷ|²)⁻¹] z^H (z f_i)`.
pub fn grad_user_rate_cross<T: Real>(
    ch: &ChannelSet<T>,
    f: &BeamformerStack<T>,
    theta: &PhaseVector<T>,
    k: usize,
    l: usize,
    i: usize,
) -> Result<Vec<Cx<T>>> {
    if l == i {
        return Err(invalid(
            "i",
            "cross gradient requires a group other than the user's own",
        ));
    }
    let u = ch.user_index(k, l)?;
    if i >= ch.groups() {
        return Err(Error::Index {
            context: "beamformer block",
            index: i,
            bound: ch.groups(),
        });
    }
    let (z, state) = single_user_state(ch, f, theta)?;
    let coeff = state.total_power(u).recip() - state.interference_power(u).recip();
    Ok(scaled_conj(z.row(u), state.amplitude(u, i) * coeff))
}

fn single_user_state<T: Real>(
    ch: &ChannelSet<T>,
    f: &BeamformerStack<T>,
    theta: &PhaseVector<T>,
) -> Result<(EffectiveChannels<T>, LinkState<T>)> {
    let z = EffectiveChannels::compute(ch, theta)?;
    let state = LinkState::new(ch, &z, f)?;
    Ok((z, state))
}

fn scaled_conj<T: Real>(z: &[Cx<T>], s: Cx<T>) -> Vec<Cx<T>> {
    z.iter().map(|c| c.conj() * s).collect()
}

/// `∇_θ |z_{k,g} f_ȷ|² = vec_d{ĥ^H (z f_ȷ) f_ȷ^H H_ts^H}`, evaluated as
/// `conj(ĥ) ⊙ (z f_ȷ) conj(H_ts f_ȷ)` without forming the `M × M` outer product.
pub fn grad_theta_quadratic<T: Real>(
    ch: &ChannelSet<T>,
    f: &BeamformerStack<T>,
    theta: &PhaseVector<T>,
    k: usize,
    g: usize,
    j: usize,
) -> Result<Vec<Cx<T>>> {
    let u = ch.user_index(k, g)?;
    if j >= ch.groups() {
        return Err(Error::Index {
            context: "beamformer block",
            index: j,
            bound: ch.groups(),
        });
    }
    let (_, state) = single_user_state(ch, f, theta)?;
    let hf = ch.h_ts().mul_vec(f.block(j));
    let a = state.amplitude(u, j);
    Ok(ch
        .irs(u)
        .iter()
        .zip(&hf)
        .map(|(h, t)| h.conj() * a * t.conj())
        .collect())
}

/// `∇_f R̃_sum` from cached channel state.
pub fn grad_f_from_state<T: Real>(
    ch: &ChannelSet<T>,
    z: &EffectiveChannels<T>,
    state: &LinkState<T>,
    tau: SmoothingParam<T>,
) -> Vec<Cx<T>> {
    let mut scratch = GradScratch::default();
    grad_f_into(ch, z, state, tau, &mut scratch);
    scratch.grad
}

/// Reusable buffers for the gradient assembly in the solver loop.
#[derive(Debug, Clone, Default)]
pub(crate) struct GradScratch<T> {
    pub(crate) grad: Vec<Cx<T>>,
    weights: Vec<T>,
    coeffs: Vec<Cx<T>>,
    reflected: Vec<Cx<T>>,
}

/// Writes `∇_f R̃_sum` into `scratch.grad`.
pub(crate) fn grad_f_into<T: Real>(
    ch: &ChannelSet<T>,
    z: &EffectiveChannels<T>,
    state: &LinkState<T>,
    tau: SmoothingParam<T>,
    scratch: &mut GradScratch<T>,
) {
    let n = ch.antennas();
    let groups = ch.groups();
    scratch.weights.resize(ch.users(), T::zero());
    softmin_weights_into(ch, state.rates(), tau, &mut scratch.weights);
    let grad = &mut scratch.grad;
    grad.clear();
    grad.resize(n * groups, Cx::new(T::zero(), T::zero()));
    for (u, &w) in scratch.weights.iter().enumerate() {
        let own = ch.group_of(u);
        let inv_total = state.total_power(u).recip();
        let cross = inv_total - state.interference_power(u).recip();
        let row = z.row(u);
        for i in 0..groups {
            let coeff = if i == own { inv_total } else { cross };
            let s = state.amplitude(u, i) * (coeff * w);
            for (gr, zc) in grad[i * n..(i + 1) * n].iter_mut().zip(row) {
                *gr = *gr + zc.conj() * s;
            }
        }
    }
}

/// `H_ts f_j` for every group, the per-tile part of the `θ`-gradient.
pub fn reflected_beams<T: Real>(ch: &ChannelSet<T>, f: &BeamformerStack<T>) -> Vec<Vec<Cx<T>>> {
    (0..ch.groups()).map(|j| ch.h_ts().mul_vec(f.block(j))).collect()
}

/// `∇_θ R̃_sum` from cached channel state and [`reflected_beams`].
pub fn grad_theta_from_state<T: Real>(
    ch: &ChannelSet<T>,
    state: &LinkState<T>,
    reflected: &[Vec<Cx<T>>],
    tau: SmoothingParam<T>,
) -> Vec<Cx<T>> {
    let mut scratch = GradScratch {
        reflected: (0..ch.tiles())
            .flat_map(|m| reflected.iter().map(move |hf| hf[m]))
            .collect(),
        ..GradScratch::default()
    };
    grad_theta_assemble(ch, state, tau, &mut scratch);
    scratch.grad
}

/// Writes `∇_θ R̃_sum` at beamformer `f` into `scratch.grad`.
pub(crate) fn grad_theta_into<T: Real>(
    ch: &ChannelSet<T>,
    f: &[Cx<T>],
    state: &LinkState<T>,
    tau: SmoothingParam<T>,
    scratch: &mut GradScratch<T>,
) {
    // reflected beams stored tile-major: entry m·G + j is (H_ts f_j)_m
    let n = ch.antennas();
    let groups = ch.groups();
    let h_ts = ch.h_ts();
    scratch.reflected.clear();
    for m in 0..ch.tiles() {
        let row = h_ts.row(m);
        scratch.reflected.extend(f.chunks_exact(n).map(|block| dot(row, block)));
    }
    debug_assert_eq!(scratch.reflected.len(), ch.tiles() * groups);
    grad_theta_assemble(ch, state, tau, scratch);
}

/// `Σ_u w_u Σ_j c_{u,j} conj(ĥ_u) ⊙ (z_u f_j) conj(H_ts f_j)` with reflected
/// beams stored tile-major in `scratch.reflected`.
fn grad_theta_assemble<T: Real>(
    ch: &ChannelSet<T>,
    state: &LinkState<T>,
    tau: SmoothingParam<T>,
    scratch: &mut GradScratch<T>,
) {
    let m = ch.tiles();
    let groups = ch.groups();
    scratch.weights.resize(ch.users(), T::zero());
    softmin_weights_into(ch, state.rates(), tau, &mut scratch.weights);
    scratch.coeffs.resize(groups, Cx::new(T::zero(), T::zero()));
    let grad = &mut scratch.grad;
    grad.clear();
    grad.resize(m, Cx::new(T::zero(), T::zero()));
    for (u, &w) in scratch.weights.iter().enumerate() {
        let own = ch.group_of(u);
        let inv_total = state.total_power(u).recip();
        let cross = inv_total - state.interference_power(u).recip();
        for (j, c) in scratch.coeffs.iter_mut().enumerate() {
            let coeff = if j == own { inv_total } else { cross };
            *c = state.amplitude(u, j) * (coeff * w);
        }
        let tiles = scratch.reflected.chunks_exact(groups);
        for ((gr, h), hf) in grad.iter_mut().zip(ch.irs(u)).zip(tiles) {
            let mut acc = Cx::new(T::zero(), T::zero());
            for (c, r) in scratch.coeffs.iter().zip(hf) {
                acc = acc + c * r.conj();
            }
            *gr = *gr + h.conj() * acc;
        }
    }
}

pub fn grad_f_smoothed<T: Real>(
    ch: &ChannelSet<T>,
    f: &BeamformerStack<T>,
    theta: &PhaseVector<T>,
    tau: SmoothingParam<T>,
) -> Result<Vec<Cx<T>>> {
    let (z, state) = single_user_state(ch, f, theta)?;
    finite(grad_f_from_state(ch, &z, &state, tau), "f-gradient")
}

/// `∇_θ R̃_sum(f, θ)`.
pub fn grad_theta_smoothed<T: Real>(
    ch: &ChannelSet<T>,
    f: &BeamformerStack<T>,
    theta: &PhaseVector<T>,
    tau: SmoothingParam<T>,
) -> Result<Vec<Cx<T>>> {
    let (_, state) = single_user_state(ch, f, theta)?;
    let reflected = reflected_beams(ch, f);
    finite(grad_theta_from_state(ch, &state, &reflected, tau), "θ-gradient")
}

/// Both gradients at one point, sharing a single channel evaluation.
pub fn gradients<T: Real>(
    ch: &ChannelSet<T>,
    f: &BeamformerStack<T>,
    theta: &PhaseVector<T>,
    tau: SmoothingParam<T>,
) -> Result<GradientPair<T>> {
    let (z, state) = single_user_state(ch, f, theta)?;
    let reflected = reflected_beams(ch, f);
    Ok(GradientPair {
        grad_f: finite(grad_f_from_state(ch, &z, &state, tau), "f-gradient")?,
        grad_theta: finite(grad_theta_from_state(ch, &state, &reflected, tau), "θ-gradient")?,
    })
}

fn finite<T: Real>(v: Vec<Cx<T>>, what: &'static str) -> Result<Vec<Cx<T>>> {
    if all_finite(&v) {
        Ok(v)
    } else {
        Err(Error::NonFinite(what))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{rate_breakdown, CMatrix};

    fn c(re: f64, im: f64) -> Cx<f64> {
        Cx::new(re, im)
    }

    fn tau(t: f64) -> SmoothingParam<f64> {
        SmoothingParam::new(t).unwrap()
    }

    #[test]
    fn tau_must_be_positive() {
        assert!(SmoothingParam::new(0.0).is_err());
        assert!(SmoothingParam::new(-1.0).is_err());
        assert!(SmoothingParam::new(f64::NAN).is_err());
    }

    #[test]
    fn scalar_own_gradient() {
        let ch = ChannelSet::new(CMatrix::zeros(0, 1), vec![vec![c(1.0, 0.0)]], vec![vec![]], vec![1]).unwrap();
        let f = BeamformerStack::new(1, vec![c(1.0, 0.0)]).unwrap();
        let g = grad_user_rate_own(&ch, &f, &PhaseVector::ones(0), 0, 0).unwrap();
        assert_eq!(g, vec![c(0.5, 0.0)]);
    }

    #[test]
    fn equal_rates_shift_by_log_group_size() {
        // three identical users in one group
        let ch = ChannelSet::new(
            CMatrix::zeros(0, 1),
            vec![vec![c(0.8, 0.1)]; 3],
            vec![vec![]; 3],
            vec![3],
        )
        .unwrap();
        let f = BeamformerStack::new(1, vec![c(1.5, -0.2)]).unwrap();
        let theta = PhaseVector::ones(0);
        let r = rate_breakdown(&ch, &f, &theta).unwrap().sum_rate;
        let s = smoothed_sum_rate(&ch, &f, &theta, tau(50.0)).unwrap();
        assert!((s - (r - 3f64.ln() / 50.0)).abs() < 1e-14);
    }

    #[test]
    fn huge_tau_rates_do_not_overflow() {
        let ch = ChannelSet::new(
            CMatrix::zeros(0, 1),
            vec![vec![c(1e3, 0.0)], vec![c(2e3, 0.0)]],
            vec![vec![]; 2],
            vec![2],
        )
        .unwrap();
        let f = BeamformerStack::new(1, vec![c(10.0, 0.0)]).unwrap();
        let theta = PhaseVector::ones(0);
        let s = smoothed_sum_rate(&ch, &f, &theta, tau(1e3)).unwrap();
        let r = rate_breakdown(&ch, &f, &theta).unwrap().sum_rate;
        assert!(s.is_finite());
        assert!(s <= r && s >= r - 2f64.ln() / 1e3);
        let g = grad_f_smoothed(&ch, &f, &theta, tau(1e3)).unwrap();
        assert!(all_finite(&g));
    }

    #[test]
    fn cross_gradient_requires_distinct_groups() {
        let ch = ChannelSet::new(
            CMatrix::zeros(0, 1),
            vec![vec![c(1.0, 0.0)], vec![c(1.0, 0.0)]],
            vec![vec![]; 2],
            vec![1, 1],
        )
        .unwrap();
        let f = BeamformerStack::zeros(1, 2);
        assert!(grad_user_rate_cross(&ch, &f, &PhaseVector::ones(0), 0, 1, 1).is_err());
        assert!(grad_user_rate_cross(&ch, &f, &PhaseVector::ones(0), 0, 1, 2).is_err());
    }
}
