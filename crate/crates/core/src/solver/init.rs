//! Seeded starting point for the alternating solver.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::model::{BeamformerStack, ChannelSet, EffectiveChannels, PhaseVector};
use crate::scalar::{Cx, Real};

/// Random phases and group-mean matched-filter beams scaled to full power.
///
/// `θ⁽⁰⁾_m = e^{jφ_m}` with `φ_m` uniform on `[0, 2π)`. Block `g` of `f⁽⁰⁾` is the
/// conjugate of the mean effective channel of group `g` under `θ⁽⁰⁾`, falling back
/// to a complex Gaussian draw when that mean vanishes; the stack is then scaled to
/// `‖f⁽⁰⁾‖ = √P_t`.
pub fn initialize<T: Real>(ch: &ChannelSet<T>, p_t: T, seed: u64) -> Result<(BeamformerStack<T>, PhaseVector<T>)> {
    if !(p_t > T::zero()) {
        return Err(invalid("p_t", "transmit power must be positive"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let tau = std::f64::consts::TAU;
    let phi: Vec<T> = (0..ch.tiles()).map(|_| T::lit(rng.random::<f64>() * tau)).collect();
    let theta = PhaseVector::from_angles(&phi);
    let z = EffectiveChannels::compute(ch, &theta)?;

    let n = ch.antennas();
    let mut f = BeamformerStack::zeros(n, ch.groups());
    for g in 0..ch.groups() {
        let range = ch.group_range(g);
        let inv = T::lit(range.len() as f64).recip();
        let block = f.block_mut(g);
        for u in range {
            for (b, zu) in block.iter_mut().zip(z.row(u)) {
                *b = *b + zu.conj() * inv;
            }
        }
        if block.iter().all(|b| b.norm_sqr() == T::zero()) {
            let scale = std::f64::consts::FRAC_1_SQRT_2;
            for b in block.iter_mut() {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                *b = Cx::new(T::lit(re * scale), T::lit(im * scale));
            }
        }
    }
    let s = p_t.sqrt() / f.norm();
    for g in 0..f.groups() {
        for b in f.block_mut(g) {
            *b = *b * s;
        }
    }
    Ok((f, theta))
}
