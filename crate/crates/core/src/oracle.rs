//! Independent verification machinery.
//!
//! Nothing in here calls into the rate or gradient code it is meant to check:
//! rates are recomputed with naive scalar loops and gradients are estimated by
//! central finite differences of an arbitrary real functional.

use crate::error::{check_len, invalid, Error, Result};
use crate::model::{BeamformerStack, ChannelSet, PhaseVector, RateBreakdown};
use crate::scalar::{Cx, Real};

/// Finite-difference step `1e-6·(1 + ‖x‖)`.
pub fn default_step<T: Real>(x: &[Cx<T>]) -> T {
    let n: T = x.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
    T::lit(1e-6) * (T::one() + n)
}

/// Central-difference estimate of `∇ = ½(∂/∂Re + j ∂/∂Im)` of a real functional.
pub fn fd_gradient<T: Real>(mut objective: impl FnMut(&[Cx<T>]) -> T, x: &[Cx<T>], h: T) -> Result<Vec<Cx<T>>> {
    if !(h > T::zero()) {
        return Err(invalid("h", "finite-difference step must be positive"));
    }
    let two_h = h + h;
    let half = T::lit(0.5);
    let mut probe = x.to_vec();
    let mut eval = |probe: &mut Vec<Cx<T>>, m: usize, d: Cx<T>| -> Result<T> {
        let orig = probe[m];
        probe[m] = orig + d;
        let v = objective(probe);
        probe[m] = orig;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite("finite-difference probe"))
        }
    };
    let mut grad = Vec::with_capacity(x.len());
    for m in 0..x.len() {
        let re = Cx::new(h, T::zero());
        let im = Cx::new(T::zero(), h);
        let d_re = (eval(&mut probe, m, re)? - eval(&mut probe, m, -re)?) / two_h;
        let d_im = (eval(&mut probe, m, im)? - eval(&mut probe, m, -im)?) / two_h;
        grad.push(Cx::new(half * d_re, half * d_im));
    }
    Ok(grad)
}

/// `‖reference − candidate‖ / max(1e-12, ‖reference‖)`.
pub fn relative_error<T: Real>(reference: &[Cx<T>], candidate: &[Cx<T>]) -> T {
    let diff: T = reference
        .iter()
        .zip(candidate)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<T>()
        .sqrt();
    let scale: T = reference.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
    diff / scale.max(T::lit(1e-12))
}

/// Rates recomputed from scratch with explicit loops over antennas and tiles.
pub fn brute_min_group_rate<T: Real>(
    ch: &ChannelSet<T>,
    f: &BeamformerStack<T>,
    theta: &PhaseVector<T>,
) -> Result<RateBreakdown<T>> {
    let n_ant = ch.antennas();
    let n_tiles = ch.tiles();
    let groups = ch.groups();
    check_len("beamformer groups", groups, f.groups())?;
    check_len("beamformer block length", n_ant, f.antennas())?;
    check_len("phase vector", n_tiles, theta.len())?;
    let h_ts = ch.h_ts();
    let th = theta.as_slice();
    let fs = f.as_slice();

    let mut per_user = Vec::with_capacity(groups);
    let mut per_group = Vec::with_capacity(groups);
    let mut sum_rate = T::zero();
    let mut u = 0;
    for (g, &size) in ch.group_sizes().iter().enumerate() {
        let mut rates = Vec::with_capacity(size);
        for _ in 0..size {
            let direct = ch.direct(u);
            let irs = ch.irs(u);
            let mut powers = vec![T::zero(); groups];
            for (j, p) in powers.iter_mut().enumerate() {
                let mut amp_re = T::zero();
                let mut amp_im = T::zero();
                for n in 0..n_ant {
                    let mut z_re = direct[n].re;
                    let mut z_im = direct[n].im;
                    for m in 0..n_tiles {
                        // ĥ_m θ_m H[m, n]
                        let a = irs[m];
                        let t = th[m];
                        let b = h_ts.get(m, n);
                        let at_re = a.re * t.re - a.im * t.im;
                        let at_im = a.re * t.im + a.im * t.re;
                        z_re = z_re + at_re * b.re - at_im * b.im;
                        z_im = z_im + at_re * b.im + at_im * b.re;
                    }
                    let fv = fs[j * n_ant + n];
                    amp_re = amp_re + z_re * fv.re - z_im * fv.im;
                    amp_im = amp_im + z_re * fv.im + z_im * fv.re;
                }
                *p = amp_re * amp_re + amp_im * amp_im;
            }
            let mut noise = T::one();
            for (j, p) in powers.iter().enumerate() {
                if j != g {
                    noise = noise + *p;
                }
            }
            rates.push((T::one() + powers[g] / noise).ln());
            u += 1;
        }
        let mut min = rates[0];
        for &r in &rates[1..] {
            if r < min {
                min = r;
            }
        }
        per_group.push(min);
        sum_rate = sum_rate + min;
        per_user.push(rates);
    }
    Ok(RateBreakdown {
        per_user,
        per_group,
        sum_rate,
    })
}

/// Smoothing gaps `(ℛ_sum − R̃_sum, Σ_g ln(K_g)/τ − (ℛ_sum − R̃_sum))`.
///
/// Each group's gap must lie in `[0, ln(K_g)/τ]` up to a few ulps of the group
/// rate; otherwise the offending group is reported.
pub fn sandwich_audit<T: Real>(
    ch: &ChannelSet<T>,
    f: &BeamformerStack<T>,
    theta: &PhaseVector<T>,
    tau: T,
) -> Result<(T, T)> {
    if !(tau > T::zero()) {
        return Err(invalid("tau", "must be positive"));
    }
    let exact = brute_min_group_rate(ch, f, theta)?;
    let mut lower = T::zero();
    let mut bound_total = T::zero();
    for (g, rates) in exact.per_user.iter().enumerate() {
        let min = exact.per_group[g];
        // log-sum-exp of −τR shifted by its maximum −τ·min
        let peak = -(tau * min);
        let s: T = rates.iter().map(|&r| (-(tau * r) - peak).exp()).sum();
        let smoothed = -(peak + s.ln()) / tau;
        let gap = min - smoothed;
        let bound = T::lit(rates.len() as f64).ln() / tau;
        let slack = T::lit(64.0) * T::epsilon() * (T::one() + min.abs());
        if !(gap >= -slack && gap <= bound + slack) {
            return Err(Error::SandwichViolation {
                group: g,
                gap: gap.to_f64_lossy(),
                bound: bound.to_f64_lossy(),
            });
        }
        lower = lower + gap;
        bound_total = bound_total + bound;
    }
    Ok((lower, bound_total - lower))
}
