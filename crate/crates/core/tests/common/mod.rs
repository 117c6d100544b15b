#![allow(dead_code)]

use irs_apg::{BeamformerStack, CMatrix, ChannelSet, Cx, PhaseVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type C = Cx<f64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cn(rng: &mut impl Rng) -> C {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Cx::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn cvec(rng: &mut impl Rng, n: usize) -> Vec<C> {
    (0..n).map(|_| cn(rng)).collect()
}

pub fn random_channels(rng: &mut impl Rng, n: usize, m: usize, group_sizes: &[usize]) -> ChannelSet<f64> {
    let k: usize = group_sizes.iter().sum();
    let h_ts = CMatrix::new(m, n, cvec(rng, m * n)).unwrap();
    let direct = (0..k).map(|_| cvec(rng, n)).collect();
    let irs = (0..k).map(|_| cvec(rng, m)).collect();
    ChannelSet::new(h_ts, direct, irs, group_sizes.to_vec()).unwrap()
}

/// Beamformer with `‖f‖² = p_t`.
pub fn random_beam(rng: &mut impl Rng, n: usize, g: usize, p_t: f64) -> BeamformerStack<f64> {
    let v = cvec(rng, n * g);
    let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let s = p_t.sqrt() / norm;
    BeamformerStack::new(n, v.into_iter().map(|c| c * s).collect()).unwrap()
}

pub fn random_phases(rng: &mut impl Rng, m: usize) -> PhaseVector<f64> {
    let phi: Vec<f64> = (0..m).map(|_| rng.random::<f64>() * std::f64::consts::TAU).collect();
    PhaseVector::from_angles(&phi)
}

pub fn random_group_sizes(rng: &mut impl Rng, max_groups: usize, max_users: usize) -> Vec<usize> {
    let g = rng.random_range(1..=max_groups);
    let mut sizes = vec![1; g];
    let extra = rng.random_range(0..=max_users.saturating_sub(g));
    for _ in 0..extra {
        let i = rng.random_range(0..g);
        sizes[i] += 1;
    }
    sizes
}

/// A feasible random problem instance.
pub struct Instance {
    pub ch: ChannelSet<f64>,
    pub f: BeamformerStack<f64>,
    pub theta: PhaseVector<f64>,
}

pub fn random_instance(rng: &mut impl Rng, max_n: usize, max_m: usize, max_g: usize, max_k: usize) -> Instance {
    let n = rng.random_range(1..=max_n);
    let m = rng.random_range(1..=max_m);
    let sizes = random_group_sizes(rng, max_g, max_k);
    let ch = random_channels(rng, n, m, &sizes);
    let p_t = 10f64.powf(rng.random_range(-1.0..1.0));
    let f = random_beam(rng, n, sizes.len(), p_t);
    let theta = random_phases(rng, m);
    Instance { ch, f, theta }
}
