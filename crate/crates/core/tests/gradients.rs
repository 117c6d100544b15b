mod common;

use common::*;
use irs_apg::oracle::{default_step, fd_gradient, relative_error};
use irs_apg::smooth::softmin_weights;
use irs_apg::{
    grad_f_smoothed, grad_theta_quadratic, grad_theta_smoothed, grad_user_rate_cross, grad_user_rate_own,
    rate_breakdown, smoothed_sum_rate, user_rate, BeamformerStack, CMatrix, ChannelSet, Cx, EffectiveChannels,
    LinkState, PhaseVector, SmoothingParam,
};

fn tau(t: f64) -> SmoothingParam<f64> {
    SmoothingParam::new(t).unwrap()
}

fn with_block(f: &BeamformerStack<f64>, i: usize, block: &[C]) -> BeamformerStack<f64> {
    let mut out = f.clone();
    out.block_mut(i).copy_from_slice(block);
    out
}

fn fd_user_rate_wrt_block(inst: &Instance, k: usize, g: usize, i: usize) -> Vec<C> {
    let x = inst.f.block(i).to_vec();
    fd_gradient(
        |v| user_rate(&inst.ch, &with_block(&inst.f, i, v), &inst.theta, k, g).unwrap(),
        &x,
        default_step(&x),
    )
    .unwrap()
}

fn users(ch: &ChannelSet<f64>) -> Vec<(usize, usize)> {
    (0..ch.groups())
        .flat_map(|g| (0..ch.group_sizes()[g]).map(move |k| (k, g)))
        .collect()
}

#[test]
fn own_and_cross_rate_gradients_match_fd() {
    let mut rng = rng(10);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let inst = random_instance(&mut rng, 6, 12, 3, 6);
        for (k, g) in users(&inst.ch) {
            let own = grad_user_rate_own(&inst.ch, &inst.f, &inst.theta, k, g).unwrap();
            worst = worst.max(relative_error(&fd_user_rate_wrt_block(&inst, k, g, g), &own));
            for i in (0..inst.ch.groups()).filter(|&i| i != g) {
                let cross = grad_user_rate_cross(&inst.ch, &inst.f, &inst.theta, k, g, i).unwrap();
                worst = worst.max(relative_error(&fd_user_rate_wrt_block(&inst, k, g, i), &cross));
            }
        }
    }
    assert!(worst < 1e-6, "worst relative error {worst:e}");
}

#[test]
fn quadratic_form_gradient_matches_fd() {
    let mut rng = rng(11);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let inst = random_instance(&mut rng, 6, 12, 3, 6);
        let (k, g) = (0, rng_index(&inst));
        let u = inst.ch.group_range(g).start + k;
        for j in 0..inst.ch.groups() {
            let analytic = grad_theta_quadratic(&inst.ch, &inst.f, &inst.theta, k, g, j).unwrap();
            let x = inst.theta.as_slice().to_vec();
            let fd = fd_gradient(
                |v| {
                    let z = EffectiveChannels::compute(&inst.ch, &PhaseVector::new(v.to_vec())).unwrap();
                    LinkState::new(&inst.ch, &z, &inst.f)
                        .unwrap()
                        .amplitude(u, j)
                        .norm_sqr()
                },
                &x,
                default_step(&x),
            )
            .unwrap();
            worst = worst.max(relative_error(&fd, &analytic));
        }
    }
    assert!(worst < 1e-8, "worst relative error {worst:e}");
}

fn rng_index(inst: &Instance) -> usize {
    inst.ch.groups() - 1
}

#[test]
fn smoothed_gradients_match_fd() {
    let mut rng = rng(12);
    let mut worst_f: f64 = 0.0;
    let mut worst_t: f64 = 0.0;
    for trial in 0..60 {
        let t = tau(if trial % 2 == 0 { 5.0 } else { 50.0 });
        let inst = random_instance(&mut rng, 6, 16, 3, 6);
        let n = inst.ch.antennas();
        let gf = grad_f_smoothed(&inst.ch, &inst.f, &inst.theta, t).unwrap();
        let x = inst.f.as_slice().to_vec();
        let fd = fd_gradient(
            |v| {
                let f = BeamformerStack::new(n, v.to_vec()).unwrap();
                smoothed_sum_rate(&inst.ch, &f, &inst.theta, t).unwrap()
            },
            &x,
            default_step(&x),
        )
        .unwrap();
        worst_f = worst_f.max(relative_error(&fd, &gf));

        let gt = grad_theta_smoothed(&inst.ch, &inst.f, &inst.theta, t).unwrap();
        let x = inst.theta.as_slice().to_vec();
        let fd = fd_gradient(
            |v| smoothed_sum_rate(&inst.ch, &inst.f, &PhaseVector::new(v.to_vec()), t).unwrap(),
            &x,
            default_step(&x),
        )
        .unwrap();
        worst_t = worst_t.max(relative_error(&fd, &gt));
    }
    assert!(worst_f < 1e-6, "f: {worst_f:e}");
    assert!(worst_t < 1e-6, "θ: {worst_t:e}");
}

/// Diagonal of `ĥ^H (z f_j) f_j^H H^H` with the `M × M` outer product formed.
fn outer_product_quadratic(inst: &Instance, u: usize, j: usize) -> Vec<C> {
    let z = EffectiveChannels::compute(&inst.ch, &inst.theta).unwrap();
    let zf: C = z.row(u).iter().zip(inst.f.block(j)).map(|(a, b)| a * b).sum();
    let hf = inst.ch.h_ts().mul_vec(inst.f.block(j));
    let m = inst.ch.tiles();
    // left = ĥ^H (z f_j): column, right = f_j^H H^H = (H f_j)^H: row
    let left: Vec<C> = inst.ch.irs(u).iter().map(|h| h.conj() * zf).collect();
    let right: Vec<C> = hf.iter().map(|x| x.conj()).collect();
    let outer = CMatrix::from_fn(m, m, |r, c| left[r] * right[c]);
    (0..m).map(|i| outer.get(i, i)).collect()
}

#[test]
fn elementwise_theta_gradient_equals_outer_product_diagonal() {
    let mut rng = rng(13);
    for _ in 0..40 {
        let inst = random_instance(&mut rng, 4, 8, 3, 5);
        let t = tau(50.0);
        // assemble the smoothed θ-gradient from outer-product diagonals
        let z = EffectiveChannels::compute(&inst.ch, &inst.theta).unwrap();
        let state = LinkState::new(&inst.ch, &z, &inst.f).unwrap();
        let w = softmin_weights(&inst.ch, state.rates(), t);
        let mut dense = vec![Cx::new(0.0, 0.0); inst.ch.tiles()];
        for (u, &weight) in w.iter().enumerate() {
            let g = inst.ch.group_of(u);
            for j in 0..inst.ch.groups() {
                let mut coeff = 1.0 / state.total_power(u);
                if j != g {
                    coeff -= 1.0 / state.interference_power(u);
                }
                for (d, q) in dense.iter_mut().zip(outer_product_quadratic(&inst, u, j)) {
                    *d += q * (weight * coeff);
                }
            }
        }
        let fast = grad_theta_smoothed(&inst.ch, &inst.f, &inst.theta, t).unwrap();
        let scale = dense.iter().map(|c| c.norm()).fold(1e-300, f64::max);
        for (a, b) in fast.iter().zip(&dense) {
            assert!((a - b).norm() <= 1e-12 * scale, "{a} vs {b}");
        }
        // and per-term
        let (k, g) = (0, 0);
        let q = grad_theta_quadratic(&inst.ch, &inst.f, &inst.theta, k, g, 0).unwrap();
        let o = outer_product_quadratic(&inst, 0, 0);
        let scale = o.iter().map(|c| c.norm()).fold(1e-300, f64::max);
        for (a, b) in q.iter().zip(&o) {
            assert!((a - b).norm() <= 1e-12 * scale);
        }
    }
}

#[test]
fn singleton_groups_use_unit_weights() {
    let mut rng = rng(14);
    let ch = random_channels(&mut rng, 3, 4, &[1, 1, 1]);
    let f = random_beam(&mut rng, 3, 3, 1.0);
    let theta = random_phases(&mut rng, 4);
    let grad = grad_f_smoothed(&ch, &f, &theta, tau(50.0)).unwrap();
    let mut raw = vec![Cx::new(0.0, 0.0); 9];
    for g in 0..3 {
        for i in 0..3 {
            let part = if i == g {
                grad_user_rate_own(&ch, &f, &theta, 0, g).unwrap()
            } else {
                grad_user_rate_cross(&ch, &f, &theta, 0, g, i).unwrap()
            };
            for (r, p) in raw[i * 3..(i + 1) * 3].iter_mut().zip(part) {
                *r += p;
            }
        }
    }
    for (a, b) in grad.iter().zip(&raw) {
        assert!((a - b).norm() < 1e-14);
    }
    let s = smoothed_sum_rate(&ch, &f, &theta, tau(50.0)).unwrap();
    assert_eq!(s, rate_breakdown(&ch, &f, &theta).unwrap().sum_rate);
}

#[test]
fn zero_cases_vanish() {
    let mut rng = rng(15);
    let ch = random_channels(&mut rng, 3, 5, &[2, 2]);
    let theta = random_phases(&mut rng, 5);
    let zero = BeamformerStack::zeros(3, 2);
    let t = tau(50.0);
    let is_zero = |v: &[C]| v.iter().all(|c| c.norm() == 0.0);
    assert!(is_zero(&grad_f_smoothed(&ch, &zero, &theta, t).unwrap()));
    assert!(is_zero(&grad_theta_smoothed(&ch, &zero, &theta, t).unwrap()));
    assert!(is_zero(&grad_user_rate_own(&ch, &zero, &theta, 0, 0).unwrap()));
    assert!(is_zero(&grad_user_rate_cross(&ch, &zero, &theta, 0, 0, 1).unwrap()));
    assert!(is_zero(&grad_theta_quadratic(&ch, &zero, &theta, 1, 1, 0).unwrap()));

    // victim group unserved: the cross bracket vanishes
    let mut f = random_beam(&mut rng, 3, 2, 1.0);
    for x in f.block_mut(0) {
        *x = Cx::new(0.0, 0.0);
    }
    assert!(is_zero(&grad_user_rate_cross(&ch, &f, &theta, 1, 0, 1).unwrap()));

    // no IRS path: θ drops out of the objective
    let no_irs = ChannelSet::new(
        ch.h_ts().clone(),
        (0..4).map(|u| ch.direct(u).to_vec()).collect(),
        vec![vec![Cx::new(0.0, 0.0); 5]; 4],
        vec![2, 2],
    )
    .unwrap();
    let f = random_beam(&mut rng, 3, 2, 1.0);
    assert!(is_zero(&grad_theta_smoothed(&no_irs, &f, &theta, t).unwrap()));
    assert!(is_zero(&grad_theta_quadratic(&no_irs, &f, &theta, 0, 1, 1).unwrap()));
}

#[test]
fn softmin_weights_are_a_distribution() {
    let mut rng = rng(16);
    for _ in 0..200 {
        let inst = random_instance(&mut rng, 4, 6, 3, 8);
        let z = EffectiveChannels::compute(&inst.ch, &inst.theta).unwrap();
        let state = LinkState::new(&inst.ch, &z, &inst.f).unwrap();
        for t in [5.0, 50.0, 500.0] {
            let w = softmin_weights(&inst.ch, state.rates(), tau(t));
            for g in 0..inst.ch.groups() {
                let part = &w[inst.ch.group_range(g)];
                assert!(part.iter().all(|&x| x >= 0.0));
                assert!((part.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn smoothed_value_within_sandwich() {
    let mut rng = rng(17);
    for _ in 0..200 {
        let inst = random_instance(&mut rng, 5, 10, 3, 8);
        let exact = rate_breakdown(&inst.ch, &inst.f, &inst.theta).unwrap().sum_rate;
        let slack: f64 = inst.ch.group_sizes().iter().map(|&k| (k as f64).ln()).sum::<f64>() / 50.0;
        let s = smoothed_sum_rate(&inst.ch, &inst.f, &inst.theta, tau(50.0)).unwrap();
        assert!(s <= exact + 1e-14 && s >= exact - slack - 1e-14);
    }
}
