mod common;

use common::*;
use irs_apg::oracle::brute_min_group_rate;
use irs_apg::{effective_channel, rate_breakdown, user_rate, Cx};
use proptest::prelude::*;

/// `h + ĥ diag(θ) H` with the diagonal matrix materialized.
fn dense_effective(direct: &[C], irs: &[C], theta: &[C], h_ts: &irs_apg::CMatrix<f64>) -> Vec<C> {
    let m = theta.len();
    let n = direct.len();
    let mut diag = vec![vec![Cx::new(0.0, 0.0); m]; m];
    for i in 0..m {
        diag[i][i] = theta[i];
    }
    let mut row_diag = vec![Cx::new(0.0, 0.0); m];
    for (j, rd) in row_diag.iter_mut().enumerate() {
        for (i, h) in irs.iter().enumerate() {
            *rd += h * diag[i][j];
        }
    }
    (0..n)
        .map(|c| direct[c] + (0..m).map(|r| row_diag[r] * h_ts.get(r, c)).sum::<C>())
        .collect()
}

#[test]
fn effective_channel_matches_dense_product() {
    let mut rng = rng(1);
    for _ in 0..20 {
        let ch = random_channels(&mut rng, 4, 4, &[2, 1]);
        let theta = random_phases(&mut rng, 4);
        for u in 0..ch.users() {
            let g = ch.group_of(u);
            let k = u - ch.group_range(g).start;
            let z = effective_channel(&ch, &theta, k, g).unwrap();
            let d = dense_effective(ch.direct(u), ch.irs(u), theta.as_slice(), ch.h_ts());
            for (a, b) in z.iter().zip(&d) {
                assert!((a - b).norm() <= 1e-12 * b.norm().max(1e-300), "{a} vs {b}");
            }
        }
    }
}

#[test]
fn user_rate_matches_scalar_loops() {
    let mut rng = rng(2);
    for _ in 0..50 {
        let ch = random_channels(&mut rng, 3, 5, &[2, 2]);
        let f = random_beam(&mut rng, 3, 2, 2.0);
        let theta = random_phases(&mut rng, 5);
        let brute = brute_min_group_rate(&ch, &f, &theta).unwrap();
        for g in 0..2 {
            for k in 0..2 {
                let r = user_rate(&ch, &f, &theta, k, g).unwrap();
                assert!((r - brute.per_user[g][k]).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn breakdown_is_sum_of_group_minima() {
    let mut rng = rng(3);
    for _ in 0..50 {
        let inst = random_instance(&mut rng, 6, 10, 3, 7);
        let b = rate_breakdown(&inst.ch, &inst.f, &inst.theta).unwrap();
        let mut total = 0.0;
        for g in 0..inst.ch.groups() {
            let min = (0..inst.ch.group_sizes()[g])
                .map(|k| user_rate(&inst.ch, &inst.f, &inst.theta, k, g).unwrap())
                .fold(f64::INFINITY, f64::min);
            assert_eq!(b.per_group[g], min);
            total += min;
        }
        assert!((b.sum_rate - total).abs() < 1e-14);
    }
}

#[test]
fn single_user_brute_force_equals_user_rate() {
    let mut rng = rng(4);
    let ch = random_channels(&mut rng, 4, 6, &[1]);
    let f = random_beam(&mut rng, 4, 1, 1.0);
    let theta = random_phases(&mut rng, 6);
    let brute = brute_min_group_rate(&ch, &f, &theta).unwrap();
    let r = user_rate(&ch, &f, &theta, 0, 0).unwrap();
    assert!((brute.sum_rate - r).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rate_properties(seed in any::<u64>(), psi in 0.0f64..std::f64::consts::TAU) {
        let mut rng = rng(seed);
        let inst = random_instance(&mut rng, 5, 8, 3, 6);
        let (ch, f, theta) = (&inst.ch, &inst.f, &inst.theta);
        let b = rate_breakdown(ch, f, theta).unwrap();
        prop_assert!(b.per_user.iter().flatten().all(|&r| r >= 0.0));

        // common phase rotation of one block leaves all rates unchanged
        let g_rot = seed as usize % ch.groups();
        let mut rotated = f.clone();
        for x in rotated.block_mut(g_rot) {
            *x *= Cx::from_polar(1.0, psi);
        }
        let br = rate_breakdown(ch, &rotated, theta).unwrap();
        for (a, c) in b.per_user.iter().flatten().zip(br.per_user.iter().flatten()) {
            prop_assert!((a - c).abs() <= 1e-12 * (1.0 + a.abs()));
        }

        // permuting the users of a group leaves the breakdown unchanged
        let g = (seed / 7) as usize % ch.groups();
        let size = ch.group_sizes()[g];
        let perm: Vec<usize> = (0..size).rev().collect();
        let permuted = ch.permute_group(g, &perm).unwrap();
        let bp = rate_breakdown(&permuted, f, theta).unwrap();
        prop_assert_eq!(&b.per_group, &bp.per_group);
        prop_assert_eq!(b.sum_rate, bp.sum_rate);

        // zeroing a block zeroes exactly that group's users
        let mut silent = f.clone();
        for x in silent.block_mut(g) {
            *x = Cx::new(0.0, 0.0);
        }
        let bs = rate_breakdown(ch, &silent, theta).unwrap();
        prop_assert!(bs.per_user[g].iter().all(|&r| r == 0.0));
    }
}
