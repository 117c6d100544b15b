//! The four experiment shapes: convergence trace, rate versus transmit power,
//! rate versus IRS size, and runtime versus IRS size.
//!
//! Realization `r` draws its channels from substream `r` of the experiment seed
//! and its starting point from a seed derived from `(seed, r)`, so results do
//! not depend on execution order or on the number of worker threads. Rates are
//! converted from nats to bps/Hz only when rows are formatted.

use std::f64::consts::LN_2;

use irs_apg::scenario::ScenarioConfig;
use irs_apg::{apg_solve, SolveTrace, SolverOptions};
use rayon::prelude::*;

use crate::config::{ExperimentKind, ExperimentSpec};
use crate::error::{HarnessError, Result};
use crate::table::{fixed, CsvTable};

/// Seed of the solver starting point of realization `r`.
pub fn start_seed(seed: u64, realization: u64) -> u64 {
    // splitmix64 finalizer over the pair
    let mut z = seed ^ realization.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generates realization `r` and solves it.
pub fn solve_realization(
    scenario: &ScenarioConfig,
    opts: &SolverOptions<f64>,
    seed: u64,
    realization: u64,
) -> Result<SolveTrace<f64>> {
    let fail = |source| HarnessError::Solve { realization, source };
    let ch = scenario.generate(seed, realization).map_err(fail)?;
    let mut opts = opts.clone();
    opts.seed = start_seed(seed, realization);
    apg_solve(&ch, &opts).map_err(fail)
}

/// Runs `job` for every realization on `threads` workers; results come back in
/// realization order and the lowest failing realization is reported.
fn per_realization<R: Send>(
    realizations: usize,
    threads: usize,
    job: impl Fn(u64) -> Result<R> + Sync,
) -> Result<Vec<R>> {
    let outcomes: Vec<Result<R>> = if threads <= 1 {
        (0..realizations as u64).map(&job).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| HarnessError::Config(format!("cannot start {threads} worker threads: {e}")))?;
        pool.install(|| (0..realizations as u64).into_par_iter().map(&job).collect())
    };
    outcomes.into_iter().collect()
}

fn mean(v: impl IntoIterator<Item = f64>) -> f64 {
    let (s, n) = v.into_iter().fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    s / n as f64
}

/// Mean per-iteration traces in nats/s/Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceCurve {
    pub smoothed: Vec<f64>,
    pub sum_rate: Vec<f64>,
}

/// Averages traces of different lengths, extending each with its final value.
pub fn average_traces(traces: &[SolveTrace<f64>]) -> ConvergenceCurve {
    let len = traces.iter().map(|t| t.records.len()).max().unwrap_or(0);
    let at = |t: &SolveTrace<f64>, i: usize| t.records[i.min(t.records.len() - 1)];
    ConvergenceCurve {
        smoothed: (0..len)
            .map(|i| mean(traces.iter().map(|t| at(t, i).smoothed)))
            .collect(),
        sum_rate: (0..len)
            .map(|i| mean(traces.iter().map(|t| at(t, i).sum_rate)))
            .collect(),
    }
}

pub fn convergence_curve(spec: &ExperimentSpec) -> Result<ConvergenceCurve> {
    spec.validate()?;
    let opts = spec.solver_at(spec.pt_dbm);
    let traces = per_realization(spec.realizations, spec.parallel, |r| {
        solve_realization(&spec.scenario, &opts, spec.seed, r)
    })?;
    Ok(average_traces(&traces))
}

/// `(sweep value, mean final sum rate in nats/s/Hz)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCurve {
    pub points: Vec<(f64, f64)>,
}

pub fn sweep_pt_curve(spec: &ExperimentSpec) -> Result<SweepCurve> {
    spec.validate()?;
    let per_real = per_realization(spec.realizations, spec.parallel, |r| {
        spec.sweep
            .iter()
            .map(|&pt| {
                Ok(solve_realization(&spec.scenario, &spec.solver_at(pt), spec.seed, r)?
                    .last()
                    .sum_rate)
            })
            .collect::<Result<Vec<f64>>>()
    })?;
    Ok(SweepCurve {
        points: spec
            .sweep
            .iter()
            .enumerate()
            .map(|(i, &pt)| (pt, mean(per_real.iter().map(|v| v[i]))))
            .collect(),
    })
}

fn with_tiles(scenario: &ScenarioConfig, m: f64) -> ScenarioConfig {
    let mut s = scenario.clone();
    s.tiles = m as usize;
    s
}

pub fn sweep_m_curve(spec: &ExperimentSpec) -> Result<SweepCurve> {
    spec.validate()?;
    let opts = spec.solver_at(spec.pt_dbm);
    let per_real = per_realization(spec.realizations, spec.parallel, |r| {
        spec.sweep
            .iter()
            .map(|&m| {
                Ok(solve_realization(&with_tiles(&spec.scenario, m), &opts, spec.seed, r)?
                    .last()
                    .sum_rate)
            })
            .collect::<Result<Vec<f64>>>()
    })?;
    Ok(SweepCurve {
        points: spec
            .sweep
            .iter()
            .enumerate()
            .map(|(i, &m)| (m, mean(per_real.iter().map(|v| v[i]))))
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuntimePoint {
    pub m: usize,
    pub seconds_per_iteration: f64,
    pub total_seconds: f64,
    pub iterations: f64,
}

/// Wall-clock cost per IRS size.
///
/// Times come from `std::time::Instant` (monotonic, nanosecond resolution on
/// Linux) and cover the iterations only, not channel generation or the
/// starting point. One untimed warm-up solve per IRS size precedes the timed
/// runs. Timed solves cycle through all IRS sizes `timing_repeats` times so
/// that a burst of machine load is spread over every size, and the fastest of
/// the repeats of each `(size, realization)` is kept. Solves run sequentially
/// regardless of `parallel` so that they do not compete for cores.
pub fn runtime_curve(spec: &ExperimentSpec) -> Result<Vec<RuntimePoint>> {
    spec.validate()?;
    let opts = spec.solver_at(spec.pt_dbm);
    let scenarios: Vec<ScenarioConfig> = spec.sweep.iter().map(|&m| with_tiles(&spec.scenario, m)).collect();
    for sc in &scenarios {
        solve_realization(sc, &opts, spec.seed, 0)?;
    }
    let reals = spec.realizations;
    let mut best = vec![f64::INFINITY; scenarios.len() * reals];
    let mut iters = vec![0.0; scenarios.len() * reals];
    for _ in 0..spec.timing_repeats {
        for r in 0..reals {
            for (i, sc) in scenarios.iter().enumerate() {
                let trace = solve_realization(sc, &opts, spec.seed, r as u64)?;
                let slot = i * reals + r;
                best[slot] = best[slot].min(trace.last().wall_seconds);
                iters[slot] = trace.iterations() as f64;
            }
        }
    }
    Ok(scenarios
        .iter()
        .enumerate()
        .map(|(i, sc)| {
            let range = i * reals..(i + 1) * reals;
            RuntimePoint {
                m: sc.tiles,
                seconds_per_iteration: mean(range.clone().map(|s| best[s] / iters[s])),
                total_seconds: mean(best[range.clone()].iter().copied()),
                iterations: mean(iters[range].iter().copied()),
            }
        })
        .collect())
}

/// Metadata line that makes every row replayable.
pub fn metadata(spec: &ExperimentSpec) -> Vec<String> {
    vec![format!(
        "irs-apg-cli {} experiment={} seed={} realizations={} {}",
        env!("CARGO_PKG_VERSION"),
        spec.kind.name(),
        spec.seed,
        spec.realizations,
        spec.describe()
    )]
}

fn bps(nats: f64) -> String {
    fixed(nats / LN_2)
}

pub fn run_convergence(spec: &ExperimentSpec) -> Result<CsvTable> {
    let curve = convergence_curve(spec)?;
    let mut t = CsvTable::new(metadata(spec), &["iter", "mean_smoothed_bps_hz", "mean_true_bps_hz"]);
    for (i, (s, r)) in curve.smoothed.iter().zip(&curve.sum_rate).enumerate() {
        t.push(vec![i.to_string(), bps(*s), bps(*r)]);
    }
    Ok(t)
}

pub fn run_sweep_pt(spec: &ExperimentSpec) -> Result<CsvTable> {
    let curve = sweep_pt_curve(spec)?;
    let mut t = CsvTable::new(metadata(spec), &["pt_dbm", "mean_rate_bps_hz"]);
    for (pt, r) in curve.points {
        t.push(vec![pt.to_string(), bps(r)]);
    }
    Ok(t)
}

pub fn run_sweep_m(spec: &ExperimentSpec) -> Result<CsvTable> {
    let curve = sweep_m_curve(spec)?;
    let mut t = CsvTable::new(metadata(spec), &["m", "mean_rate_bps_hz"]);
    for (m, r) in curve.points {
        t.push(vec![(m as usize).to_string(), bps(r)]);
    }
    Ok(t)
}

pub fn run_runtime(spec: &ExperimentSpec) -> Result<CsvTable> {
    let points = runtime_curve(spec)?;
    let mut t = CsvTable::new(
        metadata(spec),
        &[
            "m",
            "mean_seconds_per_iteration",
            "mean_total_seconds",
            "mean_iterations",
        ],
    );
    for p in points {
        t.push(vec![
            p.m.to_string(),
            format!("{:.9}", p.seconds_per_iteration),
            format!("{:.9}", p.total_seconds),
            format!("{:.4}", p.iterations),
        ]);
    }
    Ok(t)
}

pub fn run(spec: &ExperimentSpec) -> Result<CsvTable> {
    match spec.kind {
        ExperimentKind::Convergence => run_convergence(spec),
        ExperimentKind::SweepPt => run_sweep_pt(spec),
        ExperimentKind::SweepM => run_sweep_m(spec),
        ExperimentKind::Runtime => run_runtime(spec),
    }
}
