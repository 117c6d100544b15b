//! Batch experiment driver: flat config files, seeded Monte-Carlo averaging
//! over channel realizations, and deterministic CSV output.

pub mod config;
pub mod error;
pub mod experiments;
pub mod table;

pub use config::{ExperimentKind, ExperimentSpec};
pub use error::{HarnessError, Result};
pub use experiments::{
    convergence_curve, run, run_convergence, run_runtime, run_sweep_m, run_sweep_pt, runtime_curve, sweep_m_curve,
    sweep_pt_curve, ConvergenceCurve, RuntimePoint, SweepCurve,
};
pub use table::CsvTable;

use std::f64::consts::LN_2;

use irs_apg::SolveTrace;

/// Per-iteration rows of a single solve (rates in bps/Hz).
pub fn trace_table(trace: &SolveTrace<f64>, metadata: Vec<String>) -> CsvTable {
    let mut t = CsvTable::new(
        metadata,
        &["iter", "smoothed_bps_hz", "true_bps_hz", "alpha_f", "alpha_theta"],
    );
    for r in &trace.records {
        t.push(vec![
            r.iter.to_string(),
            table::fixed(r.smoothed / LN_2),
            table::fixed(r.sum_rate / LN_2),
            format!("{:e}", r.alpha_f),
            format!("{:e}", r.alpha_theta),
        ]);
    }
    t
}
