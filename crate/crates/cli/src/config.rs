//! Flat `key = value` experiment configuration.
//!
//! Lines are `key = value`; blank lines and lines starting with `#` are ignored.
//! Lists are comma separated (`group_sizes = 2,2`, `tx_center = 0,20,10`).
//! Every key has a default, so an empty file describes the reference setup.

use std::fmt::Write as _;
use std::str::FromStr;

use irs_apg::scenario::{dbm_to_watts, Point3, ScenarioConfig};
use irs_apg::SolverOptions;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Convergence,
    SweepPt,
    SweepM,
    Runtime,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Convergence => "convergence",
            ExperimentKind::SweepPt => "sweep-pt",
            ExperimentKind::SweepM => "sweep-m",
            ExperimentKind::Runtime => "runtime",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "convergence" => Ok(Self::Convergence),
            "sweep-pt" => Ok(Self::SweepPt),
            "sweep-m" => Ok(Self::SweepM),
            "runtime" => Ok(Self::Runtime),
            other => Err(HarnessError::Config(format!(
                "unknown experiment `{other}` (expected convergence, sweep-pt, sweep-m or runtime)"
            ))),
        }
    }
}

/// Everything needed to reproduce one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub scenario: ScenarioConfig,
    /// Solver settings; `p_t` is overwritten from `pt_dbm` or the sweep value.
    pub solver: SolverOptions<f64>,
    pub pt_dbm: f64,
    /// Transmit powers in dBm (sweep-pt) or tile counts (sweep-m, runtime).
    pub sweep: Vec<f64>,
    pub realizations: usize,
    pub seed: u64,
    /// Worker threads for independent realizations; does not affect output.
    pub parallel: usize,
    /// Runtime experiment: each timed solve is repeated this many times and the
    /// fastest run is kept, which filters scheduler noise.
    pub timing_repeats: usize,
}

impl ExperimentSpec {
    pub fn defaults(kind: ExperimentKind) -> Self {
        let (groups, sweep) = match kind {
            ExperimentKind::Convergence => (vec![3, 3, 3], vec![]),
            ExperimentKind::SweepPt => (vec![2, 2], vec![10.0, 15.0, 20.0, 25.0, 30.0]),
            ExperimentKind::SweepM | ExperimentKind::Runtime => (vec![2, 2], vec![25.0, 100.0, 225.0, 400.0]),
        };
        Self {
            kind,
            scenario: ScenarioConfig::new(4, 100, groups),
            solver: SolverOptions::new(dbm_to_watts(30.0)),
            pt_dbm: 30.0,
            sweep,
            realizations: 20,
            seed: 1,
            parallel: 1,
            timing_repeats: 3,
        }
    }

    /// Applies every `key = value` line of a config file.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                HarnessError::Config(format!("line {}: expected `key = value`, got `{line}`", lineno + 1))
            })?;
            self.set(k.trim(), v.trim())
                .map_err(|e| HarnessError::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, kv: &str) -> Result<()> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| HarnessError::Config(format!("override `{kv}` is not key=value")))?;
        self.set(k.trim(), v.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let sc = &mut self.scenario;
        let geo = &mut sc.geometry;
        let bud = &mut sc.budget;
        let so = &mut self.solver;
        match key {
            "n" => sc.antennas = parse(key, value)?,
            "m" => sc.tiles = parse(key, value)?,
            "group_sizes" => sc.group_sizes = parse_list(key, value)?,
            "pt_dbm" => self.pt_dbm = parse(key, value)?,
            "sweep" => self.sweep = parse_list(key, value)?,
            "realizations" => self.realizations = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "parallel" => self.parallel = parse(key, value)?,
            "timing_repeats" => self.timing_repeats = parse(key, value)?,
            "tau" => so.tau = parse(key, value)?,
            "tol" => so.tol = parse(key, value)?,
            "max_iters" => so.max_iters = parse(key, value)?,
            "armijo_c" => so.armijo_c = parse(key, value)?,
            "shrink" => so.shrink = parse(key, value)?,
            "alpha_min" => so.alpha_min = parse(key, value)?,
            "alpha_init_f" => so.alpha_init_f = parse(key, value)?,
            "alpha_init_theta" => so.alpha_init_theta = parse(key, value)?,
            "noise_psd_dbm_hz" => bud.noise_psd_dbm_hz = parse(key, value)?,
            "bandwidth_hz" => bud.bandwidth_hz = parse(key, value)?,
            "carrier_hz" => geo.carrier_hz = parse(key, value)?,
            "tx_center" => geo.tx_center = parse_point(key, value)?,
            "irs_center" => geo.irs_center = parse_point(key, value)?,
            "user_center" => geo.user_area_center = parse_point(key, value)?,
            "user_radius" => geo.user_area_radius = parse(key, value)?,
            "element_spacing" => geo.element_spacing = parse(key, value)?,
            "min_user_separation" => geo.min_user_separation = parse(key, value)?,
            "tx_irs_intercept_db" => bud.tx_irs.intercept_db = parse(key, value)?,
            "tx_irs_exponent" => bud.tx_irs.exponent = parse(key, value)?,
            "tx_irs_rician_k_db" => bud.tx_irs.rician_k_db = parse(key, value)?,
            "irs_user_intercept_db" => bud.irs_user.intercept_db = parse(key, value)?,
            "irs_user_exponent" => bud.irs_user.exponent = parse(key, value)?,
            "irs_user_rician_k_db" => bud.irs_user.rician_k_db = parse(key, value)?,
            "tx_user_intercept_db" => bud.tx_user.intercept_db = parse(key, value)?,
            "tx_user_exponent" => bud.tx_user.exponent = parse(key, value)?,
            "tx_user_rician_k_db" => bud.tx_user.rician_k_db = parse(key, value)?,
            _ => return Err(HarnessError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(HarnessError::Config("realizations must be at least 1".into()));
        }
        if self.kind != ExperimentKind::Convergence {
            if self.sweep.is_empty() {
                return Err(HarnessError::Config("sweep values must be nonempty".into()));
            }
            if self.sweep.iter().any(|v| !v.is_finite()) {
                return Err(HarnessError::Config("sweep values must be finite".into()));
            }
        }
        match self.kind {
            // a tile count of zero is the no-IRS baseline
            ExperimentKind::SweepM | ExperimentKind::Runtime => {
                if self.sweep.iter().any(|&v| v < 0.0 || v.fract() != 0.0) {
                    return Err(HarnessError::Config("tile counts must be nonnegative integers".into()));
                }
            }
            ExperimentKind::SweepPt | ExperimentKind::Convergence => {}
        }
        if self.timing_repeats == 0 {
            return Err(HarnessError::Config("timing_repeats must be at least 1".into()));
        }
        if self.parallel == 0 {
            return Err(HarnessError::Config("parallel must be at least 1".into()));
        }
        self.scenario.validate()?;
        let mut probe = self.solver.clone();
        probe.p_t = dbm_to_watts(self.pt_dbm);
        probe.validate()?;
        Ok(())
    }

    /// Solver options at transmit power `pt_dbm`.
    pub fn solver_at(&self, pt_dbm: f64) -> SolverOptions<f64> {
        let mut o = self.solver.clone();
        o.p_t = dbm_to_watts(pt_dbm);
        o
    }

    /// Canonical one-line rendering of every setting that affects the output.
    pub fn describe(&self) -> String {
        let sc = &self.scenario;
        let g = &sc.geometry;
        let b = &sc.budget;
        let so = &self.solver;
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let pt = |p: Point3| format!("{},{},{}", p.x, p.y, p.z);
        let mut s = String::new();
        let _ = write!(
            s,
            "n={} m={} group_sizes={} pt_dbm={} sweep={} tau={} tol={} max_iters={} armijo_c={} shrink={} \
             alpha_min={} alpha_init_f={} alpha_init_theta={} noise_psd_dbm_hz={} bandwidth_hz={} carrier_hz={} \
             tx_center={} irs_center={} user_center={} user_radius={} element_spacing={} min_user_separation={} \
             timing_repeats={}",
            sc.antennas,
            sc.tiles,
            sc.group_sizes
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(","),
            self.pt_dbm,
            list(&self.sweep),
            so.tau,
            so.tol,
            so.max_iters,
            so.armijo_c,
            so.shrink,
            so.alpha_min,
            so.alpha_init_f,
            so.alpha_init_theta,
            b.noise_psd_dbm_hz,
            b.bandwidth_hz,
            g.carrier_hz,
            pt(g.tx_center),
            pt(g.irs_center),
            pt(g.user_area_center),
            g.user_area_radius,
            g.element_spacing,
            g.min_user_separation,
            self.timing_repeats,
        );
        for (name, l) in [("tx_irs", b.tx_irs), ("irs_user", b.irs_user), ("tx_user", b.tx_user)] {
            let _ = write!(
                s,
                " {name}_intercept_db={} {name}_exponent={} {name}_rician_k_db={}",
                l.intercept_db, l.exponent, l.rician_k_db
            );
        }
        s
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| HarnessError::Config(format!("cannot parse `{value}` for `{key}`")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect()
}

fn parse_point(key: &str, value: &str) -> Result<Point3> {
    let v: Vec<f64> = parse_list(key, value)?;
    match v.as_slice() {
        [x, y, z] => Ok(Point3::new(*x, *y, *z)),
        _ => Err(HarnessError::Config(format!("`{key}` needs three coordinates"))),
    }
}
