//! Alternating projected gradient ascent on the smoothed sum rate.
//!
//! Each iteration takes a projected gradient step in `f` at `(f⁽ⁿ⁻¹⁾, θ⁽ⁿ⁻¹⁾)`,
//! then a projected gradient step in `θ` at `(f⁽ⁿ⁾, θ⁽ⁿ⁻¹⁾)`. Both step sizes come
//! from Armijo backtracking, warm-started from twice the last accepted step and
//! capped at the configured initial step.

mod init;
mod linesearch;
mod projection;

use std::time::{Duration, Instant};

pub use init::initialize;
pub use linesearch::{armijo_search, Armijo, LineSearchOutcome};
pub use projection::{project_ball_in_place, project_power_ball, project_unit_modulus, project_unit_modulus_in_place};

use crate::error::{invalid, Result};
use crate::model::{BeamformerStack, ChannelSet, EffectiveChannels, LinkState, PhaseVector};
use crate::scalar::Real;
use crate::smooth::{grad_f_into, grad_theta_into, smoothed_from_rates, GradScratch, SmoothingParam};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions<T> {
    /// Transmit power budget `P_t` in the same units as `‖f‖²`.
    pub p_t: T,
    pub tau: T,
    /// Relative change of the smoothed objective that counts as converged.
    pub tol: T,
    pub max_iters: usize,
    pub armijo_c: T,
    pub shrink: T,
    pub alpha_min: T,
    /// Upper bound on the `f` step size.
    pub alpha_init_f: T,
    /// Upper bound on the `θ` step size.
    pub alpha_init_theta: T,
    /// Seed of the starting point.
    pub seed: u64,
}

impl<T: Real> SolverOptions<T> {
    pub fn new(p_t: T) -> Self {
        Self {
            p_t,
            tau: T::lit(50.0),
            tol: T::lit(1e-5),
            max_iters: 5000,
            armijo_c: T::lit(1e-4),
            shrink: T::lit(0.5),
            alpha_min: T::lit(1e-12),
            alpha_init_f: T::lit(1e6),
            alpha_init_theta: T::lit(1e6),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(name, format!("must be finite and positive, got {v}")))
            }
        };
        positive("p_t", self.p_t)?;
        positive("tau", self.tau)?;
        positive("tol", self.tol)?;
        positive("alpha_init_f", self.alpha_init_f)?;
        positive("alpha_init_theta", self.alpha_init_theta)?;
        if self.max_iters == 0 {
            return Err(invalid("max_iters", "must be at least 1"));
        }
        self.armijo().validate()
    }

    pub fn armijo(&self) -> Armijo<T> {
        Armijo {
            c: self.armijo_c,
            shrink: self.shrink,
            alpha_min: self.alpha_min,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIterations,
    /// Both line searches failed to find an admissible step in the same iteration.
    Stalled,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::MaxIterations => "max-iterations",
            Termination::Stalled => "stalled",
        }
    }
}

/// One row of the solve trace. Row 0 is the starting point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord<T> {
    pub iter: usize,
    /// `R̃_sum` in nats/s/Hz.
    pub smoothed: T,
    /// `ℛ_sum` in nats/s/Hz.
    pub sum_rate: T,
    pub alpha_f: T,
    pub alpha_theta: T,
    /// Objective evaluations spent by the two line searches.
    pub evaluations: usize,
    /// Seconds since the start of the solve.
    pub wall_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct SolveTrace<T> {
    pub records: Vec<IterationRecord<T>>,
    pub f: BeamformerStack<T>,
    pub theta: PhaseVector<T>,
    pub termination: Termination,
}

impl<T: Real> SolveTrace<T> {
    /// Completed iterations (excluding the starting point).
    pub fn iterations(&self) -> usize {
        self.records.len() - 1
    }

    pub fn last(&self) -> &IterationRecord<T> {
        self.records.last().expect("trace always holds the starting point")
    }
}

/// Runs the alternating solver from the seeded starting point of [`initialize`].
pub fn apg_solve<T: Real>(ch: &ChannelSet<T>, opts: &SolverOptions<T>) -> Result<SolveTrace<T>> {
    opts.validate()?;
    let (f0, theta0) = initialize(ch, opts.p_t, opts.seed)?;
    apg_solve_from(ch, opts, f0, theta0)
}

/// Runs the alternating solver from a caller-supplied feasible point.
pub fn apg_solve_from<T: Real>(
    ch: &ChannelSet<T>,
    opts: &SolverOptions<T>,
    f0: BeamformerStack<T>,
    theta0: PhaseVector<T>,
) -> Result<SolveTrace<T>> {
    apg_solve_observed(ch, opts, f0, theta0, |_| {})
}

/// An iterate handed to the observer of [`apg_solve_observed`].
#[derive(Debug, Clone, Copy)]
pub struct Iterate<'a, T> {
    pub record: &'a IterationRecord<T>,
    pub f: &'a BeamformerStack<T>,
    pub theta: &'a PhaseVector<T>,
}

/// [`apg_solve_from`] that also shows every iterate, starting point included,
/// to `observer`. Observation time is excluded from the recorded wall time.
pub fn apg_solve_observed<T: Real>(
    ch: &ChannelSet<T>,
    opts: &SolverOptions<T>,
    f0: BeamformerStack<T>,
    theta0: PhaseVector<T>,
    mut observer: impl FnMut(Iterate<'_, T>),
) -> Result<SolveTrace<T>> {
    opts.validate()?;
    let started = Instant::now();
    let mut observing = Duration::ZERO;
    let tau = SmoothingParam::new(opts.tau)?;
    let armijo = opts.armijo();
    let radius = opts.p_t.sqrt();
    let n = ch.antennas();

    let mut f = f0;
    let mut theta = theta0;
    let mut z = EffectiveChannels::compute(ch, &theta)?;
    let mut state = LinkState::new(ch, &z, &f)?;
    let mut objective = smoothed_from_rates(ch, state.rates(), tau);
    let mut trial_z = z.clone();
    let mut trial_state = state.clone();
    let mut scratch = GradScratch::default();
    let mut records = vec![IterationRecord {
        iter: 0,
        smoothed: objective,
        sum_rate: group_min_sum(ch, state.rates()),
        alpha_f: T::zero(),
        alpha_theta: T::zero(),
        evaluations: 0,
        wall_seconds: started.elapsed().as_secs_f64(),
    }];
    let watch = Instant::now();
    observer(Iterate {
        record: &records[0],
        f: &f,
        theta: &theta,
    });
    observing += watch.elapsed();

    let two = T::lit(2.0);
    let mut last_alpha_f = opts.alpha_init_f;
    let mut last_alpha_theta = opts.alpha_init_theta;
    let mut termination = Termination::MaxIterations;

    for iter in 1..=opts.max_iters {
        let previous = objective;

        // f-step with θ⁽ⁿ⁻¹⁾ fixed: the effective channels are reused.
        grad_f_into(ch, &z, &state, tau, &mut scratch);
        let alpha0 = (two * last_alpha_f).min(opts.alpha_init_f);
        // Trials are evaluated into scratch buffers. The accepted candidate is
        // always the last one evaluated, so its buffers are swapped in instead of
        // being recomputed.
        let step_f = armijo_search(
            |cand| {
                trial_state.update(ch, &z, cand)?;
                Ok(smoothed_from_rates(ch, trial_state.rates(), tau))
            },
            f.as_slice(),
            objective,
            &scratch.grad,
            |v| project_ball_in_place(v, radius),
            alpha0,
            &armijo,
        )?;
        if step_f.alpha > T::zero() {
            last_alpha_f = step_f.alpha;
            if step_f.evaluations > 0 {
                std::mem::swap(&mut state, &mut trial_state);
            }
        }
        f = BeamformerStack::new(n, step_f.x)?;
        objective = step_f.objective;

        // θ-step at the fresh f.
        grad_theta_into(ch, f.as_slice(), &state, tau, &mut scratch);
        let alpha0 = (two * last_alpha_theta).min(opts.alpha_init_theta);
        let step_theta = armijo_search(
            |cand| {
                trial_z.update(ch, cand)?;
                trial_state.update(ch, &trial_z, f.as_slice())?;
                Ok(smoothed_from_rates(ch, trial_state.rates(), tau))
            },
            theta.as_slice(),
            objective,
            &scratch.grad,
            |v| project_unit_modulus_in_place(v),
            alpha0,
            &armijo,
        )?;
        if step_theta.alpha > T::zero() {
            last_alpha_theta = step_theta.alpha;
            if step_theta.evaluations > 0 {
                std::mem::swap(&mut z, &mut trial_z);
                std::mem::swap(&mut state, &mut trial_state);
            }
        }
        theta = PhaseVector::new(step_theta.x);
        objective = step_theta.objective;

        records.push(IterationRecord {
            iter,
            smoothed: objective,
            sum_rate: group_min_sum(ch, state.rates()),
            alpha_f: step_f.alpha,
            alpha_theta: step_theta.alpha,
            evaluations: step_f.evaluations + step_theta.evaluations,
            wall_seconds: (started.elapsed() - observing).as_secs_f64(),
        });
        let watch = Instant::now();
        observer(Iterate {
            record: &records[iter],
            f: &f,
            theta: &theta,
        });
        observing += watch.elapsed();

        if step_f.alpha == T::zero() && step_theta.alpha == T::zero() {
            termination = Termination::Stalled;
            break;
        }
        let change = (objective - previous).abs() / previous.abs().max(T::one());
        if change < opts.tol {
            termination = Termination::Converged;
            break;
        }
    }

    Ok(SolveTrace {
        records,
        f,
        theta,
        termination,
    })
}

fn group_min_sum<T: Real>(ch: &ChannelSet<T>, rates: &[T]) -> T {
    (0..ch.groups())
        .map(|g| rates[ch.group_range(g)].iter().copied().fold(T::infinity(), T::min))
        .sum()
}
