//! Joint transmit beamforming and IRS phase-shift design for multigroup
//! multicast MISO downlinks.
//!
//! The sum of per-group minimum rates is smoothed with a log-sum-exp softmin and
//! maximized by alternating projected gradient ascent: a gradient step on the
//! stacked beamformer followed by projection onto the power ball, then a
//! gradient step on the IRS phases followed by projection onto the unit-modulus
//! set. Step sizes come from Armijo backtracking.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod model;
pub mod oracle;
pub mod scalar;
pub mod scenario;
pub mod smooth;
pub mod solver;

pub use error::{Error, Result};
pub use model::{
    effective_channel, rate_breakdown, user_rate, BeamformerStack, CMatrix, ChannelSet, EffectiveChannels, LinkState,
    PhaseVector, RateBreakdown,
};
pub use scalar::{Cx, Real};
pub use smooth::{
    grad_f_smoothed, grad_theta_quadratic, grad_theta_smoothed, grad_user_rate_cross, grad_user_rate_own, gradients,
    smoothed_sum_rate, GradientPair, SmoothingParam,
};
pub use solver::{
    apg_solve, apg_solve_from, apg_solve_observed, initialize, Iterate, IterationRecord, SolveTrace, SolverOptions,
    Termination,
};

pub type C64 = Cx<f64>;
pub type ChannelSet64 = ChannelSet<f64>;
pub type BeamformerStack64 = BeamformerStack<f64>;
pub type PhaseVector64 = PhaseVector<f64>;
pub type RateBreakdown64 = RateBreakdown<f64>;
pub type SolverOptions64 = SolverOptions<f64>;
pub type SolveTrace64 = SolveTrace<f64>;
