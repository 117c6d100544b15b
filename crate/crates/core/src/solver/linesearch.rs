//! Projected-gradient Armijo backtracking.

use crate::error::{invalid, Error, Result};
use crate::scalar::{Cx, Real};

/// Backtracking constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Armijo<T> {
    /// Sufficient-increase constant in `(0, 1)`.
    pub c: T,
    /// Step shrink factor in `(0, 1)`.
    pub shrink: T,
    /// Steps below this are treated as a stall.
    pub alpha_min: T,
}

impl<T: Real> Default for Armijo<T> {
    fn default() -> Self {
        Self {
            c: T::lit(1e-4),
            shrink: T::lit(0.5),
            alpha_min: T::lit(1e-12),
        }
    }
}

impl<T: Real> Armijo<T> {
    pub fn validate(&self) -> Result<()> {
        let unit = |v: T| v > T::zero() && v < T::one();
        if !unit(self.c) {
            return Err(invalid("armijo_c", "must lie in (0, 1)"));
        }
        if !unit(self.shrink) {
            return Err(invalid("shrink", "must lie in (0, 1)"));
        }
        if !(self.alpha_min > T::zero()) {
            return Err(invalid("alpha_min", "must be positive"));
        }
        Ok(())
    }
}

/// Result of one line search. `alpha == 0` signals a stall with `x` unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchOutcome<T> {
    pub alpha: T,
    pub x: Vec<Cx<T>>,
    pub objective: T,
    pub evaluations: usize,
}

/// Largest `α ∈ {α₀ shrinkⁱ}` such that `x⁺ = project(x + α ∇)` satisfies
/// `obj(x⁺) ≥ obj(x) + (c/α) ‖x⁺ − x‖²`.
///
/// `objective_x` must be `eval(x)`. A zero gradient is accepted at `α₀`.
pub fn armijo_search<T, E, P>(
    mut eval: E,
    x: &[Cx<T>],
    objective_x: T,
    grad: &[Cx<T>],
    mut project: P,
    alpha_init: T,
    cfg: &Armijo<T>,
) -> Result<LineSearchOutcome<T>>
where
    T: Real,
    E: FnMut(&[Cx<T>]) -> Result<T>,
    P: FnMut(&mut [Cx<T>]),
{
    if !(alpha_init > T::zero()) {
        return Err(invalid("alpha_init", "must be positive"));
    }
    if grad.iter().all(|g| g.re == T::zero() && g.im == T::zero()) {
        return Ok(LineSearchOutcome {
            alpha: alpha_init,
            x: x.to_vec(),
            objective: objective_x,
            evaluations: 0,
        });
    }
    let mut alpha = alpha_init;
    let mut evaluations = 0;
    let mut cand = vec![Cx::new(T::zero(), T::zero()); x.len()];
    while alpha >= cfg.alpha_min {
        for ((c, xi), gi) in cand.iter_mut().zip(x).zip(grad) {
            *c = xi + gi * alpha;
        }
        project(&mut cand);
        let obj = eval(&cand)?;
        evaluations += 1;
        if !obj.is_finite() {
            return Err(Error::Numerical(format!("objective became non-finite at step {alpha}")));
        }
        let step: T = cand.iter().zip(x).map(|(a, b)| (a - b).norm_sqr()).sum();
        if obj >= objective_x + cfg.c / alpha * step {
            return Ok(LineSearchOutcome {
                alpha,
                x: cand,
                objective: obj,
                evaluations,
            });
        }
        alpha = alpha * cfg.shrink;
    }
    Ok(LineSearchOutcome {
        alpha: T::zero(),
        x: x.to_vec(),
        objective: objective_x,
        evaluations,
    })
}
