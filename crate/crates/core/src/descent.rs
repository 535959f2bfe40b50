//! Gradient descent with Armijo backtracking.

use nalgebra::DVector;

use crate::error::{GmrError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentConfig {
    /// Stop once the coordinate gradient norm falls below this.
    pub grad_tol: f64,
    pub max_iters: usize,
    /// Sufficient-decrease constant of the Armijo condition.
    pub armijo_c: f64,
    pub backtrack_factor: f64,
    /// Trial step of the first line search.
    pub init_step: f64,
}

impl Default for DescentConfig {
    fn default() -> Self {
        Self {
            grad_tol: 1e-8,
            max_iters: 5000,
            armijo_c: 1e-4,
            backtrack_factor: 0.5,
            init_step: 1.0,
        }
    }
}

impl DescentConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = self.grad_tol > 0.0
            && self.max_iters > 0
            && self.armijo_c > 0.0
            && self.init_step > 0.0;
        if !positive {
            return Err(GmrError::InvalidConfig(
                "descent parameters must be positive".into(),
            ));
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return Err(GmrError::InvalidConfig(
                "backtrack_factor must lie in (0, 1)".into(),
            ));
        }
        if self.armijo_c >= 1.0 {
            return Err(GmrError::InvalidConfig("armijo_c must be < 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub(crate) struct DescentOutcome {
    pub x: DVector<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after each accepted step, starting with the initial value.
    pub history: Vec<f64>,
}

const MAX_BACKTRACKS: usize = 80;
const MAX_STEP: f64 = 1e12;

/// Minimizes `objective` from `x0`.
///
/// `objective` returns the value and gradient at a point, or `None` when the
/// point is outside the domain (treated as a failed trial). The first trial
/// step of each line search is the Barzilai–Borwein step from the previous
/// iteration (the configured `init_step` on the first), then shrinks by
/// `backtrack_factor` until the Armijo condition holds. Accepted steps never
/// increase the objective.
pub(crate) fn minimize<F>(mut objective: F, x0: DVector<f64>, cfg: &DescentConfig) -> Result<DescentOutcome>
where
    F: FnMut(&DVector<f64>) -> Option<(f64, DVector<f64>)>,
{
    cfg.validate()?;
    let (mut value, mut grad) = objective(&x0).ok_or_else(|| {
        GmrError::InvalidConfig("descent started outside the objective domain".into())
    })?;
    let mut x = x0;
    let mut history = vec![value];
    let mut step = cfg.init_step;
    let mut iterations = 0;
    let mut grad_norm = grad.norm();

    while grad_norm >= cfg.grad_tol && iterations < cfg.max_iters {
        let slope = grad_norm * grad_norm;
        let mut t = step;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let trial = &x - &grad * t;
            if trial == x {
                // Step below the resolution of x.
                break;
            }
            if let Some((v, g)) = objective(&trial) {
                if v.is_finite() && v <= value - cfg.armijo_c * t * slope {
                    accepted = Some((trial, v, g));
                    break;
                }
            }
            t *= cfg.backtrack_factor;
        }
        let Some((x_new, v_new, g_new)) = accepted else {
            // No representable decrease along the gradient.
            break;
        };

        let s = &x_new - &x;
        let y = &g_new - &grad;
        let sy = s.dot(&y);
        step = if sy > 0.0 {
            (s.norm_squared() / sy).min(MAX_STEP)
        } else {
            (t / cfg.backtrack_factor).min(MAX_STEP)
        };

        x = x_new;
        value = v_new;
        grad = g_new;
        grad_norm = grad.norm();
        history.push(value);
        iterations += 1;
    }

    Ok(DescentOutcome {
        x,
        value,
        iterations,
        converged: grad_norm < cfg.grad_tol,
        history,
    })
}
