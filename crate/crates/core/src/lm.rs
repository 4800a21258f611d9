//! Damped least squares (Levenberg-Marquardt with Marquardt's diagonal
//! scaling) on a residual map with a finite-difference Jacobian.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;

pub(crate) struct LmOptions {
    pub max_iters: usize,
    /// Central-difference step for the Jacobian.
    pub diff_step: f64,
    /// Longest allowed step in the unknowns.
    pub max_step: f64,
}

pub(crate) struct LmOutcome {
    pub x: Vec<f64>,
    pub residual: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn norm2(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

/// Minimizes `|residual(x)|^2` from `x0` until `done(residual)` holds.
/// A residual evaluation that fails at a trial point counts as a rejected
/// step; failure at `x0` is returned.
pub(crate) fn minimize<R, D>(residual: R, x0: Vec<f64>, done: D, opts: &LmOptions) -> Result<LmOutcome>
where
    R: Fn(&[f64]) -> Result<Vec<f64>>,
    D: Fn(&[f64]) -> bool,
{
    let n = x0.len();
    let mut x = x0;
    let mut r = residual(&x)?;
    let mut lambda = 1e-3;
    let mut iterations = 0;
    while iterations < opts.max_iters {
        if done(&r) {
            return Ok(LmOutcome { x, residual: r, iterations, converged: true });
        }
        iterations += 1;

        let m = r.len();
        let mut jac = DMatrix::<f64>::zeros(m, n);
        for i in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += opts.diff_step;
            xm[i] -= opts.diff_step;
            let rp = residual(&xp)?;
            let rm = residual(&xm)?;
            for k in 0..m {
                jac[(k, i)] = (rp[k] - rm[k]) / (2.0 * opts.diff_step);
            }
        }
        let rv = DVector::from_vec(r.clone());
        let jtj = jac.transpose() * &jac;
        let grad = jac.transpose() * &rv;

        let current = norm2(&r);
        let mut accepted = false;
        // retry with heavier damping until the residual drops
        for _ in 0..30 {
            let mut a = jtj.clone();
            for i in 0..n {
                a[(i, i)] += lambda * jtj[(i, i)].max(1e-12);
            }
            let Some(step) = a.lu().solve(&(-&grad)) else {
                lambda *= 4.0;
                continue;
            };
            let len = step.norm();
            let step = if len > opts.max_step { step * (opts.max_step / len) } else { step };
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            match residual(&trial) {
                Ok(rt) if norm2(&rt) < current => {
                    x = trial;
                    r = rt;
                    lambda = (lambda / 3.0).max(1e-12);
                    accepted = true;
                    break;
                }
                _ => lambda *= 4.0,
            }
        }
        if !accepted {
            break;
        }
    }
    let converged = done(&r);
    Ok(LmOutcome { x, residual: r, iterations, converged })
}
