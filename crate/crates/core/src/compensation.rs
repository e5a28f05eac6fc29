//! Single-flip improvement of a ±1 solution.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::instance::{check_spins, primal_value, PrimalProblem};
use crate::linalg::dot;

/// Flips must lower `P` by more than this to be accepted.
pub const IMPROVE_TOL: f64 = 1e-9;
pub const PASS_CAP: usize = 100;

/// `P(x with x_i negated) − P(x) = −2 x_i ((Qx)_i − c_i)`.
pub fn flip_delta(prob: &PrimalProblem, x: &[f64], i: usize) -> f64 {
    -2.0 * x[i] * (dot(prob.q().row(i), x) - prob.c()[i])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Compensated {
    pub x: Vec<f64>,
    pub primal_value: f64,
    pub flips: usize,
    /// Passes run, including the final one that found nothing.
    pub passes: usize,
}

/// First-improvement scan over `i = 0..n`, repeated until a pass accepts no
/// flip or [`PASS_CAP`] passes have run.
pub fn compensate(prob: &PrimalProblem, x: &[f64]) -> Result<Compensated> {
    let n = prob.dim();
    check_spins(x, n)?;
    let mut x = x.to_vec();
    let mut qx = prob.q().mul_vec(&x);
    let mut flips = 0;
    let mut passes = 0;
    while passes < PASS_CAP {
        passes += 1;
        let mut improved = false;
        for i in 0..n {
            let delta = -2.0 * x[i] * (qx[i] - prob.c()[i]);
            if delta < -IMPROVE_TOL {
                let change = -2.0 * x[i];
                x[i] = -x[i];
                for (qj, qji) in qx.iter_mut().zip(prob.q().row(i)) {
                    *qj += qji * change;
                }
                flips += 1;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    Ok(Compensated {
        primal_value: primal_value(prob, &x)?,
        x,
        flips,
        passes,
    })
}
