//! Row-action solvers for `min f(x) s.t. Ax = b`.
//!
//! * [`BkState`]: randomized Bregman-Kaczmarz.
//! * [`ArbkState`]: its accelerated variant, driven by a [`ThetaSchedule`].
//! * [`AcdState`]: accelerated coordinate descent on the dual, kept as an
//!   independent reference for the accelerated primal iteration.
//!
//! [`run`] wraps any of them in the epoch loop used by the experiments.

mod acd;
mod arbk;
mod bk;
mod theta;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use acd::AcdState;
pub use arbk::ArbkState;
pub use bk::BkState;
pub use theta::{next_theta, ThetaSchedule};

use crate::error::{Error, Result};
use crate::experiments::{metrics, EpochRecord, TrialLog};
use crate::linsys::{LinearSystem, RowSampler};
use crate::potentials::Potential;

/// A single-row iteration that can be driven by the epoch loop.
pub trait RowAction {
    fn step(&mut self, sys: &LinearSystem, p: &Potential, i: usize) -> Result<()>;

    /// Current dual image `x*_k` in `ℝⁿ`.
    fn dual_image(&self, sys: &LinearSystem) -> Vec<f64>;

    fn iterations(&self) -> u64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "acd-dual")]
    AcdDual,
    #[serde(rename = "arbk")]
    Arbk,
    #[serde(rename = "bk")]
    Bk,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::AcdDual, Method::Arbk, Method::Bk];

    pub fn name(self) -> &'static str {
        match self {
            Method::AcdDual => "acd-dual",
            Method::Arbk => "arbk",
            Method::Bk => "bk",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bk" => Ok(Method::Bk),
            "arbk" => Ok(Method::Arbk),
            "acd-dual" | "acd_dual" => Ok(Method::AcdDual),
            other => Err(Error::InvalidArgument(format!(
                "unknown method '{other}' (expected bk, arbk or acd-dual)"
            ))),
        }
    }
}

/// Stop after `max_epochs` epochs or once `‖Ax − b‖/‖b‖ ≤ residual_tol`.
///
/// The residual is evaluated once per epoch of `m` row steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StoppingRule {
    pub max_epochs: usize,
    pub residual_tol: f64,
}

impl StoppingRule {
    pub fn epochs(max_epochs: usize) -> Self {
        Self {
            max_epochs,
            residual_tol: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_epochs == 0 {
            return Err(Error::InvalidArgument(
                "max_epochs must be at least 1".into(),
            ));
        }
        if self.residual_tol.is_nan() || self.residual_tol < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "residual tolerance must be nonnegative, got {}",
                self.residual_tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolverOptions {
    /// Initial momentum weight; defaults to `1/m`.
    pub theta0: Option<f64>,
    /// Hold θ fixed at `theta0` (ARBK and ACD only).
    pub constant_theta: bool,
    /// Initial dual image `x*_0` for BK and ARBK; defaults to zero.
    pub x_star0: Option<Vec<f64>>,
    /// Initial dual iterate `y_0` for ACD; defaults to zero.
    pub y0: Option<Vec<f64>>,
}

impl SolverOptions {
    pub fn schedule(&self, rows: usize) -> Result<ThetaSchedule> {
        let theta0 = self.theta0.unwrap_or(1.0 / rows as f64);
        if self.constant_theta {
            ThetaSchedule::constant(theta0)
        } else {
            ThetaSchedule::new(theta0)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    /// Final primal iterate `x_k = ∇f*(x*_k)`.
    pub x: Vec<f64>,
    pub x_star: Vec<f64>,
    pub log: TrialLog,
    pub iterations: u64,
    pub converged: bool,
}

/// Runs `method` from the configured start, drawing rows from a
/// [`RowSampler`] seeded with `seed`, and logs metrics against `x_hat` once
/// per epoch (epoch 0 is the starting point).
pub fn run(
    method: Method,
    sys: &LinearSystem,
    p: &Potential,
    x_hat: &[f64],
    seed: u64,
    stop: StoppingRule,
    opts: &SolverOptions,
) -> Result<RunOutcome> {
    stop.validate()?;
    let n = sys.cols();
    let x_star0 = match &opts.x_star0 {
        Some(v) if v.len() != n => {
            return Err(Error::DimensionMismatch {
                what: "initial x_star",
                expected: n,
                found: v.len(),
            })
        }
        Some(v) => v.clone(),
        None => vec![0.0; n],
    };
    let sampler = RowSampler::new(sys, seed);
    match method {
        Method::Bk => {
            let state = BkState::new(p, x_star0);
            drive(method, state, sys, p, x_hat, seed, sampler, stop)
        }
        Method::Arbk => {
            let state = ArbkState::new(x_star0, opts.schedule(sys.rows())?);
            drive(method, state, sys, p, x_hat, seed, sampler, stop)
        }
        Method::AcdDual => {
            let y0 = match &opts.y0 {
                Some(v) if v.len() != sys.rows() => {
                    return Err(Error::DimensionMismatch {
                        what: "initial y",
                        expected: sys.rows(),
                        found: v.len(),
                    })
                }
                Some(v) => v.clone(),
                None => vec![0.0; sys.rows()],
            };
            let state = AcdState::new(y0, n, opts.schedule(sys.rows())?);
            drive(method, state, sys, p, x_hat, seed, sampler, stop)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn drive<S: RowAction>(
    method: Method,
    mut state: S,
    sys: &LinearSystem,
    p: &Potential,
    x_hat: &[f64],
    seed: u64,
    mut sampler: RowSampler,
    stop: StoppingRule,
) -> Result<RunOutcome> {
    let mut log = TrialLog::new(method, seed);
    let mut x_star = state.dual_image(sys);
    let mut x = p.conj_grad(&x_star);
    let m0 = metrics(sys, p, &x, &x_star, x_hat)?;
    log.push(EpochRecord::new(0, m0));
    let mut converged = m0.rel_residual <= stop.residual_tol;

    let mut epoch = 0;
    while !converged && epoch < stop.max_epochs {
        for _ in 0..sys.rows() {
            let i = sampler.sample();
            state.step(sys, p, i)?;
        }
        epoch += 1;
        x_star = state.dual_image(sys);
        if x_star.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                iterations: state.iterations(),
            });
        }
        x = p.conj_grad(&x_star);
        let me = metrics(sys, p, &x, &x_star, x_hat)?;
        log.push(EpochRecord::new(epoch, me));
        converged = me.rel_residual <= stop.residual_tol;
    }

    Ok(RunOutcome {
        x,
        x_star,
        log,
        iterations: state.iterations(),
        converged,
    })
}
