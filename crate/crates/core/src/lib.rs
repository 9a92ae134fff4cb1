//! Randomized Bregman-Kaczmarz methods for
//! `min λ‖x‖₁ + ½‖x‖₂²  subject to  Ax = b`.
//!
//! The crate provides the plain randomized Bregman-Kaczmarz iteration (BK),
//! its accelerated variant (ARBK) that transfers accelerated dual coordinate
//! descent into the primal space, the dual accelerated coordinate descent
//! itself (ACD, used as a cross-check), and a small experiment harness that
//! generates sparse test problems and aggregates convergence curves across
//! seeded trials.
//!
//! ```
//! use arbk::experiments::{generate, ProblemSpec};
//! use arbk::solvers::{run, Method, SolverOptions, StoppingRule};
//!
//! let problem = generate(&ProblemSpec::new(60, 30, 1.0, 7)?)?;
//! let out = run(
//!     Method::Arbk,
//!     &problem.sys,
//!     &problem.potential(),
//!     &problem.x_hat,
//!     7,
//!     StoppingRule::epochs(50),
//!     &SolverOptions::default(),
//! )?;
//! let first = out.log.records.first().unwrap().metrics.rel_residual;
//! let last = out.log.last().unwrap().metrics.rel_residual;
//! assert!(last < first);
//! # Ok::<(), arbk::Error>(())
//! ```

pub mod error;
pub mod experiments;
pub mod linsys;
pub mod potentials;
pub mod solvers;
mod vecops;

pub use error::{Error, Result};

/// Library version recorded in experiment metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use linsys::{LinearSystem, ProblemFile, RowSampler};
pub use potentials::{BregmanPoint, Potential};
pub use solvers::{Method, StoppingRule};
