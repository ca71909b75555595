//! Phase retrieval with the Griffin-Lim family of algorithms.
//!
//! Given magnitudes `s` of the coefficients of an injective linear transform
//! `T`, the solvers look for `c ∈ range(T)` whose magnitudes match `s` as well
//! as possible:
//!
//! * [`linops`]: the transform (dense matrix or discrete Gabor), its
//!   pseudo-inverse and the range projection `P_C1`.
//! * [`magproj`]: the magnitude set `C2`, its closed-form projection and distance.
//! * [`solvers`]: GLA, FGLA, AGLA, RAAR and the Difference Map with per-iteration traces.
//! * [`guarantees`]: the parameter gate and descent constants for AGLA/FGLA.
//! * [`metrics`]: SSNR, residuals, brute-force oracles and the descent audit.
//! * [`signal`] and [`trace_io`]: inputs, initializations and trace files.

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod guarantees;
pub mod linops;
pub mod magproj;
pub mod metrics;
pub mod signal;
pub mod solvers;
pub mod trace_io;
pub mod vector;

pub use error::{Error, Result};
pub use guarantees::{gate, GateVerdict};
pub use linops::{LinearTransform, WindowKind};
pub use magproj::MagnitudeSpec;
pub use num_complex::Complex64;
pub use solvers::{run, run_monitored, Algorithm, SolverParams, Trace, TraceRecord};
pub use vector::{CoefVec, SignalVec};
