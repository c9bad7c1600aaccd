//! Certified local-to-global frame bounds.
//!
//! The crate decides when families of local frames glue into global frames
//! and attaches bounds to the answer:
//!
//! * [`linalg`]: dense symmetric eigen-extremes, SPD solves, SVD;
//! * [`frames`]: optimal frame bounds, canonical duals, reconstruction;
//! * [`projectors`]: fusion bounds, completeness, banded commuting families
//!   and their disjointification;
//! * [`local_global`]: the operator and envelope gluing routes;
//! * [`dynsamp`]: dynamical sampling with convolution kernels on ℤ;
//! * [`cli`]: spec files, reports and the command runners used by the
//!   `framecast` binary.

pub mod cli;
pub mod dynsamp;
pub mod error;
pub mod frames;
pub mod linalg;
pub mod local_global;
pub mod projectors;

pub use error::{Error, Result};
pub use frames::{FrameBounds, Provenance, VectorSystem};
pub use linalg::{Matrix, DEFAULT_TOL};
