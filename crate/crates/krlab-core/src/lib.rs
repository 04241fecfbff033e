//! Numerical laboratory for positive semigroups at matrix scale.
//!
//! The crate builds Metzler generators for a small zoo of structured-population
//! and mutation-selection models, computes their principal eigentriplet
//! (lambda_1, f_1, phi_1), derives machine-checkable Doeblin/Harris convergence
//! certificates, and measures the predicted long-time behaviour (exponential
//! stability, mean ergodicity, persistent oscillations) of the rescaled
//! semigroup `exp(-lambda_1 t) S_t`.

pub mod config;
pub mod eigen;
pub mod ergodic;
pub mod error;
pub mod grid;
pub mod harris;
pub mod models;
pub mod presets;
pub mod report;
pub mod semigroup;
pub mod storage;

mod generator;

pub use error::{Error, Result};
pub use generator::PositiveGenerator;
pub use grid::{bracket, pairing, weighted_norm, DualVec, NormP, StateVec, WeightedGrid};
pub use semigroup::{resolvent_solve, semigroup_kernel, step_semigroup, KernelMatrix, StepOptions};
