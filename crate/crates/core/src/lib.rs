//! Community detection in the censored block model: instance generation, the
//! non-backtracking and Bethe Hessian operators, sparse and dense eigensolvers,
//! spectral detection, belief propagation and population dynamics.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eigen;
pub mod error;
pub mod inference;
pub mod model;
pub mod operators;
pub mod rng;
pub mod sparse;

pub use eigen::{EigenResult, LeadingOutcome, SolverConfig, Spectrum, SymmetricStrategy};
pub use error::{Error, Result};
pub use inference::{detect, DetectOptions, DetectionOutcome, Method};
pub use model::{CbmInstance, CbmParams, Edge, Labeling};
pub use operators::OperatorBundle;
pub use sparse::SparseMatrix;
