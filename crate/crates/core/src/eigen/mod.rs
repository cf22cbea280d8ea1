//! Eigensolvers: power iteration for the leading eigenpair of a general sparse
//! matrix, extreme eigenpairs of sparse symmetric matrices, and dense oracles.

mod dense;
mod export;
mod lanczos;
mod power;
mod spectrum;

pub use dense::{
    dense_spectrum, dense_spectrum_capped, dense_symmetric_eigenvalues, second_eigenvalue_bound,
    singular_values_complex, DEFAULT_DENSE_CAP,
};
pub use export::{render_spectrum_svg, write_spectrum_csv};
pub use power::{power_leading, LeadingOutcome};
pub use spectrum::{max_matched_distance, sort_tolerant, Spectrum};

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// A computed eigenpair.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub value: f64,
    /// Unit 2-norm.
    pub vector: Vec<f64>,
    /// `‖Mv − λv‖₂`.
    pub residual: f64,
    /// Matrix-vector products spent.
    pub iterations: usize,
    /// `residual ≤ tol · max(|value|, 1)`.
    pub converged: bool,
}

/// How [`smallest_symmetric`] reaches the bottom of the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SymmetricStrategy {
    /// Power iteration on `c·I − H` with `c` the Gershgorin upper bound.
    ShiftPower,
    /// Thick-restart Lanczos with full reorthogonalization.
    #[default]
    Lanczos,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Relative residual tolerance.
    pub tol: f64,
    /// Matrix-vector product budget; `None` picks [`default_max_iter`] for the dimension.
    pub max_iter: Option<usize>,
    /// Seed of the start vector.
    pub seed: u64,
    pub symmetric: SymmetricStrategy,
    /// Power-iteration stall window, in iterations.
    pub stall_window: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: None, seed: 0, symmetric: SymmetricStrategy::default(), stall_window: 50 }
    }
}

impl SolverConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == Some(0) {
            return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
        }
        if self.stall_window == 0 {
            return Err(Error::InvalidParameter("stall_window must be at least 1".into()));
        }
        Ok(())
    }

    pub fn max_iter_for(&self, dim: usize) -> usize {
        self.max_iter.unwrap_or_else(|| default_max_iter(dim))
    }

    fn accepts(&self, residual: f64, value: f64) -> bool {
        residual <= self.tol * value.abs().max(1.0)
    }
}

/// `10·⌈ln(dim) / 0.01⌉`, at least 2000: enough to resolve gap ratios up to 0.99.
pub fn default_max_iter(dim: usize) -> usize {
    const GAP_FLOOR: f64 = 0.01;
    let steps = ((dim.max(2) as f64).ln() / GAP_FLOOR).ceil() as usize;
    (10 * steps).max(2000)
}

/// Algebraically smallest eigenpair of a symmetric sparse matrix.
pub fn smallest_symmetric(h: &SparseMatrix, cfg: &SolverConfig) -> Result<EigenResult> {
    cfg.validate()?;
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} matrix is not square", h.nrows(), h.ncols())));
    }
    if h.nrows() == 0 {
        return Err(Error::EmptyMatrix);
    }
    if !h.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    Ok(match cfg.symmetric {
        SymmetricStrategy::ShiftPower => power::shifted_smallest(h, cfg),
        SymmetricStrategy::Lanczos => lanczos::smallest(h, cfg),
    })
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn random_unit(dim: usize, seed: u64) -> Vec<f64> {
    use rand::Rng;
    let mut rng = crate::rng::substream(seed, crate::rng::tag::START_VECTOR, dim as u64);
    let mut v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    v
}

/// `‖Mv − λv‖₂`, recomputed from scratch.
pub fn residual_norm(m: &SparseMatrix, value: f64, vector: &[f64]) -> Result<f64> {
    let mv = m.matvec(vector)?;
    Ok(mv.iter().zip(vector).map(|(a, v)| (a - value * v).powi(2)).sum::<f64>().sqrt())
}
