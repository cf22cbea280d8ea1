use super::{dot, norm, random_unit, EigenResult, SolverConfig};
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// Result of [`power_leading`].
#[derive(Debug, Clone, PartialEq)]
pub enum LeadingOutcome {
    /// The dominant eigenvalue is real and was resolved to tolerance.
    Converged(EigenResult),
    /// The iterate kept turning (a dominant complex pair or a near tie), or the
    /// budget ran out. `modulus` is the observed growth rate of `‖Mᵏv‖`.
    NoRealLeader { modulus: f64, iterations: usize },
}

impl LeadingOutcome {
    pub fn converged(&self) -> Option<&EigenResult> {
        match self {
            Self::Converged(r) => Some(r),
            Self::NoRealLeader { .. } => None,
        }
    }
}

/// Stagnating windows are those whose peak angle is above this fraction of the previous peak.
const STALL_RATIO: f64 = 0.9;
const STALL_WINDOWS: usize = 8;

/// Leading (largest-modulus) eigenpair of a square sparse matrix by power iteration.
///
/// Successive unit iterates are compared by the angle between them, taken up to
/// sign so a negative real leader still converges. The angle is tracked in
/// windows of `cfg.stall_window` iterations: when the window peak stops
/// shrinking for [`STALL_WINDOWS`] windows in a row the iterate is rotating rather than
/// settling, and the solve stops with [`LeadingOutcome::NoRealLeader`].
pub fn power_leading(m: &SparseMatrix, cfg: &SolverConfig) -> Result<LeadingOutcome> {
    cfg.validate()?;
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} matrix is not square", m.nrows(), m.ncols())));
    }
    let dim = m.nrows();
    if dim == 0 {
        return Err(Error::EmptyMatrix);
    }
    let max_iter = cfg.max_iter_for(dim);
    let window = cfg.stall_window;

    let mut v = random_unit(dim, cfg.seed);
    let mut w = vec![0.0; dim];
    let mut log_growth = Vec::with_capacity(window);
    let mut prev_peak = f64::INFINITY;
    let mut peak = 0.0f64;
    let mut stalled = 0;

    for it in 1..=max_iter {
        m.apply(&v, &mut w);
        let value = dot(&v, &w);
        let residual = w.iter().zip(&v).map(|(a, x)| (a - value * x).powi(2)).sum::<f64>().sqrt();
        if cfg.accepts(residual, value) {
            return Ok(LeadingOutcome::Converged(EigenResult {
                value,
                vector: v,
                residual,
                iterations: it,
                converged: true,
            }));
        }

        let growth = norm(&w);
        if growth == 0.0 {
            // unreachable in practice: a zero image has zero residual and converges above
            break;
        }
        if log_growth.len() == window {
            log_growth.remove(0);
        }
        log_growth.push(growth.ln());

        let cos = (dot(&v, &w) / growth).abs().min(1.0);
        let angle = cos.acos();
        for (x, y) in v.iter_mut().zip(&w) {
            *x = y / growth;
        }

        peak = peak.max(angle);
        if it % window == 0 {
            stalled = if peak > STALL_RATIO * prev_peak { stalled + 1 } else { 0 };
            prev_peak = peak;
            peak = 0.0;
            if stalled >= STALL_WINDOWS {
                return Ok(no_leader(&log_growth, it));
            }
        }
    }
    Ok(no_leader(&log_growth, max_iter))
}

fn no_leader(log_growth: &[f64], iterations: usize) -> LeadingOutcome {
    let modulus = if log_growth.is_empty() {
        0.0
    } else {
        (log_growth.iter().sum::<f64>() / log_growth.len() as f64).exp()
    };
    LeadingOutcome::NoRealLeader { modulus, iterations }
}

/// Smallest eigenpair of symmetric `H` via power iteration on `c·I − H`.
///
/// `c` is the Gershgorin upper bound, so `c·I − H` is positive semidefinite and
/// its dominant eigenvalue `c − λ_min` is the one the iteration finds.
pub(crate) fn shifted_smallest(h: &SparseMatrix, cfg: &SolverConfig) -> EigenResult {
    let dim = h.nrows();
    let c = h.gershgorin_upper();
    let max_iter = cfg.max_iter_for(dim);
    let mut v = random_unit(dim, cfg.seed);
    let mut hv = vec![0.0; dim];
    let mut last = EigenResult { value: f64::NAN, vector: Vec::new(), residual: f64::INFINITY, iterations: 0, converged: false };

    for it in 1..=max_iter {
        h.apply(&v, &mut hv);
        let value = dot(&v, &hv);
        let residual = hv.iter().zip(&v).map(|(a, x)| (a - value * x).powi(2)).sum::<f64>().sqrt();
        if cfg.accepts(residual, value) || it == max_iter {
            last = EigenResult { value, vector: v, residual, iterations: it, converged: cfg.accepts(residual, value) };
            break;
        }
        // w = (cI − H) v
        for (x, y) in hv.iter_mut().zip(&v) {
            *x = c * y - *x;
        }
        let nw = norm(&hv);
        if nw == 0.0 {
            break;
        }
        for (x, y) in v.iter_mut().zip(&hv) {
            *x = y / nw;
        }
    }
    last
}
