//! Dense eigenvalue oracles for small problems (tests and spectrum figures).

use faer::{MatRef, Side};
use num_complex::Complex64;

use super::Spectrum;
use crate::error::{Error, Result};
use crate::model::CbmInstance;
use crate::operators::{build_bprime, OperatorBundle};

pub const DEFAULT_DENSE_CAP: usize = 5000;

/// All eigenvalues of a real square matrix.
pub fn dense_spectrum(m: MatRef<'_, f64>) -> Result<Spectrum> {
    dense_spectrum_capped(m, DEFAULT_DENSE_CAP)
}

pub fn dense_spectrum_capped(m: MatRef<'_, f64>, cap: usize) -> Result<Spectrum> {
    check_square(m.nrows(), m.ncols(), cap)?;
    if m.nrows() == 0 {
        return Ok(Spectrum::new(Vec::new()));
    }
    let eigenvalues = m.eigenvalues().map_err(|e| Error::DenseSolver(format!("{e:?}")))?;
    Ok(Spectrum::new(eigenvalues))
}

/// Eigenvalues of a real symmetric matrix, ascending. Only the lower triangle is read.
pub fn dense_symmetric_eigenvalues(m: MatRef<'_, f64>) -> Result<Vec<f64>> {
    check_square(m.nrows(), m.ncols(), DEFAULT_DENSE_CAP)?;
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    m.self_adjoint_eigenvalues(Side::Lower).map_err(|e| Error::DenseSolver(format!("{e:?}")))
}

/// Singular values of a complex matrix, descending.
pub fn singular_values_complex(m: MatRef<'_, Complex64>) -> Result<Vec<f64>> {
    m.singular_values().map_err(|e| Error::DenseSolver(format!("{e:?}")))
}

/// `|λ₂|` of `B′`: the second largest eigenvalue modulus of its dense spectrum.
pub fn second_eigenvalue_bound(instance: &CbmInstance) -> Result<f64> {
    let bp = build_bprime(&OperatorBundle::new(instance)).to_dense();
    let spectrum = dense_spectrum(bp.as_ref())?;
    Ok(spectrum.by_modulus().get(1).map_or(0.0, |z| z.norm()))
}

fn check_square(rows: usize, cols: usize, cap: usize) -> Result<()> {
    if rows != cols {
        return Err(Error::DimensionMismatch(format!("{rows}x{cols} matrix is not square")));
    }
    if rows > cap {
        return Err(Error::DenseCapExceeded { dim: rows, cap });
    }
    Ok(())
}
