//! Compressed-row real sparse matrices.

use std::io::Write;

use faer::Mat;

use crate::error::{Error, Result};

/// A real matrix in compressed-row layout.
///
/// Row `r` owns `col_indices[row_offsets[r]..row_offsets[r + 1]]`, strictly
/// increasing, with the matching `values`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Wrap raw CSR arrays after checking every layout invariant.
    pub fn try_from_csr(
        nrows: usize,
        ncols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidMatrix(msg));
        if row_offsets.len() != nrows + 1 {
            return bad(format!("row_offsets has length {}, expected {}", row_offsets.len(), nrows + 1));
        }
        if row_offsets[0] != 0 || *row_offsets.last().unwrap() != col_indices.len() {
            return bad("row_offsets must start at 0 and end at nnz".into());
        }
        if col_indices.len() != values.len() {
            return bad("col_indices and values differ in length".into());
        }
        for r in 0..nrows {
            let (lo, hi) = (row_offsets[r], row_offsets[r + 1]);
            if lo > hi {
                return bad(format!("row_offsets decrease at row {r}"));
            }
            let cols = &col_indices[lo..hi];
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return bad(format!("columns of row {r} are not strictly increasing"));
            }
            if cols.last().is_some_and(|&c| c >= ncols) {
                return bad(format!("column index out of range in row {r}"));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return bad("non-finite value".into());
        }
        Ok(Self { nrows, ncols, row_offsets, col_indices, values })
    }

    /// Assemble from `(row, col, value)` triplets; repeated positions are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        if let Some(&(r, c, _)) = triplets.iter().find(|&&(r, c, _)| r >= nrows || c >= ncols) {
            return Err(Error::InvalidMatrix(format!("triplet ({r}, {c}) outside {nrows}x{ncols}")));
        }
        let mut sorted = triplets.to_vec();
        sorted.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_offsets = vec![0usize; nrows + 1];
        let mut col_indices = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last = None;
        for (r, c, v) in sorted {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_indices.push(c);
                values.push(v);
                row_offsets[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..nrows {
            row_offsets[r + 1] += row_offsets[r];
        }
        Self::try_from_csr(nrows, ncols, row_offsets, col_indices, values)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Builder used by the operator constructors, which emit rows in order with sorted columns.
    pub(crate) fn from_sorted_rows(nrows: usize, ncols: usize, row_offsets: Vec<usize>, col_indices: Vec<usize>, values: Vec<f64>) -> Self {
        debug_assert!(Self::try_from_csr(nrows, ncols, row_offsets.clone(), col_indices.clone(), values.clone()).is_ok());
        Self { nrows, ncols, row_offsets, col_indices, values }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `r`.
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.row_offsets[r], self.row_offsets[r + 1]);
        (&self.col_indices[lo..hi], &self.values[lo..hi])
    }

    /// Stored value at `(r, c)`, zero when absent.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        cols.binary_search(&c).map_or(0.0, |k| vals[k])
    }

    /// `M v`, allocating the output.
    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.nrows];
        self.matvec_into(v, &mut out)?;
        Ok(out)
    }

    /// `out = M v`. Reentrant: shared matrices can serve concurrent callers with distinct buffers.
    pub fn matvec_into(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        if v.len() != self.ncols || out.len() != self.nrows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix applied to vector of length {} into buffer of length {}",
                self.nrows,
                self.ncols,
                v.len(),
                out.len()
            )));
        }
        self.apply(v, out);
        Ok(())
    }

    /// Unchecked kernel behind [`matvec_into`](Self::matvec_into).
    #[inline]
    pub(crate) fn apply(&self, v: &[f64], out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate() {
            let (lo, hi) = (self.row_offsets[r], self.row_offsets[r + 1]);
            *o = self.col_indices[lo..hi]
                .iter()
                .zip(&self.values[lo..hi])
                .map(|(&c, &a)| a * v[c])
                .sum();
        }
    }

    /// Exact structural and numerical symmetry.
    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.nrows).all(|r| {
                let (cols, vals) = self.row(r);
                cols.iter().zip(vals).all(|(&c, &v)| {
                    let (tc, tv) = self.row(c);
                    tc.binary_search(&r).is_ok_and(|k| tv[k] == v)
                })
            })
    }

    /// Upper bound on every eigenvalue of a symmetric matrix: `max_i (a_ii + Σ_{j≠i} |a_ij|)`.
    pub fn gershgorin_upper(&self) -> f64 {
        (0..self.nrows)
            .map(|r| {
                let (cols, vals) = self.row(r);
                cols.iter().zip(vals).map(|(&c, &v)| if c == r { v } else { v.abs() }).sum::<f64>()
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn to_dense(&self) -> Mat<f64> {
        let mut m = Mat::<f64>::zeros(self.nrows, self.ncols);
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                m[(r, c)] = v;
            }
        }
        m
    }

    /// Coordinate text dump: a `nrows ncols nnz` header, then one `row col value` line per entry.
    pub fn write_coordinate(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "{} {} {}", self.nrows, self.ncols, self.nnz())?;
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (c, v) in cols.iter().zip(vals) {
                writeln!(w, "{r} {c} {v}")?;
            }
        }
        Ok(())
    }
}
