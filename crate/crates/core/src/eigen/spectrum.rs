use std::cmp::Ordering;

use num_complex::Complex64;

/// Eigenvalues of a real matrix, as returned by a dense solver.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(eigenvalues: Vec<Complex64>) -> Self {
        Self { eigenvalues }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Eigenvalues by decreasing modulus; equal moduli keep solver order.
    pub fn by_modulus(&self) -> Vec<Complex64> {
        let mut v = self.eigenvalues.clone();
        v.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
        v
    }

    pub fn max_modulus(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Eigenvalues strictly outside the disk of the given radius.
    pub fn outside(&self, radius: f64) -> Vec<Complex64> {
        self.eigenvalues.iter().copied().filter(|z| z.norm() > radius).collect()
    }

    /// Real parts of the eigenvalues whose imaginary part is within `imag_tol` of zero.
    pub fn real_eigenvalues(&self, imag_tol: f64) -> Vec<f64> {
        self.eigenvalues.iter().filter(|z| z.im.abs() <= imag_tol).map(|z| z.re).collect()
    }

    /// Every eigenvalue with nonzero imaginary part has a partner within `tol` of its conjugate.
    pub fn is_conjugate_closed(&self, tol: f64) -> bool {
        let mut upper: Vec<Complex64> = self.eigenvalues.iter().copied().filter(|z| z.im > tol).collect();
        let mut lower: Vec<Complex64> = self.eigenvalues.iter().filter(|z| z.im < -tol).map(|z| z.conj()).collect();
        if upper.len() != lower.len() {
            return false;
        }
        sort_tolerant(&mut upper, tol);
        sort_tolerant(&mut lower, tol);
        upper.iter().zip(&lower).all(|(a, b)| (a - b).norm() <= tol)
    }
}

/// Sort by `(re, im)`, treating real parts within `tol` of each other as tied.
///
/// Real parts are grouped by chaining neighbours closer than `tol`; each group
/// is ordered by imaginary part.
pub fn sort_tolerant(v: &mut [Complex64], tol: f64) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re));
    let mut start = 0;
    for k in 1..=v.len() {
        if k == v.len() || v[k].re - v[k - 1].re > tol {
            v[start..k].sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal));
            start = k;
        }
    }
}

/// Largest pairwise distance between two multisets after tolerant sorting;
/// infinite when the sizes differ.
pub fn max_matched_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    sort_tolerant(&mut a, 1e-7);
    sort_tolerant(&mut b, 1e-7);
    a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
