//! Thick-restart Lanczos for the smallest eigenpair of a symmetric matrix.
//!
//! Each cycle grows an orthonormal basis `V` (full reorthogonalization, two
//! Gram-Schmidt passes) and the projection `T = VᵀHV`. At restart the `keep`
//! lowest Ritz vectors and the residual direction form the new basis; `T`
//! becomes `diag(θ)` bordered by the couplings `β·y_last`.

use faer::{Mat, Side};

use super::{dot, norm, random_unit, EigenResult, SolverConfig};
use crate::sparse::SparseMatrix;

const MAX_BASIS: usize = 64;
const MAX_KEEP: usize = 24;

pub(crate) fn smallest(h: &SparseMatrix, cfg: &SolverConfig) -> EigenResult {
    let n = h.nrows();
    let budget = cfg.max_iter_for(n);
    let basis = n.min(MAX_BASIS);
    let keep = MAX_KEEP.min(basis.saturating_sub(2)).max(1);

    // columns 0..=basis, each of length n
    let mut v = vec![0.0; (basis + 1) * n];
    let mut t = Mat::<f64>::zeros(basis, basis);
    v[..n].copy_from_slice(&random_unit(n, cfg.seed));
    let mut w = vec![0.0; n];
    let mut start = 0;
    let mut matvecs = 0;
    let mut refill = 0u64;
    let mut best: Option<EigenResult> = None;

    loop {
        let mut beta = 0.0;
        for j in start..basis {
            h.apply(&v[j * n..(j + 1) * n], &mut w);
            matvecs += 1;
            let coef = orthogonalize(&v[..(j + 1) * n], n, &mut w);
            for (i, c) in coef.into_iter().enumerate() {
                t[(i, j)] = c;
                t[(j, i)] = c;
            }
            beta = norm(&w);
            let scale = (0..=j).map(|i| t[(i, j)].abs()).fold(1.0, f64::max);
            if beta <= 1e-12 * scale {
                // invariant subspace: continue with a fresh direction, uncoupled
                beta = 0.0;
                if j + 1 == n {
                    break;
                }
                refill += 1;
                w.copy_from_slice(&random_unit(n, cfg.seed ^ refill.rotate_left(17)));
                orthogonalize(&v[..(j + 1) * n], n, &mut w);
                let nw = norm(&w);
                w.iter_mut().for_each(|x| *x /= nw);
                v[(j + 1) * n..(j + 2) * n].copy_from_slice(&w);
            } else {
                let (_, next) = v.split_at_mut((j + 1) * n);
                for (x, y) in next[..n].iter_mut().zip(&w) {
                    *x = y / beta;
                }
            }
        }

        let eig = t.self_adjoint_eigen(Side::Lower).expect("small symmetric eigenproblem");
        let theta: Vec<f64> = (0..basis).map(|i| eig.S()[i]).collect();
        let y = eig.U();

        let estimate = (beta * y[(basis - 1, 0)]).abs();
        let exhausted = matvecs >= budget || basis == n;
        if cfg.accepts(estimate, theta[0]) || exhausted {
            let mut x = vec![0.0; n];
            for i in 0..basis {
                axpy(y[(i, 0)], &v[i * n..(i + 1) * n], &mut x);
            }
            let nx = norm(&x);
            x.iter_mut().for_each(|a| *a /= nx);
            h.apply(&x, &mut w);
            let value = dot(&x, &w);
            let residual = w.iter().zip(&x).map(|(a, b)| (a - value * b).powi(2)).sum::<f64>().sqrt();
            let candidate = EigenResult { value, vector: x, residual, iterations: matvecs, converged: cfg.accepts(residual, value) };
            if candidate.converged || exhausted {
                return match best {
                    Some(b) if !candidate.converged && b.residual < candidate.residual => b,
                    _ => candidate,
                };
            }
            best = Some(candidate);
        }

        // restart: V ← [V Y_keep, v_basis]
        let mut fresh = vec![0.0; (keep + 1) * n];
        for k in 0..keep {
            let col = &mut fresh[k * n..(k + 1) * n];
            for i in 0..basis {
                axpy(y[(i, k)], &v[i * n..(i + 1) * n], col);
            }
        }
        fresh[keep * n..].copy_from_slice(&v[basis * n..(basis + 1) * n]);
        v[..(keep + 1) * n].copy_from_slice(&fresh);
        t.fill(0.0);
        for k in 0..keep {
            t[(k, k)] = theta[k];
            let c = beta * y[(basis - 1, k)];
            t[(keep, k)] = c;
            t[(k, keep)] = c;
        }
        start = keep;
    }
}

/// Project `w` off the `cols.len() / n` orthonormal columns in `cols`, twice.
/// Returns the accumulated coefficients.
fn orthogonalize(cols: &[f64], n: usize, w: &mut [f64]) -> Vec<f64> {
    let count = cols.len() / n;
    let mut coef = vec![0.0; count];
    for _ in 0..2 {
        for (i, c) in coef.iter_mut().enumerate() {
            let col = &cols[i * n..(i + 1) * n];
            let d = dot(col, w);
            *c += d;
            axpy(-d, col, w);
        }
    }
    coef
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}
