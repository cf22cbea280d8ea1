//! Sparse operators built from an instance: the non-backtracking matrix `B` on
//! directed edges, its 2n×2n reduction `B′ = [[0, D−I], [−I, J]]`, and the
//! Bethe Hessian `H(x) = (x²−1)I − xJ + D`.
//!
//! Directed edge `i→j` of undirected edge `e = (i, j)`, `i < j`, has index
//! `2e`; its reverse `j→i` has index `2e + 1`.

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::CbmInstance;
use crate::sparse::SparseMatrix;

/// Bijection between ordinals `0..2m` and directed edges.
#[derive(Debug, Clone)]
pub struct DirectedEdgeIndex {
    source: Vec<u32>,
    target: Vec<u32>,
    weight: Vec<i8>,
    /// Outgoing directed edges of each node, sorted by target.
    out_offsets: Vec<usize>,
    out_edges: Vec<usize>,
}

impl DirectedEdgeIndex {
    pub fn new(instance: &CbmInstance) -> Self {
        let n = instance.n();
        let m2 = 2 * instance.m();
        let mut source = Vec::with_capacity(m2);
        let mut target = Vec::with_capacity(m2);
        let mut weight = Vec::with_capacity(m2);
        for e in &instance.edges {
            source.extend([e.i, e.j]);
            target.extend([e.j, e.i]);
            weight.extend([e.w, e.w]);
        }
        let mut out_offsets = vec![0usize; n + 1];
        for &s in &source {
            out_offsets[s as usize + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
        }
        let mut fill = out_offsets.clone();
        let mut out_edges = vec![0usize; m2];
        for (k, &s) in source.iter().enumerate() {
            out_edges[fill[s as usize]] = k;
            fill[s as usize] += 1;
        }
        for i in 0..n {
            out_edges[out_offsets[i]..out_offsets[i + 1]].sort_unstable_by_key(|&k| target[k]);
        }
        Self { source, target, weight, out_offsets, out_edges }
    }

    /// Number of directed edges, `2m`.
    pub fn len(&self) -> usize {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source.is_empty()
    }

    pub fn source(&self, k: usize) -> usize {
        self.source[k] as usize
    }

    pub fn target(&self, k: usize) -> usize {
        self.target[k] as usize
    }

    pub fn weight(&self, k: usize) -> f64 {
        f64::from(self.weight[k])
    }

    /// Index of the opposite orientation.
    pub fn reverse(&self, k: usize) -> usize {
        k ^ 1
    }

    /// Directed edges leaving `i`, ordered by target.
    pub fn outgoing(&self, i: usize) -> &[usize] {
        &self.out_edges[self.out_offsets[i]..self.out_offsets[i + 1]]
    }

    /// Index of `i→j`, if the edge exists.
    pub fn index_of(&self, i: usize, j: usize) -> Option<usize> {
        let out = self.outgoing(i);
        out.binary_search_by_key(&j, |&k| self.target(k)).ok().map(|p| out[p])
    }
}

/// Everything the operators are assembled from: the signed adjacency `J`, the
/// degrees and the directed-edge index.
#[derive(Debug, Clone)]
pub struct OperatorBundle {
    n: usize,
    degrees: Vec<usize>,
    edges: DirectedEdgeIndex,
    coupling: SparseMatrix,
}

impl OperatorBundle {
    pub fn new(instance: &CbmInstance) -> Self {
        let n = instance.n();
        let edges = DirectedEdgeIndex::new(instance);
        let degrees: Vec<usize> = (0..n).map(|i| edges.outgoing(i).len()).collect();
        let mut row_offsets = Vec::with_capacity(n + 1);
        let mut cols = Vec::with_capacity(edges.len());
        let mut vals = Vec::with_capacity(edges.len());
        row_offsets.push(0);
        for i in 0..n {
            for &k in edges.outgoing(i) {
                cols.push(edges.target(k));
                vals.push(edges.weight(k));
            }
            row_offsets.push(cols.len());
        }
        let coupling = SparseMatrix::from_sorted_rows(n, n, row_offsets, cols, vals);
        Self { n, degrees, edges, coupling }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn edges(&self) -> &DirectedEdgeIndex {
        &self.edges
    }

    /// The symmetric ±1 weight matrix `J`.
    pub fn coupling(&self) -> &SparseMatrix {
        &self.coupling
    }

    /// Neighbours of `i` with the coupling to each, ordered by neighbour.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.edges.outgoing(i).iter().map(|&k| (self.edges.target(k), self.edges.weight(k)))
    }

    /// `2m / n`.
    pub fn average_degree(&self) -> f64 {
        self.edges.len() as f64 / self.n as f64
    }

    /// Apply `B` without materializing it: `(Bu)_{i→j} = Σ_{ℓ∈∂j∖i} J_jℓ u_{j→ℓ}`.
    pub fn apply_b(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        let m2 = self.edges.len();
        if u.len() != m2 || out.len() != m2 {
            return Err(Error::DimensionMismatch(format!("B is {m2}x{m2}, got vectors of length {} and {}", u.len(), out.len())));
        }
        let mut node_sum = vec![0.0; self.n];
        for (j, s) in node_sum.iter_mut().enumerate() {
            *s = self.edges.outgoing(j).iter().map(|&k| self.edges.weight(k) * u[k]).sum();
        }
        for (k, o) in out.iter_mut().enumerate() {
            // the only excluded continuation of i→j is the backtrack j→i
            let back = self.edges.reverse(k);
            *o = node_sum[self.edges.target(k)] - self.edges.weight(back) * u[back];
        }
        Ok(())
    }
}

/// Non-backtracking matrix: entry `(i→j, k→ℓ)` is `J_kℓ` when `j = k` and `i ≠ ℓ`.
pub fn build_b(bundle: &OperatorBundle) -> SparseMatrix {
    let edges = bundle.edges();
    let m2 = edges.len();
    let nnz: usize = bundle.degrees().iter().map(|&d| d * d.saturating_sub(1)).sum();
    let mut row_offsets = Vec::with_capacity(m2 + 1);
    let mut cols = Vec::with_capacity(nnz);
    let mut vals = Vec::with_capacity(nnz);
    let mut row: Vec<(usize, f64)> = Vec::new();
    row_offsets.push(0);
    for k in 0..m2 {
        let (i, j) = (edges.source(k), edges.target(k));
        row.clear();
        row.extend(
            edges
                .outgoing(j)
                .iter()
                .filter(|&&next| edges.target(next) != i)
                .map(|&next| (next, edges.weight(next))),
        );
        row.sort_unstable_by_key(|&(c, _)| c);
        for &(c, v) in &row {
            cols.push(c);
            vals.push(v);
        }
        row_offsets.push(cols.len());
    }
    SparseMatrix::from_sorted_rows(m2, m2, row_offsets, cols, vals)
}

/// `B′ = [[0, D−I], [−I, J]]`, carrying every eigenvalue of `B` other than ±1.
pub fn build_bprime(bundle: &OperatorBundle) -> SparseMatrix {
    let n = bundle.n();
    let nnz = 2 * n + bundle.coupling().nnz();
    let mut row_offsets = Vec::with_capacity(2 * n + 1);
    let mut cols = Vec::with_capacity(nnz);
    let mut vals = Vec::with_capacity(nnz);
    row_offsets.push(0);
    for (i, &d) in bundle.degrees().iter().enumerate() {
        // d = 1 leaves an explicit zero out of the pattern
        if d != 1 {
            cols.push(n + i);
            vals.push(d as f64 - 1.0);
        }
        row_offsets.push(cols.len());
    }
    for i in 0..n {
        cols.push(i);
        vals.push(-1.0);
        let (jc, jv) = bundle.coupling().row(i);
        cols.extend(jc.iter().map(|&c| n + c));
        vals.extend_from_slice(jv);
        row_offsets.push(cols.len());
    }
    SparseMatrix::from_sorted_rows(2 * n, 2 * n, row_offsets, cols, vals)
}

/// Bethe Hessian `H(x) = (x²−1)I − xJ + D`. The diagonal is always stored.
pub fn build_bethe_hessian(bundle: &OperatorBundle, x: f64) -> SparseMatrix {
    let n = bundle.n();
    let mut row_offsets = Vec::with_capacity(n + 1);
    let mut cols = Vec::with_capacity(n + bundle.coupling().nnz());
    let mut vals = Vec::with_capacity(n + bundle.coupling().nnz());
    row_offsets.push(0);
    for i in 0..n {
        let diag = x * x - 1.0 + bundle.degrees()[i] as f64;
        let (jc, jv) = bundle.coupling().row(i);
        let split = jc.partition_point(|&c| c < i);
        for (&c, &w) in jc[..split].iter().zip(&jv[..split]) {
            cols.push(c);
            vals.push(-x * w);
        }
        cols.push(i);
        vals.push(diag);
        for (&c, &w) in jc[split..].iter().zip(&jv[split..]) {
            cols.push(c);
            vals.push(-x * w);
        }
        row_offsets.push(cols.len());
    }
    SparseMatrix::from_sorted_rows(n, n, row_offsets, cols, vals)
}

/// Dense `H(λ)` at a complex argument, used to probe `det H(λ) = 0`.
pub fn bethe_hessian_dense_complex(bundle: &OperatorBundle, lambda: Complex64) -> Mat<Complex64> {
    let n = bundle.n();
    let mut h = Mat::<Complex64>::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = lambda * lambda - 1.0 + bundle.degrees()[i] as f64;
        for (j, w) in bundle.neighbors(i) {
            h[(i, j)] = -lambda * w;
        }
    }
    h
}

/// Consistency report for a real eigenpair `(λ, v′)` of `B′`.
#[derive(Debug, Clone)]
pub struct EigvecRelations {
    /// `max_i |λ v′_i − (d_i − 1) v′_{n+i}| / ‖v′‖∞`.
    pub relation_residual: f64,
    /// `‖B′v′ − λv′‖∞ / ‖v′‖∞`.
    pub bprime_residual: f64,
    /// Eigenvector of `B` rebuilt from the node block `v′_{n..2n}`.
    pub b_vector: Vec<f64>,
    /// `‖Bu − λu‖∞ / ‖u‖∞` for `u = b_vector`.
    pub b_residual: f64,
}

/// Check the node/edge eigenvector relations and lift `v′` back to an eigenvector of `B`.
///
/// With `y = v′_{n..2n}`, every edge gets the 2×2 system
/// `λ w_{i→j} + J_ij w_{j→i} = y_i`, `J_ij w_{i→j} + λ w_{j→i} = y_j`,
/// whose solution `w` propagates along incoming messages; `u_{i→j} = w_{j→i}`
/// is then an eigenvector of `B` in the row convention of [`build_b`].
pub fn bprime_eigvec_relations_check(bundle: &OperatorBundle, lambda: f64, vprime: &[f64]) -> Result<EigvecRelations> {
    let n = bundle.n();
    if vprime.len() != 2 * n {
        return Err(Error::LengthMismatch { expected: 2 * n, actual: vprime.len() });
    }
    let det = lambda * lambda - 1.0;
    if det.abs() <= 1e-12 {
        return Err(Error::ReductionAtUnit(lambda));
    }
    let inf = |v: &[f64]| v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let scale = inf(vprime).max(f64::MIN_POSITIVE);
    let (top, node) = vprime.split_at(n);

    let relation_residual = (0..n)
        .map(|i| (lambda * top[i] - (bundle.degrees()[i] as f64 - 1.0) * node[i]).abs())
        .fold(0.0, f64::max)
        / scale;

    let bp = build_bprime(bundle);
    let mut image = vec![0.0; 2 * n];
    bp.apply(vprime, &mut image);
    let bprime_residual = image.iter().zip(vprime).map(|(a, v)| (a - lambda * v).abs()).fold(0.0, f64::max) / scale;

    let edges = bundle.edges();
    let mut b_vector = vec![0.0; edges.len()];
    for (k, u) in b_vector.iter_mut().enumerate() {
        // u_{i→j} = w_{j→i} = (λ y_j − J y_i) / (λ² − 1)
        let (i, j) = (edges.source(k), edges.target(k));
        *u = (lambda * node[j] - edges.weight(k) * node[i]) / det;
    }
    let mut bu = vec![0.0; edges.len()];
    bundle.apply_b(&b_vector, &mut bu)?;
    let b_scale = inf(&b_vector).max(f64::MIN_POSITIVE);
    let b_residual = bu.iter().zip(&b_vector).map(|(a, v)| (a - lambda * v).abs()).fold(0.0, f64::max) / b_scale;

    Ok(EigvecRelations { relation_residual, bprime_residual, b_vector, b_residual })
}
