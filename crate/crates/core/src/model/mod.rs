//! The censored block model: parameters, planted instances, thresholds and the
//! overlap metric.

mod format;
mod generate;

pub use format::{read_instance, write_instance, parse_instance, render_instance, FORMAT_MAGIC};
pub use generate::generate;

use crate::error::{Error, Result};

/// A ±1 label. Stored as `i8` so instances with 10⁵ nodes stay compact.
pub type Spin = i8;

/// Generation parameters of one instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CbmParams {
    /// Number of nodes.
    pub n: usize,
    /// Target average degree; each pair is an edge with probability `alpha / n`.
    pub alpha: f64,
    /// Probability that an observed edge sign disagrees with `sigma_i * sigma_j`.
    pub epsilon: f64,
    pub seed: u64,
}

impl CbmParams {
    pub fn new(n: usize, alpha: f64, epsilon: f64, seed: u64) -> Result<Self> {
        let params = Self { n, alpha, epsilon, seed };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {}", self.alpha)));
        }
        if self.alpha / self.n as f64 > 1.0 {
            return Err(Error::InvalidParameter(format!(
                "edge probability alpha/n = {} exceeds 1",
                self.alpha / self.n as f64
            )));
        }
        check_epsilon(self.epsilon)
    }

    /// Edge probability `alpha / n`.
    pub fn edge_probability(&self) -> f64 {
        self.alpha / self.n as f64
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&epsilon) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in [0, 0.5], got {epsilon}")));
    }
    Ok(())
}

/// One observed edge `(i, j)` with `i < j` and sign `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub i: u32,
    pub j: u32,
    pub w: Spin,
}

/// A planted instance: labels, censored edges and the parameters that made them.
///
/// Immutable once built; share it freely between threads.
#[derive(Debug, Clone, PartialEq)]
pub struct CbmInstance {
    pub params: CbmParams,
    pub sigma: Vec<Spin>,
    pub edges: Vec<Edge>,
}

impl CbmInstance {
    /// Build an instance from explicit parts, checking every structural invariant.
    pub fn from_parts(params: CbmParams, sigma: Vec<Spin>, edges: Vec<Edge>) -> Result<Self> {
        check_epsilon(params.epsilon)?;
        if sigma.len() != params.n {
            return Err(Error::LengthMismatch { expected: params.n, actual: sigma.len() });
        }
        if let Some(s) = sigma.iter().find(|s| !matches!(s, -1 | 1)) {
            return Err(Error::InvalidParameter(format!("label {s} is not ±1")));
        }
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        for e in &edges {
            if e.i >= e.j || e.j as usize >= params.n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({}, {}) must satisfy i < j < n = {}",
                    e.i, e.j, params.n
                )));
            }
            if !matches!(e.w, -1 | 1) {
                return Err(Error::InvalidParameter(format!("edge weight {} is not ±1", e.w)));
            }
            if !seen.insert((e.i, e.j)) {
                return Err(Error::InvalidParameter(format!("duplicate edge ({}, {})", e.i, e.j)));
            }
        }
        Ok(Self { params, sigma, edges })
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn truth(&self) -> Labeling {
        Labeling { values: self.sigma.clone() }
    }

    /// Average degree `2m / n` of the realized graph.
    pub fn empirical_alpha(&self) -> f64 {
        empirical_alpha(self)
    }

    /// Degree of every node.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0usize; self.n()];
        for e in &self.edges {
            d[e.i as usize] += 1;
            d[e.j as usize] += 1;
        }
        d
    }

    /// The `k`-core: repeatedly strip nodes of degree below `k`, then relabel the
    /// survivors `0..n'` in their original order. `alpha` becomes the core's
    /// average degree. `None` when nothing survives.
    pub fn k_core(&self, k: usize) -> Option<CbmInstance> {
        let mut deg = self.degrees();
        let mut adj = vec![Vec::new(); self.n()];
        for e in &self.edges {
            adj[e.i as usize].push(e.j as usize);
            adj[e.j as usize].push(e.i as usize);
        }
        let mut alive = vec![true; self.n()];
        let mut stack: Vec<usize> = (0..self.n()).filter(|&i| deg[i] < k).collect();
        while let Some(i) = stack.pop() {
            if !alive[i] {
                continue;
            }
            alive[i] = false;
            for &j in &adj[i] {
                if alive[j] {
                    deg[j] -= 1;
                    if deg[j] < k {
                        stack.push(j);
                    }
                }
            }
        }
        let mut relabel = vec![u32::MAX; self.n()];
        let mut sigma = Vec::new();
        for i in (0..self.n()).filter(|&i| alive[i]) {
            relabel[i] = sigma.len() as u32;
            sigma.push(self.sigma[i]);
        }
        if sigma.is_empty() {
            return None;
        }
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .filter(|e| alive[e.i as usize] && alive[e.j as usize])
            .map(|e| Edge { i: relabel[e.i as usize], j: relabel[e.j as usize], w: e.w })
            .collect();
        let n = sigma.len();
        let alpha = (2.0 * edges.len() as f64 / n as f64).max(f64::MIN_POSITIVE);
        let params = CbmParams { n, alpha, ..self.params };
        Some(CbmInstance { params, sigma, edges })
    }
}

/// An assignment of ±1 labels to nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    pub values: Vec<Spin>,
}

impl Labeling {
    pub fn new(values: Vec<Spin>) -> Result<Self> {
        if let Some(s) = values.iter().find(|s| !matches!(s, -1 | 1)) {
            return Err(Error::InvalidParameter(format!("label {s} is not ±1")));
        }
        Ok(Self { values })
    }

    /// Labels from the signs of a real vector, with `sign(0) = +1`.
    pub fn from_signs(x: &[f64]) -> Self {
        Self { values: x.iter().map(|&v| sign(v)).collect() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn flipped(&self) -> Self {
        Self { values: self.values.iter().map(|s| -s).collect() }
    }
}

/// Sign of a real number with the convention `sign(0) = +1`.
pub fn sign(x: f64) -> Spin {
    if x < 0.0 {
        -1
    } else {
        1
    }
}

/// Fraction-of-agreement overlap, symmetrized over the global flip: `2·(max(a, 1−a) − ½)`.
pub fn overlap(truth: &Labeling, guess: &Labeling) -> Result<f64> {
    if truth.len() != guess.len() {
        return Err(Error::LengthMismatch { expected: truth.len(), actual: guess.len() });
    }
    if truth.is_empty() {
        return Err(Error::InvalidParameter("overlap of empty labelings".into()));
    }
    let agree = truth.values.iter().zip(&guess.values).filter(|(t, g)| t == g).count();
    let a = agree as f64 / truth.len() as f64;
    Ok(2.0 * (a.max(1.0 - a) - 0.5))
}

/// Detection threshold `1 / (1 − 2ε)²`.
pub fn alpha_detect(epsilon: f64) -> Result<f64> {
    let gap = threshold_gap(epsilon)?;
    Ok(1.0 / (gap * gap))
}

/// Exact-recovery threshold `2 ln n / (1 − 2ε)²`. `n` is real so the formula can be probed off the integers.
pub fn alpha_exact(epsilon: f64, n: f64) -> Result<f64> {
    if !(n >= 2.0) {
        return Err(Error::InvalidParameter(format!("n must be at least 2, got {n}")));
    }
    let gap = threshold_gap(epsilon)?;
    Ok(2.0 * n.ln() / (gap * gap))
}

fn threshold_gap(epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    if epsilon == 0.5 {
        return Err(Error::NoFiniteThreshold);
    }
    Ok(1.0 - 2.0 * epsilon)
}

/// Nishimori coupling `½ ln((1 − ε)/ε)` of the posterior.
pub fn beta0(epsilon: f64) -> Result<f64> {
    if epsilon == 0.0 || epsilon == 1.0 {
        return Err(Error::InfiniteCoupling(epsilon));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    Ok(0.5 * ((1.0 - epsilon) / epsilon).ln())
}

/// Realized average degree `2m / n`.
pub fn empirical_alpha(instance: &CbmInstance) -> f64 {
    2.0 * instance.m() as f64 / instance.n() as f64
}
