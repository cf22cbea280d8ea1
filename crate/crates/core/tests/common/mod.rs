#![allow(dead_code)]

use cbm_core::model::{generate, CbmParams, Edge};
use cbm_core::rng::child_seed;
use cbm_core::{CbmInstance, Result};

pub fn instance(n: usize, edges: &[(u32, u32, i8)]) -> CbmInstance {
    let params = CbmParams::new(n, 1.0_f64.min(n as f64), 0.1, 0).unwrap();
    let edges = edges.iter().map(|&(i, j, w)| Edge { i, j, w }).collect();
    CbmInstance::from_parts(params, vec![1; n], edges).unwrap()
}

pub fn triangle() -> CbmInstance {
    instance(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)])
}

/// A planted instance with `8 ≤ n ≤ 30` and varied density and noise.
pub fn small_planted(seed: u64) -> CbmInstance {
    let n = 8 + (child_seed(seed, "n", 0) % 23) as usize;
    let alpha = 1.5 + (child_seed(seed, "alpha", 0) % 1000) as f64 / 1000.0 * 4.0;
    let epsilon = (child_seed(seed, "eps", 0) % 500) as f64 / 1000.0;
    generate(&CbmParams::new(n, alpha, epsilon, seed).unwrap()).unwrap()
}

/// The 2-core of a planted instance, resampled until it has at least 4 nodes and `m > n`.
pub fn small_two_core(seed: u64) -> CbmInstance {
    (0..)
        .filter_map(|k| {
            let base = small_planted(child_seed(seed, "two-core", k));
            base.k_core(2).filter(|c| c.n() >= 4 && c.m() > c.n())
        })
        .next()
        .unwrap()
}

pub fn planted(n: usize, alpha: f64, epsilon: f64, seed: u64) -> Result<CbmInstance> {
    generate(&CbmParams::new(n, alpha, epsilon, seed)?)
}
