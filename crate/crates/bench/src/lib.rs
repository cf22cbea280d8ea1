//! Shared fixtures for the benchmarks.

use cbm_core::model::{generate, CbmParams};
use cbm_core::CbmInstance;

/// Planted instance at noise 0.25, a regime just above the detection threshold for `alpha = 6`.
pub fn fixture(n: usize, alpha: f64) -> CbmInstance {
    generate(&CbmParams::new(n, alpha, 0.25, 7).expect("valid parameters")).expect("generation")
}

pub const SIZES: [usize; 3] = [1_000, 10_000, 100_000];
