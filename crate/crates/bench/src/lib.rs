//! Shared fixtures for the criterion benchmarks.

use abs_core::model::{generate_tight_frame, make_instance, RngSeed};
use abs_core::{AnalysisOperator, CosparseInstance};

/// A tight-frame operator with `n = 1.2 d` rows and one instance drawn at
/// `(delta, rho)`. Seeded, so every benchmark run sees the same problem.
pub fn fixture(d: usize, delta: f64, rho: f64, seed: u64) -> (AnalysisOperator, CosparseInstance) {
    let seed = RngSeed(seed);
    let n = d + d / 5;
    let op = generate_tight_frame(n, d, seed.derive(0)).expect("valid operator shape");
    let inst = make_instance(&op, delta, rho, seed.derive(1)).expect("valid grid point");
    (op, inst)
}
