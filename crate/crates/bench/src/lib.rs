//! Shared fixtures for the criterion benches.

use birkhoff_core::{random_positive_matrix, PositiveMatrix};

/// Deterministic ensemble of `count` matrices of size `n` with entries in `[0.1, 10]`.
pub fn ensemble(n: usize, count: usize, seed: u64) -> Vec<PositiveMatrix> {
    (0..count as u64)
        .map(|k| random_positive_matrix(n, 0.1, 10.0, seed.wrapping_add(k)).expect("valid range"))
        .collect()
}
