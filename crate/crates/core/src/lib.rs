//! Hilbert projective metric, Birkhoff contraction coefficient and spectral
//! ratio bounds for strictly positive matrices.
//!
//! The crate is organised bottom-up:
//!
//! - [`matrix`]: validated [`PositiveMatrix`], simplex vectors, normalization
//!   and seeded generators.
//! - [`hilbert`]: the real and complex Hilbert metrics, cone and
//!   neighborhood membership, Euclidean comparisons.
//! - [`contraction`]: `phi`, `tau`, the Hopf and Ostrowski bounds, the
//!   projective map `f_A` and sampled contraction ratios.
//! - [`spectral`]: a dense Hessenberg/QR eigensolver plus an independent
//!   characteristic-polynomial oracle for small matrices.
//! - [`perron`]: certified power iteration, Collatz-Wielandt brackets and the
//!   `kappa <= tau` check.

pub mod contraction;
pub mod error;
pub mod hilbert;
pub mod matrix;
pub mod perron;
pub mod rng;
pub mod spectral;

pub use contraction::{
    apply_fa, apply_fa_complex, contraction_report, hopf_bound, ostrowski_bound, phi,
    sample_complex_contraction_ratio, sample_contraction_ratio, tau, ContractionReport,
    RatioSample,
};
pub use error::{Error, Result};
pub use hilbert::{
    complex_euclidean_distance, complex_hilbert_distance, euclidean_distance, hilbert_distance,
    in_wc_eps, in_wc_plus, metric_equivalence_ratios, metric_equivalence_samples, MetricSample,
};
pub use matrix::{
    normalize, normalize_complex, random_complex_perturbation, random_positive_matrix,
    random_simplex_vector, ComplexSimplexVector, PositiveMatrix, SimplexVector,
};
pub use num_complex::Complex64;
pub use perron::{
    collatz_wielandt_bounds, perron_power_iteration, verify_theorem1, BoundReport,
    PerronCertificate,
};
pub use spectral::{
    char_poly_roots_small, eigenvalues, spectral_radius, spectral_ratio_kappa, spectral_report,
    SpectralReport,
};
