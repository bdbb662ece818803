//! Birkhoff contraction coefficient, classical spectral-ratio bounds and the
//! projective map `f_A(w) = N(A w)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{complex_hilbert_distance, hilbert_distance, DEGENERATE_DISTANCE};
use crate::matrix::{
    normalize, normalize_complex, random_complex_perturbation, random_simplex_vector,
    ComplexSimplexVector, PositiveMatrix, SimplexVector,
};
use crate::rng::derive_seed;

/// Entries outside `[1e-100, 1e100]` switch cross-ratios to log space.
const LOG_SPACE_HI: f64 = 1e100;
const LOG_SPACE_LO: f64 = 1e-100;

/// Largest admissible neighborhood radius for complex contraction sampling.
pub const MAX_COMPLEX_EPS: f64 = 0.01;

/// Minimum cross-ratio `a_ik a_jl / (a_jk a_il)` over all index quadruples.
///
/// The quadruple with `i = j` contributes exactly one, so the result lies in `(0, 1]`.
pub fn phi(a: &PositiveMatrix) -> f64 {
    let n = a.n();
    let extreme = a.max_entry() > LOG_SPACE_HI || a.min_entry() < LOG_SPACE_LO;
    if extreme {
        let logs: Vec<f64> = a.entries().iter().map(|x| x.ln()).collect();
        let l = |i: usize, j: usize| logs[i * n + j];
        let mut best = f64::INFINITY;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for m in 0..n {
                        best = best.min((l(i, k) + l(j, m)) - (l(j, k) + l(i, m)));
                    }
                }
            }
        }
        best.min(0.0).exp()
    } else {
        let mut best = f64::INFINITY;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for m in 0..n {
                        let r = (a.get(i, k) * a.get(j, m)) / (a.get(j, k) * a.get(i, m));
                        best = best.min(r);
                    }
                }
            }
        }
        best
    }
}

/// Birkhoff contraction coefficient `(1 - sqrt(phi)) / (1 + sqrt(phi))`.
pub fn tau(a: &PositiveMatrix) -> f64 {
    tau_from_phi(phi(a))
}

pub fn tau_from_phi(phi: f64) -> f64 {
    let s = phi.sqrt();
    (1.0 - s) / (1.0 + s)
}

/// `(M - m) / (M + m)`.
pub fn hopf_bound(a: &PositiveMatrix) -> f64 {
    let r = a.min_entry() / a.max_entry();
    (1.0 - r) / (1.0 + r)
}

/// `(M^2 - m^2) / (M^2 + m^2)`.
pub fn ostrowski_bound(a: &PositiveMatrix) -> f64 {
    let r = a.min_entry() / a.max_entry();
    let r2 = r * r;
    (1.0 - r2) / (1.0 + r2)
}

pub fn apply_fa(a: &PositiveMatrix, w: &SimplexVector) -> Result<SimplexVector> {
    normalize(&a.mul_vec(w.coords())?)
}

/// Complex extension of `f_A`; fails with `ZeroSum` where it is undefined.
pub fn apply_fa_complex(
    a: &PositiveMatrix,
    w: &ComplexSimplexVector,
) -> Result<ComplexSimplexVector> {
    normalize_complex(&a.mul_vec_complex(w.coords())?)
}

/// Largest sampled contraction ratio and the pair achieving it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioSample {
    pub max_ratio: f64,
    pub arg_pair: (SimplexVector, SimplexVector),
    /// Pairs that passed the degeneracy guard.
    pub used: usize,
}

fn pair_centers(n: usize, seed: u64, k: u64) -> Result<(SimplexVector, SimplexVector)> {
    Ok((
        random_simplex_vector(n, derive_seed(seed, 2 * k))?,
        random_simplex_vector(n, derive_seed(seed, 2 * k + 1))?,
    ))
}

/// Ratio `d_H(f_A v, f_A w) / d_H(v, w)`, or `None` for a degenerate pair.
pub fn contraction_ratio(
    a: &PositiveMatrix,
    v: &SimplexVector,
    w: &SimplexVector,
) -> Result<Option<f64>> {
    let d = hilbert_distance(v, w)?;
    if d <= DEGENERATE_DISTANCE {
        return Ok(None);
    }
    Ok(Some(
        hilbert_distance(&apply_fa(a, v)?, &apply_fa(a, w)?)? / d,
    ))
}

/// Samples `count` pairs of random simplex points and returns the largest
/// observed ratio, a lower estimate of `tau(A)`.
pub fn sample_contraction_ratio(
    a: &PositiveMatrix,
    count: usize,
    seed: u64,
) -> Result<RatioSample> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    let mut best: Option<RatioSample> = None;
    for k in 0..count as u64 {
        let (v, w) = pair_centers(a.n(), seed, k)?;
        let Some(r) = contraction_ratio(a, &v, &w)? else {
            continue;
        };
        match &mut best {
            Some(b) => {
                b.used += 1;
                if r > b.max_ratio {
                    b.max_ratio = r;
                    b.arg_pair = (v, w);
                }
            }
            None => {
                best = Some(RatioSample {
                    max_ratio: r,
                    arg_pair: (v, w),
                    used: 1,
                })
            }
        }
    }
    best.ok_or(Error::DegenerateSample)
}

/// Complex analogue of [`sample_contraction_ratio`]: both points of each pair
/// are perturbed into the `eps`-neighborhood of independent real centers.
///
/// The centers coincide with those of the real sampler for the same seed.
pub fn sample_complex_contraction_ratio(
    a: &PositiveMatrix,
    eps: f64,
    count: usize,
    seed: u64,
) -> Result<f64> {
    if !(eps > 0.0 && eps <= MAX_COMPLEX_EPS) {
        return Err(Error::BadEpsilon { eps });
    }
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    let mut best: Option<f64> = None;
    for k in 0..count as u64 {
        let (cx, cy) = pair_centers(a.n(), seed, k)?;
        let x = random_complex_perturbation(&cx, eps, derive_seed(derive_seed(seed, 2 * k), 1))?;
        let y =
            random_complex_perturbation(&cy, eps, derive_seed(derive_seed(seed, 2 * k + 1), 1))?;
        let d = complex_hilbert_distance(&x, &y)?;
        if d <= DEGENERATE_DISTANCE {
            continue;
        }
        let r = complex_hilbert_distance(&apply_fa_complex(a, &x)?, &apply_fa_complex(a, &y)?)? / d;
        best = Some(best.map_or(r, |b: f64| b.max(r)));
    }
    best.ok_or(Error::DegenerateSample)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub tau: f64,
    pub phi: f64,
    pub hopf: f64,
    pub ostrowski: f64,
    pub sampled_real_max_ratio: f64,
    pub sampled_complex_max_ratio_by_eps: Vec<(f64, f64)>,
    pub sample_count: usize,
    pub seed: u64,
}

pub fn contraction_report(
    a: &PositiveMatrix,
    count: usize,
    eps_list: &[f64],
    seed: u64,
) -> Result<ContractionReport> {
    let phi = phi(a);
    let sampled_real_max_ratio = sample_contraction_ratio(a, count, seed)?.max_ratio;
    let sampled_complex_max_ratio_by_eps = eps_list
        .iter()
        .map(|&eps| Ok((eps, sample_complex_contraction_ratio(a, eps, count, seed)?)))
        .collect::<Result<_>>()?;
    Ok(ContractionReport {
        tau: tau_from_phi(phi),
        phi,
        hopf: hopf_bound(a),
        ostrowski: ostrowski_bound(a),
        sampled_real_max_ratio,
        sampled_complex_max_ratio_by_eps,
        sample_count: count,
        seed,
    })
}
