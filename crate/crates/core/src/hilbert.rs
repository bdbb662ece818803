//! Real and complex Hilbert metrics on the simplex.

use std::cmp::Ordering;

use num_complex::Complex64;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{check_dim, random_complex_perturbation, ComplexSimplexVector, SimplexVector};
use crate::rng;

/// Pairs closer than this in Hilbert distance are treated as projectively equal.
pub const DEGENERATE_DISTANCE: f64 = 1e-10;
/// Coordinates below this modulus make a ratio undefined.
const ZERO_COORD: f64 = 1e-15;

/// One measured pair for the Euclidean/Hilbert comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSample {
    pub a: ComplexSimplexVector,
    pub b: ComplexSimplexVector,
    pub hilbert: f64,
    pub euclidean: f64,
}

impl MetricSample {
    pub fn ratio(&self) -> Option<f64> {
        (self.hilbert > DEGENERATE_DISTANCE).then(|| self.euclidean / self.hilbert)
    }
}

/// `ln(a / b)`, exactly antisymmetric under swapping the arguments.
#[inline]
fn ln_ratio(a: f64, b: f64) -> f64 {
    if a >= b {
        (a / b).ln()
    } else {
        -(b / a).ln()
    }
}

/// Hilbert distance on the open simplex, with the maximizing ordered index
/// pair (lowest lexicographic pair on ties).
pub fn hilbert_distance_argmax(
    v: &SimplexVector,
    w: &SimplexVector,
) -> Result<(f64, (usize, usize))> {
    check_dim(v.len(), w.len())?;
    let mut hi = (f64::NEG_INFINITY, 0);
    let mut lo = (f64::INFINITY, 0);
    for (k, (&wk, &vk)) in w.coords().iter().zip(v.coords()).enumerate() {
        let r = ln_ratio(wk, vk);
        if r > hi.0 {
            hi = (r, k);
        }
        if r < lo.0 {
            lo = (r, k);
        }
    }
    Ok((hi.0 - lo.0, (hi.1, lo.1)))
}

/// `max_{i,j} ln((w_i / w_j) / (v_i / v_j))`, evaluated in O(n) as the spread
/// of the coordinate log-ratios.
pub fn hilbert_distance(v: &SimplexVector, w: &SimplexVector) -> Result<f64> {
    hilbert_distance_argmax(v, w).map(|(d, _)| d)
}

/// True iff `Re(w_i / w_j) > 0` for every ordered pair.
pub fn in_wc_plus(w: &ComplexSimplexVector) -> bool {
    let c = w.coords();
    if c.iter().any(|z| z.norm() <= ZERO_COORD || !z.is_finite()) {
        return false;
    }
    c.iter().all(|wi| c.iter().all(|wj| (wi / wj).re > 0.0))
}

fn lex_cmp(a: &[Complex64], b: &[Complex64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// `max_{i,j} |Log((w_i / w_j) / (v_i / v_j))|` with the principal logarithm.
/// Both arguments must lie in the cone checked by [`in_wc_plus`].
pub fn complex_hilbert_distance(v: &ComplexSimplexVector, w: &ComplexSimplexVector) -> Result<f64> {
    check_dim(v.len(), w.len())?;
    if !in_wc_plus(v) || !in_wc_plus(w) {
        return Err(Error::NotInCone);
    }
    // evaluate in a canonical argument order so the result is exactly symmetric
    let (v, w) = match lex_cmp(v.coords(), w.coords()) {
        Ordering::Greater => (w.coords(), v.coords()),
        _ => (v.coords(), w.coords()),
    };
    let mut best = 0.0f64;
    for i in 0..v.len() {
        for j in 0..v.len() {
            if i == j {
                continue;
            }
            let q = (w[i] * v[j]) / (w[j] * v[i]);
            best = best.max(q.ln().norm());
        }
    }
    Ok(best)
}

/// Exact decision of `exists v in W° with |w_i - v_i| <= eps * v_i for all i`.
///
/// For fixed `i` the constraint is `(1 - eps^2) v^2 - 2 Re(w_i) v + |w_i|^2 <= 0`,
/// whose solution set is an interval `[lo_i, hi_i]` when `Re(w_i) > 0` and the
/// discriminant `eps^2 Re(w_i)^2 - (1 - eps^2) Im(w_i)^2` is nonnegative. The
/// coordinates are coupled only through `sum v_i = 1`.
pub fn in_wc_eps(w: &ComplexSimplexVector, eps: f64) -> Result<bool> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::BadEpsilon { eps });
    }
    let scale = 1.0 - eps * eps;
    let mut sum_lo = 0.0;
    let mut sum_hi = 0.0;
    for z in w.coords() {
        if !z.is_finite() || z.re <= 0.0 {
            return Ok(false);
        }
        let disc = eps * eps * z.re * z.re - scale * z.im * z.im;
        if disc < 0.0 {
            return Ok(false);
        }
        let s = disc.sqrt();
        // product of the roots is |w_i|^2 / scale; this avoids cancellation
        sum_lo += z.norm_sqr() / (z.re + s);
        sum_hi += (z.re + s) / scale;
    }
    Ok(sum_lo <= 1.0 && 1.0 <= sum_hi)
}

pub fn euclidean_distance(v: &[f64], w: &[f64]) -> Result<f64> {
    check_dim(v.len(), w.len())?;
    Ok(v.iter()
        .zip(w)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

pub fn complex_euclidean_distance(v: &[Complex64], w: &[Complex64]) -> Result<f64> {
    check_dim(v.len(), w.len())?;
    Ok(v.iter()
        .zip(w)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Draws `pairs` pairs from the complex `eps`-neighborhood of `centers`, each
/// point perturbed around an independently chosen center.
pub fn metric_equivalence_samples(
    centers: &[SimplexVector],
    eps: f64,
    pairs: usize,
    seed: u64,
) -> Result<Vec<MetricSample>> {
    if centers.is_empty() {
        return Err(Error::InvalidArgument("empty center set".into()));
    }
    if pairs == 0 {
        return Err(Error::InvalidArgument("pairs must be at least 1".into()));
    }
    if !(eps > 0.0 && eps < 0.1) {
        return Err(Error::BadEpsilon { eps });
    }
    let n = centers[0].len();
    if let Some(c) = centers.iter().find(|c| c.len() != n) {
        return Err(Error::DimensionMismatch {
            left: n,
            right: c.len(),
        });
    }
    (0..pairs as u64)
        .map(|k| {
            let mut r = rng::stream(seed, k);
            let ca = &centers[r.gen_range(0..centers.len())];
            let cb = &centers[r.gen_range(0..centers.len())];
            let a = random_complex_perturbation(ca, eps, r.gen())?;
            let b = random_complex_perturbation(cb, eps, r.gen())?;
            let hilbert = complex_hilbert_distance(&a, &b)?;
            let euclidean = complex_euclidean_distance(a.coords(), b.coords())?;
            Ok(MetricSample {
                a,
                b,
                hilbert,
                euclidean,
            })
        })
        .collect()
}

/// Extreme values of `d_E / d_H` over sampled pairs: an empirical bracket
/// for the equivalence constants of the two metrics near `centers`.
pub fn metric_equivalence_ratios(
    centers: &[SimplexVector],
    eps: f64,
    pairs: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let samples = metric_equivalence_samples(centers, eps, pairs, seed)?;
    let ratios: Vec<f64> = samples.iter().filter_map(MetricSample::ratio).collect();
    if ratios.is_empty() {
        return Err(Error::DegenerateSample);
    }
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{normalize_complex, random_simplex_vector};
    use approx::assert_abs_diff_eq;

    fn sv(c: &[f64]) -> SimplexVector {
        SimplexVector::new(c.to_vec()).unwrap()
    }

    fn cv(c: &[(f64, f64)]) -> ComplexSimplexVector {
        ComplexSimplexVector::new(c.iter().map(|&(r, i)| Complex64::new(r, i)).collect()).unwrap()
    }

    /// Brute force over all ordered pairs.
    fn hilbert_brute(v: &[f64], w: &[f64]) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for i in 0..v.len() {
            for j in 0..v.len() {
                best = best.max(((w[i] / w[j]) / (v[i] / v[j])).ln());
            }
        }
        best
    }

    #[test]
    fn real_examples() {
        let v = sv(&[1.0 / 3.0, 2.0 / 3.0]);
        assert_eq!(hilbert_distance(&v, &v).unwrap(), 0.0);

        let d = hilbert_distance(&sv(&[0.5, 0.5]), &sv(&[2.0 / 3.0, 1.0 / 3.0])).unwrap();
        assert_abs_diff_eq!(d, 2f64.ln(), epsilon = 1e-15);

        let (v, w) = ([0.25, 0.5, 0.25], [0.5, 0.25, 0.25]);
        let d = hilbert_distance(&sv(&v), &sv(&w)).unwrap();
        assert_abs_diff_eq!(hilbert_brute(&v, &w), 4f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(d, 4f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn argmax_lowest_pair() {
        let (_, p) =
            hilbert_distance_argmax(&sv(&[0.25, 0.5, 0.25]), &sv(&[0.5, 0.25, 0.25])).unwrap();
        assert_eq!(p, (0, 1));
        let v = sv(&[0.5, 0.5]);
        assert_eq!(hilbert_distance_argmax(&v, &v).unwrap(), (0.0, (0, 0)));
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            hilbert_distance(&sv(&[0.5, 0.5]), &sv(&[0.2, 0.3, 0.5])),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            euclidean_distance(&[0.0], &[0.0, 1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn complex_examples() {
        let v = cv(&[(0.5, 0.0), (0.5, 0.0)]);
        assert_eq!(complex_hilbert_distance(&v, &v).unwrap(), 0.0);
        let w = cv(&[(2.0 / 3.0, 0.0), (1.0 / 3.0, 0.0)]);
        assert_abs_diff_eq!(
            complex_hilbert_distance(&v, &w).unwrap(),
            2f64.ln(),
            epsilon = 1e-15
        );

        // independent single-pair evaluation through polar form
        let w =
            normalize_complex(&[Complex64::new(0.5, 0.05), Complex64::new(0.5, -0.05)]).unwrap();
        let (r1, t1) = w.coords()[0].to_polar();
        let (r2, t2) = w.coords()[1].to_polar();
        let expected = ((r1 / r2).ln().powi(2) + (t1 - t2).powi(2)).sqrt();
        assert_abs_diff_eq!(
            complex_hilbert_distance(&v, &w).unwrap(),
            expected,
            epsilon = 1e-15
        );
        // |q| = 1 and arg q = 2 atan(0.1)
        assert_abs_diff_eq!(expected, 2.0 * 0.1f64.atan(), epsilon = 1e-15);
    }

    #[test]
    fn complex_not_in_cone() {
        let v = cv(&[(0.5, 0.0), (0.5, 0.0)]);
        let w = cv(&[(1.0, 1.0), (0.0, -1.0)]);
        assert_eq!(complex_hilbert_distance(&v, &w), Err(Error::NotInCone));
    }

    #[test]
    fn cone_membership() {
        assert!(in_wc_plus(
            &random_simplex_vector(5, 1).unwrap().to_complex()
        ));
        // (1+i)/(-i) = -1+i
        assert!(!in_wc_plus(&cv(&[(1.0, 1.0), (0.0, -1.0)])));
        assert!(!in_wc_plus(&cv(&[(1.0, 0.0), (0.0, 0.0)])));
    }

    #[test]
    fn neighborhood_membership() {
        assert!(in_wc_eps(&cv(&[(0.5, 0.001), (0.5, -0.001)]), 0.01).unwrap());
        assert!(!in_wc_eps(&cv(&[(1.5, 0.0), (-0.5, 0.0)]), 0.01).unwrap());
        assert!(!in_wc_eps(&cv(&[(1.0, 0.0), (0.0, 0.0)]), 0.5).unwrap());
        let w = cv(&[(0.5, 0.0), (0.5, 0.0)]);
        assert!(matches!(in_wc_eps(&w, 0.0), Err(Error::BadEpsilon { .. })));
        assert!(matches!(in_wc_eps(&w, 1.0), Err(Error::BadEpsilon { .. })));
    }

    /// n = 2 probe on the cone boundary: w_1 = x (1 + i tan(theta)), which is
    /// admissible exactly when sin(theta) <= eps; w_2 = 1 - w_1 stays well inside.
    #[test]
    fn neighborhood_boundary_is_sharp() {
        let eps: f64 = 0.01;
        let edge = eps.asin();
        let probe = |theta: f64| {
            let x = 0.25;
            let y = x * theta.tan();
            cv(&[(x, y), (1.0 - x, -y)])
        };
        assert!(in_wc_eps(&probe(edge * (1.0 - 1e-9)), eps).unwrap());
        assert!(!in_wc_eps(&probe(edge * (1.0 + 1e-6)), eps).unwrap());
    }

    #[test]
    fn euclidean_examples() {
        assert_eq!(euclidean_distance(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        assert_eq!(euclidean_distance(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
        assert_abs_diff_eq!(
            euclidean_distance(&[0.5, 0.5], &[2.0 / 3.0, 1.0 / 3.0]).unwrap(),
            2f64.sqrt() / 6.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn equivalence_ratios_basic() {
        let s = [SimplexVector::barycenter(2)];
        let (lo, hi) = metric_equivalence_ratios(&s, 1e-3, 100, 5).unwrap();
        assert!(lo > 0.0 && hi.is_finite() && lo <= hi);
        assert_eq!(
            metric_equivalence_ratios(&s, 1e-3, 100, 5).unwrap(),
            (lo, hi)
        );
        assert!(metric_equivalence_ratios(&[], 1e-3, 10, 0).is_err());
        assert!(metric_equivalence_ratios(&s, 1e-3, 0, 0).is_err());
        assert!(matches!(
            metric_equivalence_ratios(&s, 0.2, 10, 0),
            Err(Error::BadEpsilon { .. })
        ));
    }
}
