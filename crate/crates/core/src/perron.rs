//! Certified Perron eigenpairs by iterating `f_A` under the Hilbert metric.
//!
//! With `tau = tau(A) < 1` the map is a strict contraction, so after a step of
//! length `d_k = d_H(x_k, x_{k+1})` the new iterate satisfies
//! `d_H(x_{k+1}, x*) <= tau d_k / (1 - tau)`. The solver stops once that radius
//! drops below the requested tolerance.

use serde::{Deserialize, Serialize};

use crate::contraction::{apply_fa, hopf_bound, ostrowski_bound, phi, tau_from_phi};
use crate::error::{Error, Result};
use crate::hilbert::hilbert_distance;
use crate::matrix::{check_dim, PositiveMatrix, SimplexVector};
use crate::spectral::spectral_ratio_kappa;

/// Slack for floating-point comparisons in the bound chain.
pub const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerronCertificate {
    pub vector: SimplexVector,
    /// Collatz-Wielandt bracket `(lower, upper)` on `rho(A)` at `vector`.
    pub rho_bracket: (f64, f64),
    /// Midpoint of `rho_bracket`.
    pub rho_estimate: f64,
    /// Number of applications of `f_A`.
    pub iterations: usize,
    pub step_distance: f64,
    pub certified_radius: f64,
    pub tau_used: f64,
    pub converged: bool,
    /// `d_H(x_k, x_{k+1})` for every step taken.
    pub step_distances: Vec<f64>,
}

impl PerronCertificate {
    /// A-priori bound `tau^k / (1 - tau) * d_H(x_0, x_1)` on `d_H(x_k, x*)`.
    pub fn a_priori_bound(&self, k: usize) -> f64 {
        let d0 = self.step_distances.first().copied().unwrap_or(0.0);
        if self.tau_used == 0.0 {
            return if k == 0 { d0 } else { 0.0 };
        }
        self.tau_used.powi(k as i32) / (1.0 - self.tau_used) * d0
    }

    pub fn bracket_width(&self) -> f64 {
        self.rho_bracket.1 - self.rho_bracket.0
    }
}

/// `(min_i (Ax)_i / x_i, max_i (Ax)_i / x_i)`, which sandwiches `rho(A)`.
pub fn collatz_wielandt_bounds(a: &PositiveMatrix, x: &SimplexVector) -> Result<(f64, f64)> {
    let ax = a.mul_vec(x.coords())?;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (y, xi) in ax.iter().zip(x.coords()) {
        let r = y / xi;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok((lo, hi))
}

/// Iterates `x_{k+1} = f_A(x_k)` from `x0` (barycenter by default) until the
/// certified Hilbert-distance radius to the Perron vector is at most `tol`.
///
/// Hitting `max_iter` is not an error: the certificate comes back with
/// `converged == false`.
pub fn perron_power_iteration(
    a: &PositiveMatrix,
    tol: f64,
    max_iter: usize,
    x0: Option<&SimplexVector>,
) -> Result<PerronCertificate> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::BadTolerance { tol });
    }
    if max_iter == 0 {
        return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
    }
    let mut x = match x0 {
        Some(v) => {
            check_dim(a.n(), v.len())?;
            v.clone()
        }
        None => SimplexVector::barycenter(a.n()),
    };
    let tau = tau_from_phi(phi(a));
    let mut steps = Vec::new();
    let mut converged = false;

    if tau == 0.0 {
        // rank one: the image of f_A is a single point
        let next = apply_fa(a, &x)?;
        steps.push(hilbert_distance(&x, &next)?);
        x = next;
        converged = true;
    } else {
        let threshold = tol * (1.0 - tau) / tau;
        for _ in 0..max_iter {
            let next = apply_fa(a, &x)?;
            let step = hilbert_distance(&x, &next)?;
            steps.push(step);
            x = next;
            if step <= threshold {
                converged = true;
                break;
            }
        }
    }

    let step_distance = steps.last().copied().unwrap_or(0.0);
    let certified_radius = tau * step_distance / (1.0 - tau);
    let rho_bracket = collatz_wielandt_bounds(a, &x)?;
    Ok(PerronCertificate {
        vector: x,
        rho_bracket,
        rho_estimate: 0.5 * (rho_bracket.0 + rho_bracket.1),
        iterations: steps.len(),
        step_distance,
        certified_radius,
        tau_used: tau,
        converged,
        step_distances: steps,
    })
}

/// `kappa(A)` against `tau(A)` and the classical bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub kappa: f64,
    pub tau: f64,
    pub phi: f64,
    pub hopf: f64,
    pub ostrowski: f64,
    pub theorem1_holds: bool,
    pub chain_holds: bool,
    pub slack_kappa_tau: f64,
}

impl BoundReport {
    pub fn new(a: &PositiveMatrix, kappa: f64) -> Self {
        let phi = phi(a);
        let tau = tau_from_phi(phi);
        let hopf = hopf_bound(a);
        let ostrowski = ostrowski_bound(a);
        Self {
            kappa,
            tau,
            phi,
            hopf,
            ostrowski,
            theorem1_holds: kappa <= tau + BOUND_SLACK,
            chain_holds: kappa <= tau + BOUND_SLACK
                && tau <= hopf + BOUND_SLACK
                && hopf <= ostrowski + BOUND_SLACK,
            slack_kappa_tau: tau - kappa,
        }
    }
}

/// Checks `kappa(A) <= tau(A)` using the eigenvalue oracle.
pub fn verify_theorem1(a: &PositiveMatrix) -> Result<BoundReport> {
    Ok(BoundReport::new(a, spectral_ratio_kappa(a)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::random_positive_matrix;
    use crate::spectral::spectral_report;
    use approx::assert_abs_diff_eq;

    fn m(rows: &[&[f64]]) -> PositiveMatrix {
        PositiveMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn fixed_point_start() {
        let a = m(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let c = perron_power_iteration(&a, 1e-12, 100, None).unwrap();
        assert!(c.converged);
        assert_eq!(c.vector.coords(), &[0.5, 0.5]);
        assert_eq!(c.step_distance, 0.0);
        assert_eq!(c.iterations, 1);
        assert_eq!(c.rho_bracket, (3.0, 3.0));
    }

    #[test]
    fn rank_one_single_step() {
        let a = m(&[&[1.0, 2.0], &[2.0, 4.0]]);
        let x0 = SimplexVector::new(vec![0.9, 0.1]).unwrap();
        let c = perron_power_iteration(&a, 1e-12, 100, Some(&x0)).unwrap();
        assert_eq!(
            (c.iterations, c.certified_radius, c.tau_used),
            (1, 0.0, 0.0)
        );
        // image of f_A is N((1, 2))
        assert_abs_diff_eq!(c.vector.coords()[0], 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.rho_estimate, 5.0, epsilon = 1e-14);
    }

    #[test]
    fn converges_to_oracle() {
        let a = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let tol = 1e-12;
        let c = perron_power_iteration(&a, tol, 1000, None).unwrap();
        let oracle = spectral_report(&a).unwrap();
        assert!(c.converged && c.certified_radius <= tol);
        assert!(hilbert_distance(&c.vector, &oracle.perron_vector).unwrap() <= 1e-10);
        let tau = c.tau_used;
        let d0 = c.step_distances[0];
        let bound = ((tol * (1.0 - tau) / d0).ln() / tau.ln()).ceil() as usize + 1;
        assert!(c.iterations <= bound, "{} > {bound}", c.iterations);
    }

    #[test]
    fn bad_arguments() {
        let a = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert!(matches!(
            perron_power_iteration(&a, -1.0, 10, None),
            Err(Error::BadTolerance { .. })
        ));
        assert!(matches!(
            perron_power_iteration(&a, f64::NAN, 10, None),
            Err(Error::BadTolerance { .. })
        ));
        assert!(perron_power_iteration(&a, 1e-3, 0, None).is_err());
        let x0 = SimplexVector::barycenter(3);
        assert!(matches!(
            perron_power_iteration(&a, 1e-3, 10, Some(&x0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn unconverged_is_flagged() {
        let a = random_positive_matrix(6, 0.1, 10.0, 4).unwrap();
        let c = perron_power_iteration(&a, 1e-15, 2, None).unwrap();
        assert!(!c.converged);
        assert_eq!(c.iterations, 2);
    }

    #[test]
    fn collatz_wielandt_examples() {
        let half = SimplexVector::barycenter(2);
        assert_eq!(
            collatz_wielandt_bounds(&m(&[&[2.0, 1.0], &[1.0, 2.0]]), &half).unwrap(),
            (3.0, 3.0)
        );
        assert_eq!(
            collatz_wielandt_bounds(&m(&[&[1.0, 2.0], &[3.0, 4.0]]), &half).unwrap(),
            (3.0, 7.0)
        );
        let a = random_positive_matrix(5, 0.1, 10.0, 12).unwrap();
        let r = spectral_report(&a).unwrap();
        let (lo, hi) = collatz_wielandt_bounds(&a, &r.perron_vector).unwrap();
        assert!(hi - lo <= 1e-8 * r.rho);
    }

    #[test]
    fn theorem_examples() {
        let r = verify_theorem1(&m(&[&[2.0, 1.0], &[1.0, 2.0]])).unwrap();
        assert_abs_diff_eq!(r.kappa, 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.tau, 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.slack_kappa_tau, 0.0, epsilon = 1e-15);
        assert!(r.theorem1_holds && r.chain_holds);

        let r = verify_theorem1(&m(&[&[3.0, 1.0], &[1.0, 3.0]])).unwrap();
        for v in [r.kappa, r.tau, r.hopf] {
            assert_abs_diff_eq!(v, 0.5, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(r.ostrowski, 0.8, epsilon = 1e-15);

        let a = random_positive_matrix(5, 0.5, 2.0, 11).unwrap();
        let r = verify_theorem1(&a).unwrap();
        assert!(r.theorem1_holds && r.slack_kappa_tau >= 0.0);
    }
}
