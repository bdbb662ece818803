//! Property tests for the metric, contraction and spectral invariants.

use birkhoff_core::hilbert::hilbert_distance;
use birkhoff_core::spectral::spectral_order;
use birkhoff_core::*;
use proptest::prelude::*;

fn dim() -> impl Strategy<Value = usize> {
    2usize..=8
}

fn positive_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(1e-3f64..1e3, n)
}

fn matrix() -> impl Strategy<Value = PositiveMatrix> {
    (dim(), any::<u64>()).prop_map(|(n, seed)| random_positive_matrix(n, 0.1, 10.0, seed).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn validate_is_bit_exact(raw in dim().prop_flat_map(|n| proptest::collection::vec(positive_vec(n), n))) {
        let a = PositiveMatrix::from_rows(&raw).unwrap();
        prop_assert_eq!(a.to_rows(), raw);
    }

    #[test]
    fn normalize_scale_invariant(w in dim().prop_flat_map(positive_vec), c in 1e-3f64..1e3) {
        let a = normalize(&w).unwrap();
        prop_assert!((a.coords().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        let scaled: Vec<f64> = w.iter().map(|x| c * x).collect();
        let b = normalize(&scaled).unwrap();
        for (x, y) in a.coords().iter().zip(b.coords()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn normalize_complex_scale_invariant(
        w in dim().prop_flat_map(|n| proptest::collection::vec((0.1f64..10.0, -1.0f64..1.0), n)),
        c_re in -5.0f64..5.0,
        c_im in 0.1f64..5.0,
    ) {
        let w: Vec<Complex64> = w.into_iter().map(|(r, i)| Complex64::new(r, i)).collect();
        let c = Complex64::new(c_re, c_im);
        let a = normalize_complex(&w).unwrap();
        let scaled: Vec<Complex64> = w.iter().map(|x| c * x).collect();
        let b = normalize_complex(&scaled).unwrap();
        for (x, y) in a.coords().iter().zip(b.coords()) {
            prop_assert!((x - y).norm() <= 1e-12);
        }
    }

    #[test]
    fn perturbation_lands_in_neighborhood(n in dim(), seed in any::<u64>(), eps in 1e-6f64..0.49) {
        let v = random_simplex_vector(n, seed).unwrap();
        let w = random_complex_perturbation(&v, eps, seed ^ 0xabc).unwrap();
        prop_assert!(in_wc_eps(&w, eps).unwrap());
        for (wi, vi) in w.coords().iter().zip(v.coords()) {
            prop_assert!((wi - vi).norm() <= eps * vi * (1.0 + 1e-12));
        }
        if eps <= 0.1 {
            prop_assert!(in_wc_plus(&w));
        }
    }

    #[test]
    fn hilbert_metric_axioms(n in dim(), s in any::<u64>()) {
        let u = random_simplex_vector(n, s).unwrap();
        let v = random_simplex_vector(n, s.wrapping_add(1)).unwrap();
        let w = random_simplex_vector(n, s.wrapping_add(2)).unwrap();
        prop_assert_eq!(hilbert_distance(&u, &u).unwrap(), 0.0);
        prop_assert_eq!(hilbert_distance(&u, &v).unwrap(), hilbert_distance(&v, &u).unwrap());
        let uw = hilbert_distance(&u, &w).unwrap();
        let uv = hilbert_distance(&u, &v).unwrap();
        let vw = hilbert_distance(&v, &w).unwrap();
        prop_assert!(uw <= uv + vw + 1e-9);
        let cu = complex_hilbert_distance(&u.to_complex(), &v.to_complex()).unwrap();
        prop_assert_eq!(cu, complex_hilbert_distance(&v.to_complex(), &u.to_complex()).unwrap());
        prop_assert!((cu - uv).abs() <= 1e-12);
    }

    #[test]
    fn hilbert_projective_invariance(
        (a, b) in dim().prop_flat_map(|n| (positive_vec(n), positive_vec(n))),
        c in 1e-3f64..1e3,
    ) {
        let scaled: Vec<f64> = a.iter().map(|x| c * x).collect();
        let d1 = hilbert_distance(&normalize(&a).unwrap(), &normalize(&b).unwrap()).unwrap();
        let d2 = hilbert_distance(&normalize(&scaled).unwrap(), &normalize(&b).unwrap()).unwrap();
        prop_assert!((d1 - d2).abs() <= 1e-12);
    }

    #[test]
    fn complex_distance_symmetric(n in dim(), s in any::<u64>()) {
        let x = random_complex_perturbation(&random_simplex_vector(n, s).unwrap(), 0.01, s).unwrap();
        let y = random_complex_perturbation(&random_simplex_vector(n, !s).unwrap(), 0.01, !s).unwrap();
        prop_assert_eq!(complex_hilbert_distance(&x, &x).unwrap(), 0.0);
        prop_assert_eq!(
            complex_hilbert_distance(&x, &y).unwrap(),
            complex_hilbert_distance(&y, &x).unwrap()
        );
    }

    #[test]
    fn bound_chain(a in matrix()) {
        let (p, t, h, o) = (phi(&a), tau(&a), hopf_bound(&a), ostrowski_bound(&a));
        prop_assert!(p > 0.0 && p <= 1.0);
        prop_assert!((t - (1.0 - p.sqrt()) / (1.0 + p.sqrt())).abs() <= 1e-12);
        prop_assert!(t <= h + 1e-12 && h <= o + 1e-12 && o < 1.0);
    }

    #[test]
    fn scaling_invariance(a in matrix(), c in 1e-3f64..1e3, seed in any::<u64>()) {
        let n = a.n();
        prop_assert!((tau(&a.scaled(c).unwrap()) - tau(&a)).abs() <= 1e-12);
        let d = random_positive_matrix(n, 0.1, 10.0, seed).unwrap();
        let dae = a.diag_scaled(d.row(0), d.row(1)).unwrap();
        prop_assert!((phi(&dae) / phi(&a) - 1.0).abs() <= 1e-10);
        let t = tau(&a);
        prop_assert!((tau(&dae) - t).abs() <= 1e-10 * t.max(1e-300));
    }

    #[test]
    fn phi_one_iff_proportional_rows(n in dim(), seed in any::<u64>(), full in any::<bool>()) {
        let uv = random_positive_matrix(n, 0.1, 10.0, seed).unwrap();
        if full {
            // generic random matrices have non-proportional rows
            prop_assert!(phi(&uv) < 1.0 - 1e-6);
        } else {
            let (u, v) = (uv.row(0), uv.row(1));
            let a = PositiveMatrix::from_row_major(n, (0..n * n).map(|t| u[t / n] * v[t % n]).collect())
                .unwrap();
            prop_assert!((phi(&a) - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn fa_preserves_simplex(a in matrix(), s in any::<u64>()) {
        let w = random_simplex_vector(a.n(), s).unwrap();
        let y = apply_fa(&a, &w).unwrap();
        prop_assert!(y.coords().iter().all(|&x| x > 0.0));
        prop_assert!((y.coords().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        let z = random_complex_perturbation(&w, 0.01, s).unwrap();
        let fz = apply_fa_complex(&a, &z).unwrap();
        let sum: Complex64 = fz.coords().iter().sum();
        prop_assert!((sum - Complex64::new(1.0, 0.0)).norm() <= 1e-12);
    }

    #[test]
    fn perron_root_is_simple_and_real(a in matrix()) {
        let e = eigenvalues(&a).unwrap();
        prop_assert!(e.windows(2).all(|w| spectral_order(&w[0], &w[1]).is_le()));
        prop_assert!(e[0].im == 0.0 && e[0].re > 0.0);
        prop_assert!(e[1].norm() < e[0].norm() * (1.0 - 1e-9));
    }

    #[test]
    fn similarity_invariance(a in matrix(), seed in any::<u64>()) {
        let d = random_positive_matrix(a.n(), 0.1, 10.0, seed).unwrap();
        let inv: Vec<f64> = d.row(0).iter().map(|x| 1.0 / x).collect();
        let b = a.diag_scaled(d.row(0), &inv).unwrap();
        let ea = eigenvalues(&a).unwrap();
        let eb = eigenvalues(&b).unwrap();
        let scale = ea[0].norm();
        prop_assert!(spectral::spectrum_distance(&ea, &eb).unwrap() <= 1e-8 * scale.max(1.0));
        prop_assert!(
            (spectral_ratio_kappa(&a).unwrap() - spectral_ratio_kappa(&b).unwrap()).abs() <= 1e-8
        );
    }

    #[test]
    fn power_iteration_invariants(a in matrix(), s in any::<u64>()) {
        let x0 = random_simplex_vector(a.n(), s).unwrap();
        let c = perron_power_iteration(&a, 1e-12, 10_000, Some(&x0)).unwrap();
        let oracle = spectral_report(&a).unwrap();
        prop_assert!(c.converged);
        for w in c.step_distances.windows(2) {
            prop_assert!(w[1] <= c.tau_used * w[0] + 1e-12);
        }
        let d = hilbert_distance(&c.vector, &oracle.perron_vector).unwrap();
        prop_assert!(d <= c.certified_radius + 1e-9);

        // a-priori bound dominates the true distance at every iterate
        let mut x = x0.clone();
        for k in 0..=c.iterations {
            let dk = hilbert_distance(&x, &oracle.perron_vector).unwrap();
            prop_assert!(dk <= c.a_priori_bound(k) + 1e-9, "k={} {} > {}", k, dk, c.a_priori_bound(k));
            x = apply_fa(&a, &x).unwrap();
        }

        let (lo, hi) = collatz_wielandt_bounds(&a, &x0).unwrap();
        prop_assert!(lo <= oracle.rho * (1.0 + 1e-10) && oracle.rho <= hi * (1.0 + 1e-10));
    }

    #[test]
    fn theorem1_holds(a in matrix()) {
        let r = verify_theorem1(&a).unwrap();
        prop_assert!(r.theorem1_holds && r.chain_holds && r.slack_kappa_tau >= -1e-9);
    }
}

/// Offsets of modulus exactly `(1 - 1e-9) eps v_i`. Coordinates come in equal
/// pairs with opposite offsets, so the sum stays 1 and `v` is a witness.
#[test]
fn neighborhood_accepts_near_boundary_offsets() {
    use birkhoff_core::rng::stream;
    use rand::Rng;
    let eps = 0.05;
    for k in 0..1000u64 {
        let mut r = stream(17, k);
        let pairs = 1 + (k as usize % 4);
        let half: Vec<f64> = (0..pairs).map(|_| r.gen_range(0.1..1.0)).collect();
        let total: f64 = 2.0 * half.iter().sum::<f64>();
        let mut coords = Vec::new();
        for h in &half {
            let vi = h / total;
            let off = Complex64::from_polar(
                (1.0 - 1e-9) * eps * vi,
                r.gen_range(0.0..std::f64::consts::TAU),
            );
            coords.push(Complex64::new(vi, 0.0) + off);
            coords.push(Complex64::new(vi, 0.0) - off);
        }
        let w = ComplexSimplexVector::new(coords).unwrap();
        assert!(in_wc_eps(&w, eps).unwrap(), "sample {k}");
    }
}

/// Barycenter limit of d_E / d_H for n = 2: along w = (1/2 + t, 1/2 - t),
/// d_E = sqrt(2) t and d_H = ln((1 + 2t) / (1 - 2t)) ~ 4t.
#[test]
fn euclidean_hilbert_ratio_at_barycenter() {
    let v = SimplexVector::barycenter(2);
    let expected = 2f64.sqrt() / 4.0;
    for t in [1e-3, 1e-4, 1e-5] {
        let w = SimplexVector::new(vec![0.5 + t, 0.5 - t]).unwrap();
        let ratio =
            euclidean_distance(v.coords(), w.coords()).unwrap() / hilbert_distance(&v, &w).unwrap();
        assert!((ratio - expected).abs() <= 2.0 * t, "t={t} ratio={ratio}");
    }
    let (_, hi) = metric_equivalence_ratios(&[v], 1e-4, 500, 3).unwrap();
    assert!(hi <= expected * 1.01);
}

/// The complex metric is not known to satisfy the triangle inequality on the
/// whole cone; count violations on sampled triples instead of asserting.
#[test]
fn complex_triangle_inequality_survey() {
    let mut violations = 0;
    let mut worst = 0.0f64;
    let total = 2000u64;
    for k in 0..total {
        let n = 2 + (k as usize % 5);
        let c = random_simplex_vector(n, k).unwrap();
        let pts: Vec<ComplexSimplexVector> = (0..3)
            .map(|j| random_complex_perturbation(&c, 0.01, k * 3 + j).unwrap())
            .collect();
        let d = |i: usize, j: usize| complex_hilbert_distance(&pts[i], &pts[j]).unwrap();
        let excess = d(0, 2) - d(0, 1) - d(1, 2);
        if excess > 1e-12 {
            violations += 1;
            worst = worst.max(excess);
        }
    }
    println!(
        "complex triangle inequality: {violations}/{total} violations, worst excess {worst:.3e}"
    );
}
