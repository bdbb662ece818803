//! Dense eigenvalue oracle: balancing, Householder reduction to Hessenberg
//! form and the Francis double-shift QR iteration, plus an independent
//! characteristic-polynomial route for `n <= 4`.

#![allow(clippy::needless_range_loop)]

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{normalize, PositiveMatrix, SimplexVector};

/// Largest dimension accepted by the dense solver.
pub const MAX_DIM: usize = 64;
/// Largest dimension accepted by [`char_poly_roots_small`].
pub const MAX_POLY_DIM: usize = 4;
/// Subdiagonal deflation threshold relative to the neighboring diagonal.
const DEFLATION_TOL: f64 = 1e-14;
/// Relative gap below which the dominant modulus is considered tied.
const PERRON_TIE_TOL: f64 = 1e-9;
/// Imaginary part allowed on the Perron root, relative to its modulus.
const PERRON_IMAG_TOL: f64 = 1e-10;

/// Ground-truth spectral data for one matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub eigenvalues: Vec<Complex64>,
    pub rho: f64,
    pub kappa: f64,
    pub perron_vector: SimplexVector,
    /// `|trace - sum(lambda)| / |trace|`.
    pub trace_residual: f64,
    /// `|det - prod(lambda)|` scaled by the Hadamard bound `prod_i ||row_i||`.
    pub det_residual: f64,
}

/// Descending modulus, then descending real part, then descending imaginary part.
pub fn spectral_order(a: &Complex64, b: &Complex64) -> Ordering {
    b.norm()
        .total_cmp(&a.norm())
        .then(b.re.total_cmp(&a.re))
        .then(b.im.total_cmp(&a.im))
}

/// All eigenvalues with multiplicity, in [`spectral_order`].
pub fn eigenvalues(a: &PositiveMatrix) -> Result<Vec<Complex64>> {
    let n = a.n();
    if n > MAX_DIM {
        return Err(Error::TooLarge { n, max: MAX_DIM });
    }
    let mut h: Vec<Vec<f64>> = a.to_rows();
    balance(&mut h);
    hessenberg(&mut h);
    let mut eig = hqr(h)?;
    eig.sort_by(spectral_order);
    Ok(eig)
}

/// Diagonal similarity equalizing row and column norms (powers of two only,
/// so no rounding is introduced).
fn balance(a: &mut [Vec<f64>]) {
    const RADIX: f64 = 2.0;
    let n = a.len();
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    a[i][j] *= g;
                }
                for row in a.iter_mut() {
                    row[i] *= f;
                }
            }
        }
    }
}

/// In-place Householder reduction to upper Hessenberg form.
fn hessenberg(a: &mut [Vec<f64>]) {
    let n = a.len();
    for k in 0..n.saturating_sub(2) {
        let alpha_sq: f64 = (k + 1..n).map(|i| a[i][k] * a[i][k]).sum();
        if alpha_sq == 0.0 {
            continue;
        }
        let x0 = a[k + 1][k];
        let alpha = if x0 >= 0.0 {
            -alpha_sq.sqrt()
        } else {
            alpha_sq.sqrt()
        };
        let mut v: Vec<f64> = (k + 1..n).map(|i| a[i][k]).collect();
        v[0] -= alpha;
        let vnorm_sq: f64 = v.iter().map(|x| x * x).sum();
        if vnorm_sq == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm_sq;
        // A <- P A
        for j in 0..n {
            let dot: f64 = v
                .iter()
                .enumerate()
                .map(|(t, vt)| vt * a[k + 1 + t][j])
                .sum();
            let f = beta * dot;
            for (t, vt) in v.iter().enumerate() {
                a[k + 1 + t][j] -= f * vt;
            }
        }
        // A <- A P
        for row in a.iter_mut() {
            let dot: f64 = v
                .iter()
                .enumerate()
                .map(|(t, vt)| vt * row[k + 1 + t])
                .sum();
            let f = beta * dot;
            for (t, vt) in v.iter().enumerate() {
                row[k + 1 + t] -= f * vt;
            }
        }
        a[k + 1][k] = alpha;
        for row in a.iter_mut().skip(k + 2) {
            row[k] = 0.0;
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix. Uses one-based
/// indexing internally to stay close to the classical EISPACK formulation.
fn hqr(h0: Vec<Vec<f64>>) -> Result<Vec<Complex64>> {
    let n = h0.len();
    let mut a = vec![vec![0.0; n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            a[i + 1][j + 1] = h0[i][j];
        }
    }
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];
    let cap = 100 * n * n;
    let mut total = 0usize;

    let mut anorm = 0.0;
    for i in 1..=n {
        for j in (i.max(2) - 1)..=n {
            anorm += a[i][j].abs();
        }
    }
    let mut nn = n;
    let mut t = 0.0;
    while nn >= 1 {
        let mut its = 0usize;
        loop {
            let mut l = 1;
            for ll in (2..=nn).rev() {
                let mut s = a[ll - 1][ll - 1].abs() + a[ll][ll].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[ll][ll - 1].abs() <= DEFLATION_TOL * s {
                    a[ll][ll - 1] = 0.0;
                    l = ll;
                    break;
                }
            }
            let mut x = a[nn][nn];
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = a[nn - 1][nn - 1];
            let mut w = a[nn][nn - 1] * a[nn - 1][nn];
            if l == nn - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + z.copysign(p);
                    wr[nn - 1] = x + z;
                    wr[nn] = x + z;
                    if z != 0.0 {
                        wr[nn] = x - w / z;
                    }
                    wi[nn - 1] = 0.0;
                    wi[nn] = 0.0;
                } else {
                    wr[nn - 1] = x + p;
                    wr[nn] = x + p;
                    wi[nn - 1] = -z;
                    wi[nn] = z;
                }
                nn = nn.saturating_sub(2);
                break;
            }
            if total >= cap {
                return Err(Error::NoConvergence { iterations: total });
            }
            if its > 0 && its.is_multiple_of(10) {
                // exceptional shift
                t += x;
                for i in 1..=nn {
                    a[i][i] -= x;
                }
                let s = a[nn][nn - 1].abs() + a[nn - 1][nn - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            total += 1;

            let (mut p, mut q, mut r, mut z);
            let mut m = nn - 2;
            loop {
                z = a[m][m];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - rr - ss;
                r = a[m + 2][m + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nn {
                a[i][i - 2] = 0.0;
                if i != m + 2 {
                    a[i][i - 3] = 0.0;
                }
            }
            let mut k = m;
            while k < nn {
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = if k != nn - 1 { a[k + 2][k - 1] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nn {
                        p = a[k][j] + q * a[k + 1][j];
                        if k != nn - 1 {
                            p += r * a[k + 2][j];
                            a[k + 2][j] -= p * z;
                        }
                        a[k + 1][j] -= p * y;
                        a[k][j] -= p * x;
                    }
                    let mmin = if nn < k + 3 { nn } else { k + 3 };
                    for i in l..=mmin {
                        p = x * a[i][k] + y * a[i][k + 1];
                        if k != nn - 1 {
                            p += z * a[i][k + 2];
                            a[i][k + 2] -= p * r;
                        }
                        a[i][k + 1] -= p * q;
                        a[i][k] -= p;
                    }
                }
                k += 1;
            }
            if l >= nn - 1 {
                break;
            }
        }
    }
    Ok((1..=n).map(|i| Complex64::new(wr[i], wi[i])).collect())
}

/// Perron root from a sorted spectrum, checked to be real and positive.
fn perron_root(eig: &[Complex64]) -> Result<f64> {
    let top = eig[0];
    let modulus = top.norm();
    if top.im.abs() > PERRON_IMAG_TOL * modulus || top.re <= 0.0 {
        return Err(Error::PerronNotReal {
            imag: top.im,
            modulus,
        });
    }
    Ok(top.re)
}

/// Second largest modulus over the Perron root.
fn ratio_from_sorted(eig: &[Complex64]) -> Result<(f64, f64)> {
    let rho = perron_root(eig)?;
    let first = eig[0].norm();
    let second = eig.get(1).map_or(0.0, |z| z.norm());
    if second >= first * (1.0 - PERRON_TIE_TOL) {
        return Err(Error::PerronAmbiguous { first, second });
    }
    Ok((rho, second / rho))
}

/// `rho(A)`, the eigenvalue of maximal modulus.
pub fn spectral_radius(a: &PositiveMatrix) -> Result<f64> {
    perron_root(&eigenvalues(a)?)
}

/// `kappa(A)`: largest non-Perron modulus divided by `rho(A)`.
pub fn spectral_ratio_kappa(a: &PositiveMatrix) -> Result<f64> {
    ratio_from_sorted(&eigenvalues(a)?).map(|(_, k)| k)
}

/// Perron vector by inverse iteration on `A - rho I`.
fn perron_vector(a: &PositiveMatrix, rho: f64) -> Result<SimplexVector> {
    let n = a.n();
    let mut lu: Vec<f64> = a.entries().to_vec();
    for i in 0..n {
        lu[i * n + i] -= rho;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let floor = rho * f64::EPSILON;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&x, &y| lu[x * n + k].abs().total_cmp(&lu[y * n + k].abs()))
            .unwrap_or(k);
        if p != k {
            for j in 0..n {
                lu.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
        }
        if lu[k * n + k].abs() < floor {
            lu[k * n + k] = floor;
        }
        for i in k + 1..n {
            let f = lu[i * n + k] / lu[k * n + k];
            lu[i * n + k] = f;
            for j in k + 1..n {
                lu[i * n + j] -= f * lu[k * n + j];
            }
        }
    }
    let mut x = vec![1.0 / n as f64; n];
    for _ in 0..3 {
        let mut y: Vec<f64> = perm.iter().map(|&p| x[p]).collect();
        for i in 0..n {
            for j in 0..i {
                y[i] -= lu[i * n + j] * y[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                y[i] -= lu[i * n + j] * y[j];
            }
            y[i] /= lu[i * n + i];
        }
        let s: f64 = y.iter().sum();
        x = y.iter().map(|v| v / s).collect();
    }
    normalize(&x)
}

/// Full oracle report: spectrum, `rho`, `kappa`, Perron vector and
/// trace/determinant consistency residuals.
pub fn spectral_report(a: &PositiveMatrix) -> Result<SpectralReport> {
    let eigenvalues = eigenvalues(a)?;
    let (rho, kappa) = ratio_from_sorted(&eigenvalues)?;
    let perron_vector = perron_vector(a, rho)?;
    let sum: Complex64 = eigenvalues.iter().sum();
    let prod: Complex64 = eigenvalues.iter().product();
    let trace = a.trace();
    let hadamard: f64 = (0..a.n())
        .map(|i| a.row(i).iter().map(|x| x * x).sum::<f64>().sqrt())
        .product();
    Ok(SpectralReport {
        trace_residual: (Complex64::new(trace, 0.0) - sum).norm() / trace.abs(),
        det_residual: (Complex64::new(a.determinant(), 0.0) - prod).norm() / hadamard,
        eigenvalues,
        rho,
        kappa,
        perron_vector,
    })
}

/// Monic characteristic polynomial coefficients `[1, c_1, ..., c_n]` by the
/// Faddeev-LeVerrier recursion.
pub fn char_poly(a: &PositiveMatrix) -> Vec<f64> {
    let n = a.n();
    let mut coeffs = vec![1.0];
    let mut m = vec![0.0; n * n];
    let mut c_prev = 1.0;
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{k-1} I
        let mut next = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s: f64 = (0..n).map(|t| a.get(i, t) * m[t * n + j]).sum();
                if i == j {
                    s += c_prev;
                }
                next[i * n + j] = s;
            }
        }
        m = next;
        let tr: f64 = (0..n)
            .map(|i| (0..n).map(|t| a.get(i, t) * m[t * n + i]).sum::<f64>())
            .sum();
        c_prev = -tr / k as f64;
        coeffs.push(c_prev);
    }
    coeffs
}

fn horner(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Roots of a monic polynomial by Aberth-Ehrlich simultaneous iteration.
fn aberth(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let bound = 1.0 + coeffs[1..].iter().fold(0.0f64, |acc, c| acc.max(c.abs()));
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(bound, std::f64::consts::TAU * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..1000 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let (p, dp) = horner(coeffs, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            z[k] -= step;
            moved = moved.max(step.norm() / z[k].norm().max(1.0));
        }
        if moved < 1e-16 {
            break;
        }
    }
    z
}

/// Eigenvalues for `n <= 4` from the characteristic polynomial: closed form
/// for `n = 2`, simultaneous root iteration otherwise. Shares no code with the
/// QR route.
pub fn char_poly_roots_small(a: &PositiveMatrix) -> Result<Vec<Complex64>> {
    let n = a.n();
    if n > MAX_POLY_DIM {
        return Err(Error::TooLarge {
            n,
            max: MAX_POLY_DIM,
        });
    }
    let c = char_poly(a);
    let mut roots = if n == 2 {
        let (b, cc) = (c[1], c[2]);
        let disc = b * b - 4.0 * cc;
        if disc >= 0.0 {
            let q = -0.5 * (b + disc.sqrt().copysign(b));
            let other = if q != 0.0 { cc / q } else { 0.0 };
            vec![Complex64::new(q, 0.0), Complex64::new(other, 0.0)]
        } else {
            let im = 0.5 * (-disc).sqrt();
            vec![Complex64::new(-0.5 * b, im), Complex64::new(-0.5 * b, -im)]
        }
    } else {
        aberth(&c)
    };
    roots.sort_by(spectral_order);
    Ok(roots)
}

/// Largest distance between two spectra under greedy nearest pairing.
pub fn spectrum_distance(a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    crate::matrix::check_dim(a.len(), b.len())?;
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("equal lengths");
        used[j] = true;
        worst = worst.max(d);
    }
    Ok(worst)
}
