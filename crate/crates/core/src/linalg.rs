//! Small dense complex linear algebra: Hermitian eigendecomposition and
//! polynomial root finding.
//!
//! The matrices here are tiny (smoothed covariances up to 64x64, Gram
//! matrices up to a handful of columns), so a cyclic Jacobi eigensolver and a
//! Durand-Kerner root finder are plenty and keep the crate dependency-free
//! on the linear-algebra side.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("polynomial has no nonzero coefficients")]
    ZeroPolynomial,
    #[error("root finder did not reach a backward-stable residual in {0} iterations")]
    NoConvergence(usize),
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Real eigenvalues, largest first.
    pub values: Vec<f64>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<Complex64>>,
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix given as rows.
///
/// Only the values actually stored are trusted to be Hermitian; the strictly
/// lower triangle is read as the conjugate of the upper one.
#[allow(clippy::needless_range_loop)] // rotations touch rows p and q together
pub fn eigh(matrix: &[Vec<Complex64>]) -> HermitianEig {
    let m = matrix.len();
    let mut a: Vec<Vec<Complex64>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| if j >= i { matrix[i][j] } else { matrix[j][i].conj() })
                .collect()
        })
        .collect();
    let mut v: Vec<Vec<Complex64>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    if i == j {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect()
        })
        .collect();

    let norm: f64 = a
        .iter()
        .flat_map(|row| row.iter().map(|z| z.norm_sqr()))
        .sum::<f64>()
        .sqrt();
    let tol = 1e-14 * (1.0 + norm);

    for _sweep in 0..100 {
        let off: f64 = a
            .iter()
            .enumerate()
            .map(|(i, row)| row[i + 1..].iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum();
        if (2.0 * off).sqrt() <= tol {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = a[p][q];
                let mag = apq.norm();
                if mag < 1e-300 {
                    continue;
                }
                let phase = apq / mag; // e^{j arg}
                let app = a[p][p].re;
                let aqq = a[q][q].re;
                let theta = 0.5 * (2.0 * mag).atan2(app - aqq);
                let (s, c) = theta.sin_cos();
                let s_pos = s * phase; // s * e^{j phi}
                let s_neg = s * phase.conj();

                // Row update: A <- J^H A.
                for i in 0..m {
                    let tp = a[p][i];
                    let tq = a[q][i];
                    a[p][i] = c * tp + s_pos * tq;
                    a[q][i] = -s_neg * tp + c * tq;
                }
                // Column update: A <- A J.
                for i in 0..m {
                    let tp = a[i][p];
                    let tq = a[i][q];
                    a[i][p] = c * tp + s_neg * tq;
                    a[i][q] = -s_pos * tp + c * tq;
                }
                // Eigenvector accumulation: V <- V J.
                for row in v.iter_mut() {
                    let tp = row[p];
                    let tq = row[q];
                    row[p] = c * tp + s_neg * tq;
                    row[q] = -s_pos * tp + c * tq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| a[j][j].re.partial_cmp(&a[i][i].re).unwrap());

    let values = order.iter().map(|&k| a[k][k].re).collect();
    let vectors = order
        .iter()
        .map(|&k| (0..m).map(|i| v[i][k]).collect())
        .collect();
    HermitianEig { values, vectors }
}

/// Solve `G u = b` for Hermitian `G` through its eigendecomposition and
/// report the spectral condition number alongside the solution.
pub fn solve_hermitian(g: &[Vec<Complex64>], b: &[Complex64]) -> (Vec<Complex64>, f64) {
    let eig = eigh(g);
    let lambda_max = eig.values.first().copied().unwrap_or(0.0).abs();
    let lambda_min = eig
        .values
        .iter()
        .map(|l| l.abs())
        .fold(f64::INFINITY, f64::min);
    let cond = if lambda_min > 0.0 {
        lambda_max / lambda_min
    } else {
        f64::INFINITY
    };
    let n = b.len();
    let mut u = vec![Complex64::new(0.0, 0.0); n];
    for (lambda, vec) in eig.values.iter().zip(&eig.vectors) {
        if *lambda == 0.0 {
            continue;
        }
        let coef: Complex64 = vec.iter().zip(b).map(|(v, bi)| v.conj() * bi).sum();
        let scaled = coef / *lambda;
        for (ui, vi) in u.iter_mut().zip(vec) {
            *ui += scaled * vi;
        }
    }
    (u, cond)
}

/// Horner evaluation of a polynomial with ascending coefficients.
pub fn poly_eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// All complex roots of the polynomial `sum_k coeffs[k] * z^k`.
///
/// Aberth-Ehrlich iteration started from Newton-polygon radius estimates, so
/// polynomials whose roots span a wide range of magnitudes (small leading
/// coefficients, reciprocal root pairs) still converge. A root set is
/// accepted once every `|p(z_i)|` falls below a small multiple of the
/// evaluation's own rounding level `sum_k |c_k| |z_i|^k * eps`, which keeps
/// clustered (near-multiple) roots from stalling a step-size test.
pub fn find_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
    let max_norm = coeffs.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    if max_norm == 0.0 {
        return Err(LinalgError::ZeroPolynomial);
    }
    // Trim negligible leading coefficients so the monic scaling stays sane.
    let mut hi = coeffs.len();
    while hi > 1 && coeffs[hi - 1].norm() <= 1e-14 * max_norm {
        hi -= 1;
    }
    // Exact zero trailing coefficients are roots at the origin.
    let mut lo = 0;
    let mut roots = Vec::new();
    while lo < hi - 1 && coeffs[lo].norm() == 0.0 {
        roots.push(Complex64::new(0.0, 0.0));
        lo += 1;
    }
    let lead = coeffs[hi - 1];
    let monic: Vec<Complex64> = coeffs[lo..hi].iter().map(|c| c / lead).collect();
    let degree = monic.len() - 1;
    if degree == 0 {
        return Ok(roots);
    }
    if degree == 1 {
        roots.push(-monic[0]);
        return Ok(roots);
    }

    let mut z = initial_guesses(&monic);
    let abs_coeffs: Vec<f64> = monic.iter().map(|c| c.norm()).collect();
    let residual_ok = |zi: Complex64| {
        let p = poly_eval(&monic, zi).norm();
        let scale: f64 = abs_coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * zi.norm() + c);
        p.is_finite() && p <= 64.0 * f64::EPSILON * scale.max(f64::MIN_POSITIVE)
    };

    const MAX_ITER: usize = 200;
    let mut done = vec![false; degree];
    for _iter in 0..MAX_ITER {
        let mut moved = false;
        for i in 0..degree {
            if done[i] {
                continue;
            }
            let (p, dp) = poly_eval_with_derivative(&monic, z[i]);
            if residual_ok(z[i]) {
                done[i] = true;
                continue;
            }
            let newton = if dp.norm() > 0.0 {
                p / dp
            } else {
                Complex64::new(f64::EPSILON, f64::EPSILON)
            };
            let repulsion: Complex64 = (0..degree)
                .filter(|&k| k != i)
                .map(|k| {
                    let diff = z[i] - z[k];
                    if diff.norm() < 1e-300 {
                        Complex64::new(1e300, 0.0)
                    } else {
                        diff.inv()
                    }
                })
                .sum();
            let denom = Complex64::new(1.0, 0.0) - newton * repulsion;
            let step = if denom.norm() < 1e-12 {
                newton
            } else {
                newton / denom
            };
            z[i] -= step;
            moved = true;
        }
        if !moved {
            roots.extend(z);
            return Ok(roots);
        }
    }
    if z.iter().all(|&zi| residual_ok(zi)) {
        roots.extend(z);
        return Ok(roots);
    }
    Err(LinalgError::NoConvergence(MAX_ITER))
}

/// Starting points on rings whose radii come from the upper convex hull of
/// `(k, log |c_k|)`: each hull edge contributes its group of roots at the
/// edge's slope radius, evenly spread in angle with a per-ring offset.
fn initial_guesses(monic: &[Complex64]) -> Vec<Complex64> {
    let degree = monic.len() - 1;
    let logmag: Vec<f64> = monic
        .iter()
        .map(|c| {
            let n = c.norm();
            if n > 0.0 {
                n.ln()
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    // Upper convex hull via monotone scan over coefficient index.
    let mut hull: Vec<usize> = Vec::new();
    for k in 0..=degree {
        if logmag[k] == f64::NEG_INFINITY {
            continue;
        }
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // Keep the hull upper-convex: drop b if it lies below segment a-k.
            let keep = (logmag[b] - logmag[a]) * (k - a) as f64
                > (logmag[k] - logmag[a]) * (b - a) as f64;
            if keep {
                break;
            }
            hull.pop();
        }
        hull.push(k);
    }
    let mut guesses = Vec::with_capacity(degree);
    for edge in hull.windows(2) {
        let (k1, k2) = (edge[0], edge[1]);
        let count = k2 - k1;
        let radius = ((logmag[k1] - logmag[k2]) / count as f64).exp();
        let radius = radius.clamp(1e-6, 1e6);
        for j in 0..count {
            let angle = std::f64::consts::TAU * (j as f64 + 0.5) / count as f64
                + 0.4 * k1 as f64;
            guesses.push(Complex64::from_polar(radius, angle));
        }
    }
    debug_assert_eq!(guesses.len(), degree);
    guesses
}

/// Horner evaluation returning `(p(z), p'(z))`.
fn poly_eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}
