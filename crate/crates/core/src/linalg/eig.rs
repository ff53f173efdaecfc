//! Cyclic Jacobi eigensolver for dense complex Hermitian matrices.
//!
//! Each step applies a unitary plane rotation `J = diag(1, e^{-iφ}) R(θ)`
//! on coordinates `(p, q)`: the phase factor makes the pivot real, after
//! which the classical real Jacobi angle annihilates it.

use num_complex::Complex64 as C64;

use super::matrix::{ComplexMatrix, HermitianMatrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues sorted descending, with optional eigenvectors as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<ComplexMatrix>,
}

impl Spectrum {
    pub fn max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `Q diag(f(λ)) Q*`. Panics if eigenvectors were not requested.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let q = self
            .eigenvectors
            .as_ref()
            .expect("spectrum computed without eigenvectors");
        let n = q.rows();
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let qi = q[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += qi * q[(j, k)].conj();
                }
            }
        }
        HermitianMatrix::symmetrize(out)
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.reconstruct_with(|l| l)
    }
}

/// Rotation annihilating the `(p, q)` entry of a Hermitian matrix with
/// diagonal entries `app`, `aqq` and pivot `apq`.
pub(crate) fn jacobi_rotation(app: f64, aqq: f64, apq: C64) -> [[C64; 2]; 2] {
    let r = apq.norm();
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.is_infinite() {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + theta.hypot(1.0))
    };
    let c = 1.0 / t.hypot(1.0);
    let s = t * c;
    let conj_phase = phase.conj();
    [
        [C64::new(c, 0.0), C64::new(s, 0.0)],
        [-conj_phase * s, conj_phase * c],
    ]
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Diagonalizes `a` in place, accumulating rotations into `v`.
fn jacobi_in_place(a: &mut ComplexMatrix, v: &mut ComplexMatrix) -> Result<()> {
    let n = a.rows();
    let norm = a.frobenius_norm();
    if norm == 0.0 {
        return Ok(());
    }
    let target = f64::EPSILON * norm;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(a) <= target {
            return Ok(());
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.norm() <= f64::MIN_POSITIVE {
                    continue;
                }
                let j = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, apq);
                a.rotate_columns(p, q, &j);
                a.rotate_rows_adjoint(p, q, &j);
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                v.rotate_columns(p, q, &j);
            }
        }
    }
    let residual = off_diagonal_norm(a);
    if residual <= 1e3 * target {
        Ok(())
    } else {
        Err(Error::NoConvergence {
            sweeps: MAX_SWEEPS,
            residual,
        })
    }
}

fn sorted_spectrum(a: &ComplexMatrix, v: ComplexMatrix, with_vectors: bool) -> Spectrum {
    let n = a.rows();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // Stable: ties keep their original index order.
    order.sort_by(|&x, &y| diag[y].total_cmp(&diag[x]));
    let eigenvalues = order.iter().map(|&k| diag[k]).collect();
    let eigenvectors = with_vectors.then(|| ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]));
    Spectrum {
        eigenvalues,
        eigenvectors,
    }
}

/// Full eigendecomposition `A = Q diag(λ) Q*` with `λ` sorted descending.
pub fn eig_hermitian(a: &HermitianMatrix) -> Result<Spectrum> {
    let mut work = a.as_matrix().clone();
    let mut v = ComplexMatrix::identity(a.dim());
    jacobi_in_place(&mut work, &mut v)?;
    Ok(sorted_spectrum(&work, v, true))
}

/// Eigenvalues only, sorted descending.
pub fn eigenvalues(a: &HermitianMatrix) -> Result<Vec<f64>> {
    let mut work = a.as_matrix().clone();
    let mut v = ComplexMatrix::identity(a.dim());
    jacobi_in_place(&mut work, &mut v)?;
    Ok(sorted_spectrum(&work, v, false).eigenvalues)
}

/// Eigendecomposition starting from an approximate eigenbasis `guess`
/// (unitary). When `guess` nearly diagonalizes `a` the sweep count drops to
/// one or two, which is what the iterative solvers rely on.
pub fn eig_hermitian_warm(a: &HermitianMatrix, guess: &ComplexMatrix) -> Result<Spectrum> {
    let rotated = a.congruence(guess);
    let mut work = rotated.into_matrix();
    let mut v = guess.clone();
    jacobi_in_place(&mut work, &mut v)?;
    Ok(sorted_spectrum(&work, v, true))
}

pub fn min_eigenvalue(a: &HermitianMatrix) -> Result<f64> {
    Ok(eigenvalues(a)?.last().copied().unwrap_or(0.0))
}

/// Nearest PSD matrix in Frobenius norm: `Σ max(λᵢ, 0) qᵢqᵢ*`.
pub fn project_psd(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    Ok(eig_hermitian(a)?.reconstruct_with(|l| l.max(0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    /// Roots of the characteristic polynomial of a real symmetric 3x3 matrix,
    /// found by bisection on sign changes of det(tI - A).
    fn char_poly_roots_3x3(a: [[f64; 3]; 3]) -> Vec<f64> {
        let det = |t: f64| {
            let m = |i: usize, j: usize| if i == j { t - a[i][j] } else { -a[i][j] };
            m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
                - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
        };
        // Coefficients of t^3 + c2 t^2 + c1 t + c0 via interpolation at 0, ±1.
        let (d0, d1, dm1) = (det(0.0), det(1.0), det(-1.0));
        let c0 = d0;
        let c2 = (d1 + dm1) / 2.0 - c0;
        let c1 = (d1 - dm1) / 2.0 - 1.0;
        // Stationary points split the real line into monotone pieces.
        let disc = (4.0 * c2 * c2 - 12.0 * c1).max(0.0).sqrt();
        let s1 = (-2.0 * c2 - disc) / 6.0;
        let s2 = (-2.0 * c2 + disc) / 6.0;
        let bound = 1.0 + c0.abs() + c1.abs() + c2.abs();
        let bisect = |mut lo: f64, mut hi: f64| {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if (det(lo) <= 0.0) == (det(mid) <= 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let mut roots = vec![bisect(-bound, s1), bisect(s1, s2), bisect(s2, bound)];
        roots.sort_by(|x, y| y.total_cmp(x));
        roots
    }

    #[test]
    fn identity_spectrum() {
        let s = eig_hermitian(&HermitianMatrix::identity(3)).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn trine_gram_spectrum_matches_characteristic_polynomial() {
        let g = [[1.0, -0.5, -0.5], [-0.5, 1.0, -0.5], [-0.5, -0.5, 1.0]];
        let rows: Vec<&[f64]> = g.iter().map(|r| r.as_slice()).collect();
        let s = eig_hermitian(&HermitianMatrix::from_real_rows(&rows).unwrap()).unwrap();
        let oracle = char_poly_roots_3x3(g);
        assert_close(&oracle, &[1.5, 1.5, 0.0], 1e-9);
        assert_close(&s.eigenvalues, &oracle, 1e-9);
        assert_close(&s.eigenvalues, &[1.5, 1.5, 0.0], 1e-13);
    }

    #[test]
    fn diagonal_spectrum_sorted() {
        let s = eig_hermitian(&HermitianMatrix::diagonal(&[2.0, -1.0, 5.0])).unwrap();
        assert_eq!(s.eigenvalues, vec![5.0, 2.0, -1.0]);
    }

    #[test]
    fn complex_two_by_two() {
        // [[2, i], [-i, 2]] has eigenvalues 3 and 1.
        let a = HermitianMatrix::from_rows(vec![
            vec![C64::new(2.0, 0.0), C64::new(0.0, 1.0)],
            vec![C64::new(0.0, -1.0), C64::new(2.0, 0.0)],
        ])
        .unwrap();
        let s = eig_hermitian(&a).unwrap();
        assert_close(&s.eigenvalues, &[3.0, 1.0], 1e-14);
        assert!(s.reconstruct().as_matrix().max_abs_diff(a.as_matrix()) < 1e-14);
    }

    #[test]
    fn warm_start_agrees_with_cold() {
        let a = HermitianMatrix::from_rows(vec![
            vec![C64::new(1.0, 0.0), C64::new(0.3, 0.2), C64::new(-0.1, 0.0)],
            vec![C64::new(0.3, -0.2), C64::new(0.5, 0.0), C64::new(0.0, 0.7)],
            vec![
                C64::new(-0.1, 0.0),
                C64::new(0.0, -0.7),
                C64::new(-2.0, 0.0),
            ],
        ])
        .unwrap();
        let cold = eig_hermitian(&a).unwrap();
        let warm = eig_hermitian_warm(&a, cold.eigenvectors.as_ref().unwrap()).unwrap();
        assert_close(&cold.eigenvalues, &warm.eigenvalues, 1e-13);
        assert!(warm.reconstruct().as_matrix().max_abs_diff(a.as_matrix()) < 1e-13);
    }

    #[test]
    fn psd_projection_examples() {
        let p = project_psd(&HermitianMatrix::diagonal(&[1.0, -1.0])).unwrap();
        assert!(
            p.as_matrix()
                .max_abs_diff(HermitianMatrix::diagonal(&[1.0, 0.0]).as_matrix())
                < 1e-15
        );

        let p = project_psd(&HermitianMatrix::identity(2).scale(-1.0)).unwrap();
        assert_eq!(p.frobenius_norm(), 0.0);

        let psd = HermitianMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        let p = project_psd(&psd).unwrap();
        assert!(p.as_matrix().max_abs_diff(psd.as_matrix()) <= 1e-12 * psd.frobenius_norm());
    }
}
