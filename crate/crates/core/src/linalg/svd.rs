//! One-sided (Hestenes) Jacobi SVD and the Moore–Penrose pseudoinverse.

use num_complex::Complex64 as C64;

use super::eig::jacobi_rotation;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Thin factors of `A = Σ σₖ uₖ vₖ*`, one triple per column of `A`.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `A V`: mutually orthogonal columns with norms `σₖ`.
    pub scaled_left: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub right: ComplexMatrix,
}

fn col_dot(a: &ComplexMatrix, p: usize, q: usize) -> C64 {
    (0..a.rows()).map(|k| a[(k, p)].conj() * a[(k, q)]).sum()
}

fn col_norm_sqr(a: &ComplexMatrix, p: usize) -> f64 {
    (0..a.rows()).map(|k| a[(k, p)].norm_sqr()).sum()
}

pub fn svd(a: &ComplexMatrix) -> Result<Svd> {
    let n = a.cols();
    let mut work = a.clone();
    let mut v = ComplexMatrix::identity(n);
    let mut converged = n < 2;
    // Columns this small are roundoff from rank deficiency; rotating them only churns.
    let negligible = (f64::EPSILON * a.frobenius_norm()).powi(2);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = col_norm_sqr(&work, p);
                let beta = col_norm_sqr(&work, q);
                let gamma = col_dot(&work, p, q);
                if alpha <= negligible
                    || beta <= negligible
                    || gamma.norm() <= f64::EPSILON * (alpha * beta).sqrt()
                {
                    continue;
                }
                // Diagonalize the 2x2 Gram block [[alpha, gamma], [conj(gamma), beta]].
                let j = jacobi_rotation(alpha, beta, gamma);
                work.rotate_columns(p, q, &j);
                v.rotate_columns(p, q, &j);
                rotated = true;
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps: MAX_SWEEPS,
            residual: f64::NAN,
        });
    }
    let singular_values = (0..n).map(|k| col_norm_sqr(&work, k).sqrt()).collect();
    Ok(Svd {
        scaled_left: work,
        singular_values,
        right: v,
    })
}

/// Moore–Penrose pseudoinverse. Singular values at or below `rank_tol`
/// count as zero; `None` means `1e-10 · σ_max`.
pub fn pseudoinverse(w: &ComplexMatrix, rank_tol: Option<f64>) -> Result<ComplexMatrix> {
    let Svd {
        scaled_left,
        singular_values,
        right,
    } = svd(w)?;
    let smax = singular_values.iter().copied().fold(0.0, f64::max);
    let tol = rank_tol.unwrap_or(1e-10 * smax);
    let (d, n) = (w.rows(), w.cols());
    // W† = Σ_k v_k (A v_k)* / σ_k².
    let mut out = ComplexMatrix::zeros(n, d);
    for (k, &s) in singular_values.iter().enumerate() {
        if s <= tol || s == 0.0 {
            continue;
        }
        let inv = 1.0 / (s * s);
        for i in 0..n {
            let vi = right[(i, k)] * inv;
            for j in 0..d {
                out[(i, j)] += vi * scaled_left[(j, k)].conj();
            }
        }
    }
    Ok(out)
}
