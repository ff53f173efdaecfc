//! Fourier matrix, cyclic shift, circulant construction and the circulant
//! twirl (orthogonal projection onto circulant matrices).

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::matrix::{ComplexMatrix, HermitianMatrix};

/// `ω^k` for `ω = exp(2πi/n)`, with `k` reduced mod `n` before the angle is formed.
pub fn root_of_unity(n: usize, k: i64) -> C64 {
    let r = k.rem_euclid(n as i64) as f64;
    C64::from_polar(1.0, 2.0 * PI * r / n as f64)
}

/// `F[j][k] = ω^{jk} / √n`.
pub fn fourier_matrix(n: usize) -> ComplexMatrix {
    let s = 1.0 / (n as f64).sqrt();
    ComplexMatrix::from_fn(n, n, |j, k| root_of_unity(n, (j * k) as i64) * s)
}

/// Cyclic permutation `P` with `P[i][(i + 1) mod n] = 1`.
pub fn shift_matrix(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| {
        if j == (i + 1) % n {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Circulant matrix with `C[j][k] = row[(k - j) mod n]`.
pub fn circulant_from_first_row(row: &[C64]) -> ComplexMatrix {
    let n = row.len();
    ComplexMatrix::from_fn(n, n, |j, k| row[(k + n - j) % n])
}

/// Eigenvalues of the circulant matrix with first row `row`, in DFT bin
/// order: `λ_m = Σ_l row[l] ω^{ml}`. Bin `m` belongs to Fourier column `m`.
pub fn dft_eigenvalues(row: &[C64]) -> Vec<C64> {
    let n = row.len();
    (0..n)
        .map(|m| {
            row.iter()
                .enumerate()
                .map(|(l, g)| g * root_of_unity(n, (m * l) as i64))
                .sum()
        })
        .collect()
}

/// First row of the circulant matrix with DFT-bin eigenvalues `lams`:
/// `g_l = (1/n) Σ_m λ_m ω^{-ml}`.
pub fn first_row_from_eigenvalues(lams: &[f64]) -> Vec<C64> {
    let n = lams.len();
    (0..n)
        .map(|l| {
            lams.iter()
                .enumerate()
                .map(|(m, &lam)| root_of_unity(n, -((m * l) as i64)) * lam)
                .sum::<C64>()
                / n as f64
        })
        .collect()
}

/// Average of the wrapped diagonals: `c_l = (1/n) Σ_j A[j][(j + l) mod n]`.
pub fn twirled_first_row(a: &ComplexMatrix) -> Vec<C64> {
    let n = a.rows();
    (0..n)
        .map(|l| (0..n).map(|j| a[(j, (j + l) % n)]).sum::<C64>() / n as f64)
        .collect()
}

/// `P_C(A) = (1/n) Σ_j P^j A (P^j)*`.
pub fn circulant_twirl(a: &HermitianMatrix) -> HermitianMatrix {
    HermitianMatrix::symmetrize(circulant_from_first_row(&twirled_first_row(a.as_matrix())))
}

/// `max_{i,j} |A[i][j] - A[(i+1) mod n][(j+1) mod n]|`.
pub fn shift_deviation(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((a[(i, j)] - a[((i + 1) % n, (j + 1) % n)]).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourier_small_cases() {
        let f1 = fourier_matrix(1);
        assert_eq!(f1[(0, 0)], C64::new(1.0, 0.0));
        let f2 = fourier_matrix(2);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expect = ComplexMatrix::from_real_rows(&[&[h, h], &[h, -h]]).unwrap();
        assert!(f2.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn fourier_diagonalizes_shift() {
        let n = 4;
        let f = fourier_matrix(n);
        let d = &(&f.adjoint() * &shift_matrix(n)) * &f;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    assert!(d[(i, j)].norm() < 1e-15);
                }
            }
        }
        // P f_m = ω^m f_m.
        for m in 0..n {
            assert!((d[(m, m)] - root_of_unity(n, m as i64)).norm() < 1e-15);
        }
    }

    #[test]
    fn shift_has_order_n() {
        for n in 1..7 {
            let p = shift_matrix(n);
            let mut acc = ComplexMatrix::identity(n);
            for _ in 0..n {
                acc = &acc * &p;
            }
            assert_eq!(acc, ComplexMatrix::identity(n));
        }
    }

    #[test]
    fn twirl_of_corner_is_scaled_identity() {
        let n = 5;
        let mut d = vec![0.0; n];
        d[0] = 1.0;
        let t = circulant_twirl(&HermitianMatrix::diagonal(&d));
        let expect = HermitianMatrix::identity(n).scale(1.0 / n as f64);
        assert!(t.as_matrix().max_abs_diff(expect.as_matrix()) < 1e-16);
    }

    #[test]
    fn eigenvalue_round_trip() {
        let lams = [2.1, 1.9, 0.0, 0.0];
        let row = first_row_from_eigenvalues(&lams);
        let back = dft_eigenvalues(&row);
        for (a, b) in back.iter().zip(lams) {
            assert!((a - C64::new(b, 0.0)).norm() < 1e-14);
        }
    }
}
