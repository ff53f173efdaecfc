//! State sets, Gram matrices and circulant structure.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{
    circulant_from_first_row, dft_eigenvalues, eig_hermitian, eigenvalues,
    first_row_from_eigenvalues, root_of_unity, shift_deviation, ComplexMatrix, HermitianMatrix,
};

/// Allowed deviation of a state's Euclidean norm from 1.
pub const NORM_TOL: f64 = 1e-10;
/// Allowed deviation of a Gram diagonal entry from 1.
pub const UNIT_DIAGONAL_TOL: f64 = 1e-10;
/// Default absolute tolerance for circulant detection.
pub const DEFAULT_CIRCULANT_TOL: f64 = 1e-9;

/// Ordered list of `n >= 2` unit vectors in `C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSet {
    d: usize,
    states: Vec<Vec<C64>>,
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

impl StateSet {
    /// Validates dimensions and norms, then rescales each state to unit norm
    /// exactly so downstream Gram matrices carry an exact unit diagonal.
    pub fn new(states: Vec<Vec<C64>>) -> Result<Self> {
        if states.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "a state set needs at least 2 states, got {}",
                states.len()
            )));
        }
        let d = states[0].len();
        if d == 0 {
            return Err(Error::InvalidParameter(
                "states must have dimension >= 1".into(),
            ));
        }
        if let Some((i, s)) = states.iter().enumerate().find(|(_, s)| s.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: format!("states of dimension {d}"),
                found: format!("dimension {} for state {i}", s.len()),
            });
        }
        if let Some(i) = states
            .iter()
            .position(|s| s.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()))
        {
            return Err(Error::NonFinite { row: i, col: 0 });
        }
        let bad: Vec<usize> = states
            .iter()
            .enumerate()
            .filter(|(_, s)| (norm(s) - 1.0).abs() > NORM_TOL)
            .map(|(i, _)| i)
            .collect();
        if !bad.is_empty() {
            return Err(Error::NotNormalized { indices: bad });
        }
        Ok(Self::normalized(states))
    }

    fn normalized(states: Vec<Vec<C64>>) -> Self {
        let d = states[0].len();
        let states = states
            .into_iter()
            .map(|s| {
                let r = norm(&s);
                s.into_iter().map(|z| z / r).collect()
            })
            .collect();
        Self { d, states }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[Vec<C64>] {
        &self.states
    }

    /// The `d x n` matrix with `|ψ_k⟩` as its k-th column.
    pub fn w_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.d, self.n(), |i, k| self.states[k][i])
    }

    pub fn gram(&self) -> GramMatrix {
        gram_from_states(self)
    }

    /// `{U|ψ_k⟩}` for a `d x d` matrix `u` (normally unitary).
    pub fn transformed(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != self.d || u.cols() != self.d {
            return Err(Error::DimensionMismatch {
                expected: format!("{0}x{0} matrix", self.d),
                found: format!("{}x{}", u.rows(), u.cols()),
            });
        }
        Self::new(self.states.iter().map(|s| u.mul_vec(s)).collect())
    }

    /// Embeds the states into `C^d` with `d >= self.d()` by zero padding.
    pub fn padded(&self, d: usize) -> Result<Self> {
        if d < self.d {
            return Err(Error::InvalidParameter(format!(
                "cannot pad dimension {} down to {d}",
                self.d
            )));
        }
        Ok(Self {
            d,
            states: self
                .states
                .iter()
                .map(|s| {
                    let mut p = s.clone();
                    p.resize(d, C64::new(0.0, 0.0));
                    p
                })
                .collect(),
        })
    }
}

/// `n x n` PSD Hermitian matrix with unit diagonal, `G[i][j] = ⟨ψᵢ|ψⱼ⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    inner: HermitianMatrix,
}

impl GramMatrix {
    pub fn new(h: HermitianMatrix) -> Result<Self> {
        let n = h.dim();
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "a Gram matrix needs n >= 2, got {n}"
            )));
        }
        for i in 0..n {
            let v = h[(i, i)].re;
            if (v - 1.0).abs() > UNIT_DIAGONAL_TOL {
                return Err(Error::NotUnitDiagonal { index: i, value: v });
            }
            for j in 0..n {
                let m = h[(i, j)].norm();
                if i != j && m > 1.0 + 1e-10 {
                    return Err(Error::EntryTooLarge {
                        row: i,
                        col: j,
                        modulus: m,
                    });
                }
            }
        }
        let min_eig = eigenvalues(&h)?.last().copied().unwrap_or(0.0);
        if min_eig < -1e-8 * n as f64 {
            return Err(Error::NotPsd { min_eig });
        }
        Ok(Self { inner: h })
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        Self::new(HermitianMatrix::from_rows(rows)?)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::new(HermitianMatrix::from_real_rows(rows)?)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(HermitianMatrix::identity(n))
    }

    pub fn n(&self) -> usize {
        self.inner.dim()
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.inner
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.inner[(i, j)]
    }

    /// `|G[i][j]|` for all ordered pairs `i != j`.
    pub fn off_diagonal_moduli(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.n();
        (0..n).flat_map(move |i| {
            (0..n)
                .filter(move |&j| j != i)
                .map(move |j| self.inner[(i, j)].norm())
        })
    }

    /// Eigenvalues sorted descending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        eigenvalues(&self.inner)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.frobenius_norm()
    }
}

pub fn gram_from_states(s: &StateSet) -> GramMatrix {
    let w = s.w_matrix();
    let g = HermitianMatrix::new(&w.adjoint() * &w).expect("W*W is Hermitian");
    GramMatrix { inner: g }
}

/// A state set realizing `g` in its minimal dimension `d = rank(g)`,
/// built as `W = Λ^{1/2} Q*` over the eigenvalues above `rank_tol`
/// (default `1e-10 · max(1, λ_max)`).
pub fn states_from_gram(g: &GramMatrix, rank_tol: Option<f64>) -> Result<StateSet> {
    let spectrum = eig_hermitian(g.as_hermitian())?;
    let tol = rank_tol.unwrap_or(1e-10 * spectrum.max().max(1.0));
    let q = spectrum
        .eigenvectors
        .as_ref()
        .expect("requested eigenvectors");
    let kept: Vec<usize> = (0..g.n())
        .filter(|&k| spectrum.eigenvalues[k] > tol)
        .collect();
    if kept.is_empty() {
        return Err(Error::NotPsd {
            min_eig: spectrum.min(),
        });
    }
    let states = (0..g.n())
        .map(|j| {
            kept.iter()
                .map(|&k| q[(j, k)].conj() * spectrum.eigenvalues[k].sqrt())
                .collect()
        })
        .collect();
    Ok(StateSet::normalized(states))
}

/// Circulant structure of a Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantProfile {
    pub is_circulant: bool,
    pub first_row: Vec<C64>,
    /// `max_{i,j} |G[i][j] - G[i+1][j+1]|` (indices mod n).
    pub deviation: f64,
    /// Largest imaginary part among the DFT eigenvalues.
    pub imaginary_residue: f64,
    /// Real parts of the DFT of the first row, in bin order.
    pub dft_eigenvalues: Vec<f64>,
    /// `dft_eigenvalues` sorted descending.
    pub eigenvalues: Vec<f64>,
}

pub fn circulant_profile(g: &GramMatrix, tol: f64) -> CirculantProfile {
    let m = g.as_hermitian().as_matrix();
    let deviation = shift_deviation(m);
    let first_row = m.row(0).to_vec();
    let dft = dft_eigenvalues(&first_row);
    let imaginary_residue = dft.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let dft_eigenvalues: Vec<f64> = dft.iter().map(|z| z.re).collect();
    let mut eigenvalues = dft_eigenvalues.clone();
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    CirculantProfile {
        is_circulant: deviation <= tol,
        first_row,
        deviation,
        imaginary_residue,
        dft_eigenvalues,
        eigenvalues,
    }
}

/// `G = F diag(λ) F*` for nonnegative `λ` summing to `n` (DFT bin order).
pub fn circulant_from_eigenvalues(lams: &[f64]) -> Result<GramMatrix> {
    let n = lams.len();
    if let Some(&bad) = lams.iter().find(|&&l| !l.is_finite() || l < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eigenvalues must be finite and nonnegative, got {bad}"
        )));
    }
    let total: f64 = lams.iter().sum();
    if (total - n as f64).abs() > 1e-8 {
        return Err(Error::InvalidParameter(format!(
            "eigenvalues must sum to n = {n}, got {total}"
        )));
    }
    let scaled: Vec<f64> = lams.iter().map(|l| l * n as f64 / total).collect();
    let mut row = first_row_from_eigenvalues(&scaled);
    row[0] = C64::new(1.0, 0.0);
    GramMatrix::new(HermitianMatrix::symmetrize(circulant_from_first_row(&row)))
}

/// Generator of a circulant set: `|ψ_k⟩ = U^k |ψ⟩` where `U` multiplies
/// coordinate `j` by `phases[j] = ω^{-j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricGenerator {
    /// `√(λ_j / n)` with `λ` in DFT bin order.
    pub state: Vec<f64>,
    pub phases: Vec<C64>,
}

impl SymmetricGenerator {
    pub fn states(&self) -> Result<StateSet> {
        let n = self.state.len();
        StateSet::new(
            (0..n)
                .map(|k| {
                    self.state
                        .iter()
                        .zip(&self.phases)
                        .map(|(&a, p)| p.powu(k as u32) * a)
                        .collect()
                })
                .collect(),
        )
    }
}

pub fn symmetric_generator(g: &GramMatrix) -> Result<SymmetricGenerator> {
    let profile = circulant_profile(g, DEFAULT_CIRCULANT_TOL);
    if !profile.is_circulant {
        return Err(Error::NotCirculant {
            deviation: profile.deviation,
        });
    }
    let n = g.n();
    Ok(SymmetricGenerator {
        state: profile
            .dft_eigenvalues
            .iter()
            .map(|&l| (l.max(0.0) / n as f64).sqrt())
            .collect(),
        phases: (0..n).map(|j| root_of_unity(n, -(j as i64))).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn orthonormal_basis_gives_identity() {
        let n = 4;
        let states = (0..n)
            .map(|k| (0..n).map(|j| c(if j == k { 1.0 } else { 0.0 })).collect())
            .collect();
        let g = StateSet::new(states).unwrap().gram();
        assert_eq!(g.as_hermitian(), &HermitianMatrix::identity(n));
    }

    #[test]
    fn repeated_state_gives_all_ones() {
        let s = vec![c(0.6), C64::new(0.0, 0.8)];
        let g = StateSet::new(vec![s.clone(), s]).unwrap().gram();
        let ones = HermitianMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]).unwrap();
        assert!(g.as_hermitian().as_matrix().max_abs_diff(ones.as_matrix()) < 1e-15);
    }

    #[test]
    fn rejects_unnormalized_states_with_indices() {
        let err = StateSet::new(vec![
            vec![c(1.0), c(0.0)],
            vec![c(1.0), c(1.0)],
            vec![c(0.0), c(2.0)],
        ])
        .unwrap_err();
        match err {
            Error::NotNormalized { indices } => assert_eq!(indices, vec![1, 2]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn gram_validation_errors() {
        assert!(matches!(
            GramMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 2.0]]),
            Err(Error::NotUnitDiagonal { index: 1, .. })
        ));
        assert!(matches!(
            GramMatrix::from_real_rows(&[&[1.0, 1.5], &[1.5, 1.0]]),
            Err(Error::EntryTooLarge { .. })
        ));
        // Unit diagonal, moduli <= 1, but indefinite.
        assert!(matches!(
            GramMatrix::from_real_rows(&[&[1.0, 1.0, -1.0], &[1.0, 1.0, 1.0], &[-1.0, 1.0, 1.0]]),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn rank_one_gram_factors_in_dimension_one() {
        let g = GramMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]).unwrap();
        let s = states_from_gram(&g, None).unwrap();
        assert_eq!(s.d(), 1);
        assert!((s.states()[0][0] - s.states()[1][0]).norm() < 1e-15);
    }

    #[test]
    fn identity_factors_into_orthonormal_states() {
        let g = GramMatrix::identity(3).unwrap();
        let s = states_from_gram(&g, None).unwrap();
        assert_eq!(s.d(), 3);
        assert!(
            s.gram()
                .as_hermitian()
                .as_matrix()
                .max_abs_diff(g.as_hermitian().as_matrix())
                < 1e-15
        );
    }

    #[test]
    fn circulant_from_eigenvalue_errors() {
        assert!(circulant_from_eigenvalues(&[2.0, -0.5, 1.5]).is_err());
        assert!(circulant_from_eigenvalues(&[1.0, 1.0, 0.5]).is_err());
        let id = circulant_from_eigenvalues(&[1.0; 5]).unwrap();
        assert!(
            id.as_hermitian()
                .as_matrix()
                .max_abs_diff(&ComplexMatrix::identity(5))
                < 1e-15
        );
    }

    #[test]
    fn generator_rejects_non_circulant() {
        let g = GramMatrix::from_real_rows(&[&[1.0, 0.5, 0.0], &[0.5, 1.0, 0.0], &[0.0, 0.0, 1.0]])
            .unwrap();
        assert!(matches!(
            symmetric_generator(&g),
            Err(Error::NotCirculant { .. })
        ));
    }
}
