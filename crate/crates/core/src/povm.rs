//! Moving between exclusion measurements on the states and SDP blocks on
//! the Gram matrix.
//!
//! With `W` the `d×n` matrix of states, `Fᵢ = W*MᵢW` maps a POVM to
//! feasible blocks, and `Mᵢ = (W†)*FᵢW† + (1/n)(I - WW†)` maps blocks back,
//! preserving the objective `Σᵢ⟨ψᵢ|Mᵢ|ψᵢ⟩ = Σᵢ⟨i|Fᵢ|i⟩`.

use crate::error::{Error, Result};
use crate::gram::StateSet;
use crate::linalg::{
    eig_hermitian, min_eigenvalue, project_psd, pseudoinverse, ComplexMatrix, HermitianMatrix,
};

/// Completeness `ΣMᵢ = I` must hold to this, times `d`.
pub const COMPLETENESS_TOL: f64 = 1e-8;
/// Effects may dip this far below zero.
pub const EFFECT_PSD_TOL: f64 = 1e-8;
/// Blocks handed to [`reconstruct_povm`] must sum to the Gram matrix within this.
pub const BLOCK_FEASIBILITY_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    effects: Vec<HermitianMatrix>,
}

impl Povm {
    pub fn new(effects: Vec<HermitianMatrix>) -> Result<Self> {
        let d = effects
            .first()
            .map(HermitianMatrix::dim)
            .ok_or_else(|| Error::InvalidParameter("a POVM needs at least one effect".into()))?;
        if let Some(e) = effects.iter().find(|e| e.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: format!("effects of dimension {d}"),
                found: format!("dimension {}", e.dim()),
            });
        }
        for e in &effects {
            let min_eig = min_eigenvalue(e)?;
            if min_eig < -EFFECT_PSD_TOL {
                return Err(Error::NotPsd { min_eig });
            }
        }
        let povm = Self { effects };
        let residual = povm.completeness_residual();
        if residual > COMPLETENESS_TOL * d as f64 {
            return Err(Error::Verification(format!(
                "effects sum to identity only within {residual:e}"
            )));
        }
        Ok(povm)
    }

    /// Normalizes PSD `parts` into a POVM: `Mᵢ = S^{-1/2} Aᵢ S^{-1/2}` with
    /// `S = ΣAᵢ`, which must be positive definite.
    pub fn from_parts(parts: &[HermitianMatrix]) -> Result<Self> {
        let d = parts.first().map(HermitianMatrix::dim).unwrap_or(0);
        let sum = parts
            .iter()
            .fold(HermitianMatrix::zeros(d), |acc, p| acc.add(p));
        let spectrum = eig_hermitian(&sum)?;
        if spectrum.min() <= 0.0 {
            return Err(Error::NotPsd {
                min_eig: spectrum.min(),
            });
        }
        let inv_sqrt = spectrum.reconstruct_with(|l| 1.0 / l.sqrt());
        Self::new(
            parts
                .iter()
                .map(|p| p.congruence(inv_sqrt.as_matrix()))
                .collect(),
        )
    }

    pub fn d(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn n(&self) -> usize {
        self.effects.len()
    }

    pub fn effects(&self) -> &[HermitianMatrix] {
        &self.effects
    }

    /// `‖ΣMᵢ - I‖_F`.
    pub fn completeness_residual(&self) -> f64 {
        let d = self.effects[0].dim();
        self.effects
            .iter()
            .fold(HermitianMatrix::zeros(d), |acc, e| acc.add(e))
            .sub(&HermitianMatrix::identity(d))
            .frobenius_norm()
    }

    /// `⟨ψᵢ|Mᵢ|ψᵢ⟩` for each state.
    pub fn hit_probabilities(&self, s: &StateSet) -> Result<Vec<f64>> {
        check_pair(s, self)?;
        Ok(s.states()
            .iter()
            .zip(&self.effects)
            .map(|(psi, m)| {
                let mpsi = m.as_matrix().mul_vec(psi);
                psi.iter().zip(&mpsi).map(|(a, b)| (a.conj() * b).re).sum()
            })
            .collect())
    }

    /// `Σᵢ⟨ψᵢ|Mᵢ|ψᵢ⟩`; divided by `n` this is the exclusion error probability.
    pub fn objective(&self, s: &StateSet) -> Result<f64> {
        Ok(self.hit_probabilities(s)?.iter().sum())
    }
}

fn check_pair(s: &StateSet, m: &Povm) -> Result<()> {
    if s.d() != m.d() || s.n() != m.n() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} effects on C^{}", s.n(), s.d()),
            found: format!("{} effects on C^{}", m.n(), m.d()),
        });
    }
    Ok(())
}

pub fn reconstruct_povm(s: &StateSet, blocks: &[HermitianMatrix]) -> Result<Povm> {
    let n = s.n();
    if blocks.len() != n || blocks.iter().any(|b| b.dim() != n) {
        return Err(Error::DimensionMismatch {
            expected: format!("{n} blocks of size {n}x{n}"),
            found: format!("{} blocks", blocks.len()),
        });
    }
    let gram = s.gram();
    let residual = blocks
        .iter()
        .fold(HermitianMatrix::zeros(n), |acc, b| acc.add(b))
        .sub(gram.as_hermitian())
        .frobenius_norm();
    if residual > BLOCK_FEASIBILITY_TOL {
        return Err(Error::Precondition(format!(
            "blocks sum to the Gram matrix only within {residual:e}"
        )));
    }
    let w = s.w_matrix();
    let w_pinv = pseudoinverse(&w, None)?;
    let pinv_adj = w_pinv.adjoint();
    // (1/n)(I - WW†) spreads the complement of span{ψᵢ} evenly.
    let ww = &w * &w_pinv;
    let filler =
        HermitianMatrix::symmetrize(&ComplexMatrix::identity(s.d()) - &ww).scale(1.0 / n as f64);
    let raw: Vec<HermitianMatrix> = blocks
        .iter()
        .map(|f| {
            let core = &(&pinv_adj * f.as_matrix()) * &w_pinv;
            HermitianMatrix::symmetrize(core).add(&filler)
        })
        .collect::<Vec<_>>();
    // Blocks that are feasible only up to solver tolerance leave effects that
    // are slightly indefinite or incomplete; clip and renormalize so the
    // result is an exact POVM. The objective moves by O(residual).
    let clipped = raw.iter().map(project_psd).collect::<Result<Vec<_>>>()?;
    Povm::from_parts(&clipped)
}

pub fn gram_blocks_from_povm(s: &StateSet, m: &Povm) -> Result<Vec<HermitianMatrix>> {
    check_pair(s, m)?;
    let w = s.w_matrix();
    Ok(m.effects.iter().map(|e| e.congruence(&w)).collect())
}
