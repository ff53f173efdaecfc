//! Certificates for both outcomes and their verifiers.
//!
//! A set of states is antidistinguishable iff its Gram matrix splits as
//! `G = ΣFᵢ` with `Fᵢ ⪰ 0` and row/column `i` of `Fᵢ` zero. It is not iff
//! some `Y` whose `(n-1)×(n-1)` principal submatrices are all PSD has
//! `Tr(YG) < 0`. Verifiers recompute every number from the matrices and
//! never trust stored claims.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::criteria::{build_lambda_certificate, LambdaCertificate};
use crate::error::{Error, Result};
use crate::gram::{CirculantProfile, GramMatrix};
use crate::io::{hermitian_from_json, matrix_to_json, MatrixJson};
use crate::linalg::{
    circulant_from_first_row, circulant_twirl, dft_eigenvalues, eigenvalues,
    first_row_from_eigenvalues, min_eigenvalue, shift_deviation, ComplexMatrix, HermitianMatrix,
};
use crate::sdp::PsdProjector;
use crate::C64;

/// Default tolerance for both verifiers.
pub const DEFAULT_VERIFY_TOL: f64 = 1e-7;

/// Largest relative Λ-equality violation a stored [`LambdaCertificate`] may have.
pub const LAMBDA_TOL: f64 = 1e-9;

const POLISH_ITERS: usize = 4000;
const STAGNATION_WINDOW: usize = 500;

fn check_dim(expected: usize, found: usize, what: &str) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            expected: format!("{what} of dimension {expected}"),
            found: format!("dimension {found}"),
        });
    }
    Ok(())
}

fn sum_of(blocks: &[HermitianMatrix], n: usize) -> HermitianMatrix {
    blocks
        .iter()
        .fold(HermitianMatrix::zeros(n), |acc, b| acc.add(b))
}

/// Smallest eigenvalue over all `(n-1)×(n-1)` principal submatrices.
pub fn min_principal_submatrix_eig(y: &HermitianMatrix) -> Result<f64> {
    let mut min = f64::INFINITY;
    for i in 0..y.dim() {
        min = min.min(min_eigenvalue(&y.principal_submatrix(i)?)?);
    }
    Ok(min)
}

/// `F₀ … F_{n-1}` with `Fᵢ` vanishing on row and column `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct IncoherenceDecomposition {
    blocks: Vec<HermitianMatrix>,
    min_block_eig: f64,
    sum_residual: Option<f64>,
}

impl IncoherenceDecomposition {
    pub fn new(blocks: Vec<HermitianMatrix>) -> Result<Self> {
        let n = blocks.len();
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "need n >= 2 blocks, got {n}"
            )));
        }
        for b in &blocks {
            check_dim(n, b.dim(), "block")?;
        }
        let mut min_block_eig = f64::INFINITY;
        for b in &blocks {
            min_block_eig = min_block_eig.min(min_eigenvalue(b)?);
        }
        Ok(Self {
            blocks,
            min_block_eig,
            sum_residual: None,
        })
    }

    /// Records `‖ΣFᵢ - G‖_F` for the given target.
    pub fn bound_to(mut self, target: &HermitianMatrix) -> Result<Self> {
        check_dim(self.n(), target.dim(), "target")?;
        self.sum_residual = Some(sum_of(&self.blocks, self.n()).sub(target).frobenius_norm());
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[HermitianMatrix] {
        &self.blocks
    }

    pub fn min_block_eig(&self) -> f64 {
        self.min_block_eig
    }

    pub fn sum_residual(&self) -> Option<f64> {
        self.sum_residual
    }

    /// `Σᵢ⟨i|Fᵢ|i⟩`; zero for a valid decomposition.
    pub fn objective(&self) -> f64 {
        self.blocks
            .iter()
            .enumerate()
            .map(|(i, b)| b[(i, i)].re)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub accepted: bool,
    pub zero_pattern_exact: bool,
    /// Largest modulus on a forbidden row/column.
    pub max_forbidden_entry: f64,
    pub min_block_eig: f64,
    pub sum_residual: f64,
    pub tol: f64,
}

pub fn verify_decomposition(
    target: &HermitianMatrix,
    dec: &IncoherenceDecomposition,
    tol: f64,
) -> Result<DecompositionReport> {
    let n = target.dim();
    check_dim(n, dec.n(), "decomposition")?;
    let mut max_forbidden_entry = 0.0f64;
    let mut min_block_eig = f64::INFINITY;
    for (i, b) in dec.blocks.iter().enumerate() {
        check_dim(n, b.dim(), "block")?;
        for k in 0..n {
            max_forbidden_entry = max_forbidden_entry
                .max(b[(i, k)].norm())
                .max(b[(k, i)].norm());
        }
        min_block_eig = min_block_eig.min(min_eigenvalue(b)?);
    }
    let sum_residual = sum_of(&dec.blocks, n).sub(target).frobenius_norm();
    let zero_pattern_exact = max_forbidden_entry == 0.0;
    Ok(DecompositionReport {
        accepted: zero_pattern_exact && min_block_eig >= -tol && sum_residual <= tol * n as f64,
        zero_pattern_exact,
        max_forbidden_entry,
        min_block_eig,
        sum_residual,
        tol,
    })
}

/// Hermitian `Y` whose `(n-1)×(n-1)` principal submatrices are PSD.
#[derive(Debug, Clone, PartialEq)]
pub struct LocallyPsdWitness {
    y: HermitianMatrix,
    min_submatrix_eig: f64,
    trace_product: Option<f64>,
}

impl LocallyPsdWitness {
    pub fn new(y: HermitianMatrix) -> Result<Self> {
        if y.dim() < 2 {
            return Err(Error::InvalidParameter("witness needs n >= 2".into()));
        }
        let min_submatrix_eig = min_principal_submatrix_eig(&y)?;
        Ok(Self {
            y,
            min_submatrix_eig,
            trace_product: None,
        })
    }

    /// Records `Tr(YG)` for the given target.
    pub fn bound_to(mut self, target: &HermitianMatrix) -> Result<Self> {
        check_dim(self.n(), target.dim(), "target")?;
        self.trace_product = Some(self.y.trace_product(target));
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.y.dim()
    }

    pub fn y(&self) -> &HermitianMatrix {
        &self.y
    }

    pub fn min_submatrix_eig(&self) -> f64 {
        self.min_submatrix_eig
    }

    pub fn trace_product(&self) -> Option<f64> {
        self.trace_product
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub accepted: bool,
    pub min_submatrix_eig: f64,
    pub trace_product: f64,
    /// `Tr(YG)` must not exceed this (`-10·tol·‖G‖_F`).
    pub trace_threshold: f64,
    pub tol: f64,
}

pub fn verify_witness(
    target: &HermitianMatrix,
    w: &LocallyPsdWitness,
    tol: f64,
) -> Result<WitnessReport> {
    check_dim(target.dim(), w.n(), "witness")?;
    let min_submatrix_eig = min_principal_submatrix_eig(&w.y)?;
    let trace_product = w.y.trace_product(target);
    let trace_threshold = -10.0 * tol * target.frobenius_norm();
    Ok(WitnessReport {
        accepted: min_submatrix_eig >= -tol && trace_product <= trace_threshold,
        min_submatrix_eig,
        trace_product,
        trace_threshold,
        tol,
    })
}

/// Blocks `Fᵢ = a(I - |i⟩⟨i|) + b(𝟏 - |i⟩)(𝟏 - |i⟩)ᵀ` with
/// `a = 1/(n-1) - γ/(n-2)` and `b = γ/(n-2)`, summing to `I + γ(𝟏𝟏ᵀ - I)`.
pub fn make_equiangular_decomposition(n: usize, gamma: f64) -> Result<IncoherenceDecomposition> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("need n >= 3, got {n}")));
    }
    let nf = n as f64;
    let threshold = (nf - 2.0) / (nf - 1.0);
    if !(0.0..=threshold + 1e-12).contains(&gamma) {
        return Err(Error::InvalidParameter(format!(
            "gamma must lie in [0, (n-2)/(n-1)] = [0, {threshold}], got {gamma}"
        )));
    }
    let b = gamma / (nf - 2.0);
    let mut a = 1.0 / (nf - 1.0) - b;
    if a < 0.0 {
        a = 0.0;
    }
    let blocks = (0..n)
        .map(|i| {
            let m = ComplexMatrix::from_fn(n, n, |j, k| {
                if j == i || k == i {
                    C64::new(0.0, 0.0)
                } else if j == k {
                    C64::new(a + b, 0.0)
                } else {
                    C64::new(b, 0.0)
                }
            });
            HermitianMatrix::symmetrize(m)
        })
        .collect();
    IncoherenceDecomposition::new(blocks)
}

/// `Y = (n-1)I - E` where `E` is unit-modulus with the phases of `G`
/// (phase 0 where `G` vanishes). `Tr(YG) = n(n-2) - Σ_{i≠j}|gᵢⱼ|`.
pub fn make_sum_ip_witness(g: &GramMatrix) -> LocallyPsdWitness {
    let n = g.n();
    let y = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            return C64::new(n as f64 - 2.0, 0.0);
        }
        let z = g.entry(i, j);
        let r = z.norm();
        if r > 0.0 {
            -(z / r)
        } else {
            C64::new(-1.0, 0.0)
        }
    });
    let y = HermitianMatrix::symmetrize(y);
    LocallyPsdWitness::new(y)
        .and_then(|w| w.bound_to(g.as_hermitian()))
        .expect("dimensions agree by construction")
}

/// The two fixed matrices `Y`, `Z(ε)` whose combination `Y + δZ` separates
/// the perturbed four-state Gram matrix from the antidistinguishable cone.
pub fn d4_witness_parts(eps: f64) -> (HermitianMatrix, HermitianMatrix) {
    let s3 = 3f64.sqrt();
    let c = |re: f64, im: f64| C64::new(re, im);
    let y = HermitianMatrix::from_rows(vec![
        vec![c(2.0, 0.0), c(-s3, -1.0), c(-s3, 1.0), c(0.0, 0.0)],
        vec![c(-s3, 1.0), c(2.0, 0.0), c(1.0, -s3), c(0.0, 0.0)],
        vec![c(-s3, -1.0), c(1.0, s3), c(2.0, 0.0), c(0.0, 0.0)],
        vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
    ])
    .expect("Y is Hermitian");
    let z = HermitianMatrix::from_rows(vec![
        vec![c(0.0, 0.0), c(1.0, s3), c(1.0, -s3), c(-2.0, 0.0)],
        vec![c(1.0, -s3), c(0.0, 0.0), c(-s3, 1.0), c(-s3, -1.0)],
        vec![c(1.0, s3), c(-s3, -1.0), c(0.0, 0.0), c(-s3, 1.0)],
        vec![
            c(-2.0, 0.0),
            c(-s3, 1.0),
            c(-s3, -1.0),
            c(2.0 * s3 * (1.0 + 5.0 * eps), 0.0),
        ],
    ])
    .expect("Z is Hermitian");
    (y, z)
}

/// Largest `δ` for which `Y + δZ` stays 3-locally PSD.
pub fn d4_delta_max(eps: f64) -> f64 {
    5.0 * 3f64.sqrt() * eps / (1.0 + 5.0 * eps)
}

/// `X = Y + δZ`, bound to `G_ε`; `Tr(XG_ε) = -20√3·δε²/(1-2ε)`.
pub fn make_d4_witness(eps: f64, delta: f64) -> Result<LocallyPsdWitness> {
    if !(eps > 0.0 && eps < 0.1) {
        return Err(Error::InvalidParameter(format!(
            "eps must lie in (0, 1/10), got {eps}"
        )));
    }
    let dmax = d4_delta_max(eps);
    if !(delta > 0.0 && delta <= dmax * (1.0 + 1e-12)) {
        return Err(Error::InvalidParameter(format!(
            "delta must lie in (0, {dmax}], got {delta}"
        )));
    }
    let (y, z) = d4_witness_parts(eps);
    let g_eps = crate::families::make_d4_example(eps)?.g_eps;
    LocallyPsdWitness::new(y.add(&z.scale(delta)))?.bound_to(g_eps.as_hermitian())
}

/// Circulant witness `Y = F diag(d) F*` for a circulant Gram matrix that
/// fails the eigenvalue test `√λ_max <= Σ_{other} √λⱼ`.
///
/// The largest-eigenvalue bin gets `d = -1`; every other bin gets
/// `dⱼ = yⱼ/x` with `yⱼ = 1/max(√λⱼ, s)` and `x = 1/Σ(1/yⱼ)`. Then
/// `S_{n-1}(d) = 0` and all lower symmetric polynomials are positive, so `Y`
/// is locally PSD, while `Tr(YG) <= -(3/4)(λ_max - (Σ√λⱼ)²) < 0`. The floor
/// `s` keeps the weights finite for zero eigenvalues.
pub fn make_circulant_witness(profile: &CirculantProfile) -> Result<LocallyPsdWitness> {
    if !profile.is_circulant {
        return Err(Error::NotCirculant {
            deviation: profile.deviation,
        });
    }
    let lams: Vec<f64> = profile.dft_eigenvalues.iter().map(|l| l.max(0.0)).collect();
    let n = lams.len();
    let top = (0..n)
        .max_by(|&a, &b| lams[a].total_cmp(&lams[b]).then(b.cmp(&a)))
        .expect("n >= 2");
    let tail: f64 = (0..n).filter(|&j| j != top).map(|j| lams[j].sqrt()).sum();
    let gap = lams[top] - tail * tail;
    if gap <= 0.0 {
        return Err(Error::Precondition(format!(
            "eigenvalue test holds (lambda_max = {}, (sum sqrt)^2 = {}); no witness exists",
            lams[top],
            tail * tail
        )));
    }
    let floor = gap / (4.0 * n as f64 * (tail + 1.0));
    let inv_y: Vec<f64> = lams.iter().map(|l| l.sqrt().max(floor)).collect();
    let x = 1.0 / (0..n).filter(|&j| j != top).map(|j| inv_y[j]).sum::<f64>();
    let d: Vec<f64> = (0..n)
        .map(|j| if j == top { -1.0 } else { 1.0 / (inv_y[j] * x) })
        .collect();
    let row = first_row_from_eigenvalues(&d);
    let y = HermitianMatrix::symmetrize(circulant_from_first_row(&row));
    let g = HermitianMatrix::symmetrize(circulant_from_first_row(&profile.first_row));
    LocallyPsdWitness::new(y)?.bound_to(&g)
}

/// Fixes up approximate solver blocks into a verified decomposition.
///
/// Row/column `i` of block `i` is zeroed, the residual `G - ΣFᵢ` is spread
/// over the blocks allowed to carry each entry, and the blocks are projected
/// back to PSD. If that one-shot repair does not verify, a restricted
/// splitting iteration (blocks confined to their allowed pattern) polishes
/// further. Only verified decompositions are returned.
pub fn round_decomposition(
    target: &HermitianMatrix,
    blocks: &[HermitianMatrix],
    tol: f64,
) -> Result<IncoherenceDecomposition> {
    let n = target.dim();
    check_dim(n, blocks.len(), "block count")?;
    for b in blocks {
        check_dim(n, b.dim(), "block")?;
    }
    let as_is = IncoherenceDecomposition::new(blocks.to_vec())?;
    if verify_decomposition(target, &as_is, tol)?.accepted {
        return as_is.bound_to(target);
    }

    let mut projector = PsdProjector::new(n, n - 1);
    let mut restricted = Vec::with_capacity(n);
    for (i, b) in blocks.iter().enumerate() {
        restricted.push(projector.project(i, b.principal_submatrix(i)?.into_matrix())?);
    }
    let mut full: Vec<ComplexMatrix> = restricted
        .iter()
        .enumerate()
        .map(|(i, r)| embed(r, i))
        .collect();
    project_onto_sum(&mut full, target.as_matrix());
    for (i, f) in full.iter_mut().enumerate() {
        let sub = restrict(f, i);
        *f = embed(&projector.project(i, sub)?, i);
    }
    if let Some(dec) = accept(target, &full, tol)? {
        return Ok(dec);
    }

    // Restricted splitting: Z (PSD on the allowed pattern) and U (scaled multiplier).
    let mut z = full;
    let mut u = vec![ComplexMatrix::zeros(n, n); n];
    let mut best = f64::INFINITY;
    let mut checkpoint = f64::INFINITY;
    for it in 1..=POLISH_ITERS {
        let mut f: Vec<ComplexMatrix> = z.iter().zip(&u).map(|(a, b)| a - b).collect();
        project_onto_sum(&mut f, target.as_matrix());
        for i in 0..n {
            let w = &f[i] + &u[i];
            let zi = embed(&projector.project(i, restrict(&w, i))?, i);
            u[i] = &w - &zi;
            z[i] = zi;
        }
        if it % 10 == 0 {
            let residual = (&z.iter().fold(ComplexMatrix::zeros(n, n), |acc, b| &acc + b)
                - target.as_matrix())
            .frobenius_norm();
            best = best.min(residual);
            if residual <= 0.5 * tol * n as f64 {
                if let Some(dec) = accept(target, &z, tol)? {
                    return Ok(dec);
                }
            }
        }
        // Infeasible targets plateau at the distance between the two sets;
        // feasible ones keep shrinking, if slowly.
        if it % STAGNATION_WINDOW == 0 {
            if best > 0.9 * checkpoint && best > 100.0 * tol * n as f64 {
                break;
            }
            checkpoint = best;
        }
    }
    Err(Error::Verification(format!(
        "no decomposition within tolerance {tol:e}: best sum residual {best:e} after polishing"
    )))
}

fn restrict(m: &ComplexMatrix, drop: usize) -> ComplexMatrix {
    let n = m.rows();
    let keep = |k: usize| if k < drop { k } else { k + 1 };
    ComplexMatrix::from_fn(n - 1, n - 1, |a, b| m[(keep(a), keep(b))])
}

fn embed(m: &ComplexMatrix, index: usize) -> ComplexMatrix {
    HermitianMatrix::symmetrize(m.clone())
        .embed_with_zero(index)
        .into_matrix()
}

/// Orthogonal projection onto `{ΣFᵢ = G}` among blocks that vanish on their
/// own row and column: each entry's misfit is split evenly over the blocks
/// allowed to carry it.
fn project_onto_sum(blocks: &mut [ComplexMatrix], target: &ComplexMatrix) {
    let n = blocks.len();
    for a in 0..n {
        for b in 0..n {
            let carriers = (0..n).filter(|&i| i != a && i != b);
            let count = carriers.clone().count();
            if count == 0 {
                continue;
            }
            let sum: C64 = carriers.clone().map(|i| blocks[i][(a, b)]).sum();
            let corr = (sum - target[(a, b)]) / count as f64;
            for i in carriers {
                blocks[i][(a, b)] -= corr;
            }
        }
    }
}

fn accept(
    target: &HermitianMatrix,
    blocks: &[ComplexMatrix],
    tol: f64,
) -> Result<Option<IncoherenceDecomposition>> {
    let dec = IncoherenceDecomposition::new(
        blocks
            .iter()
            .cloned()
            .map(HermitianMatrix::symmetrize)
            .collect(),
    )?;
    Ok(if verify_decomposition(target, &dec, tol)?.accepted {
        Some(dec.bound_to(target)?)
    } else {
        None
    })
}

/// Turns an approximate witness candidate into a verified one: twirl onto
/// circulant matrices when `G` is circulant, rescale so the lowest
/// eigenvalue is `-1`, then lift by `ηI` with
/// `η = max(0, -min principal-submatrix eigenvalue)`.
pub fn round_witness(
    target: &HermitianMatrix,
    candidate: &HermitianMatrix,
    circulant: bool,
    tol: f64,
) -> Result<LocallyPsdWitness> {
    check_dim(target.dim(), candidate.dim(), "witness candidate")?;
    let y = if circulant {
        circulant_twirl(candidate)
    } else {
        candidate.clone()
    };
    // A locally PSD matrix has at most one negative eigenvalue; pinning it
    // at -1 puts solver duals on the same scale as the closed-form witnesses.
    let lowest = min_eigenvalue(&y)?;
    let y = if lowest < 0.0 {
        y.scale(1.0 / -lowest)
    } else {
        y
    };
    let eta = (-min_principal_submatrix_eig(&y)?).max(0.0);
    let y = if eta > 0.0 { y.shift(eta) } else { y };
    let w = LocallyPsdWitness::new(y)?.bound_to(target)?;
    let report = verify_witness(target, &w, tol)?;
    if report.accepted {
        Ok(w)
    } else {
        Err(Error::Verification(format!(
            "lifted witness (eta = {eta:e}) has Tr(YG) = {:e} above threshold {:e}",
            report.trace_product, report.trace_threshold
        )))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CirculantLocalCheck {
    pub locally_psd: bool,
    /// DFT eigenvalues `d` of `Y` in bin order.
    pub eigenvalues: Vec<f64>,
    /// `S₁(d) … S_{n-1}(d)`.
    pub symmetric_polynomials: Vec<f64>,
    /// `S₁(|d|) … S_{n-1}(|d|)`, the scale each `S_k` is judged against.
    pub scales: Vec<f64>,
}

/// Elementary symmetric polynomials `e₀ … eₙ` of `d`, as the coefficients
/// of `Π(t + dⱼ)`.
pub fn elementary_symmetric(d: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; d.len() + 1];
    e[0] = 1.0;
    for (m, &x) in d.iter().enumerate() {
        for k in (1..=m + 1).rev() {
            e[k] += x * e[k - 1];
        }
    }
    e
}

/// A circulant `Y` is locally PSD iff `S_k(d) >= 0` for `1 <= k <= n-1`,
/// where `d` are its DFT eigenvalues.
pub fn circulant_locally_psd_check(y: &HermitianMatrix) -> Result<CirculantLocalCheck> {
    let n = y.dim();
    if n < 2 {
        return Err(Error::InvalidParameter("need n >= 2".into()));
    }
    let deviation = shift_deviation(y.as_matrix());
    if deviation > 1e-9 * y.frobenius_norm().max(1.0) {
        return Err(Error::NotCirculant { deviation });
    }
    let d: Vec<f64> = dft_eigenvalues(y.as_matrix().row(0))
        .iter()
        .map(|z| z.re)
        .collect();
    let abs: Vec<f64> = d.iter().map(|x| x.abs()).collect();
    let s = elementary_symmetric(&d);
    let scale = elementary_symmetric(&abs);
    let symmetric_polynomials = s[1..n].to_vec();
    let scales = scale[1..n].to_vec();
    let locally_psd = symmetric_polynomials
        .iter()
        .zip(&scales)
        .all(|(sk, sc)| *sk >= -1e-9 * sc.max(1.0));
    Ok(CirculantLocalCheck {
        locally_psd,
        eigenvalues: d,
        symmetric_polynomials,
        scales,
    })
}

/// Λ certificate together with the spectrum it was built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCertificate {
    pub eigenvalues: Vec<f64>,
    pub lambda: LambdaCertificate,
}

impl SpectralCertificate {
    pub fn from_eigenvalues(eigenvalues: Vec<f64>) -> Result<Self> {
        let lambda = build_lambda_certificate(&eigenvalues)?;
        Ok(Self {
            eigenvalues,
            lambda,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    Decomposition(IncoherenceDecomposition),
    Witness(LocallyPsdWitness),
    Lambda(SpectralCertificate),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaReport {
    pub accepted: bool,
    /// Λ equalities checked against the target's recomputed spectrum.
    pub residual: f64,
    pub eigenvalue_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CertificateReport {
    Decomposition(DecompositionReport),
    Witness(WitnessReport),
    Lambda(LambdaReport),
}

impl CertificateReport {
    pub fn accepted(&self) -> bool {
        match self {
            CertificateReport::Decomposition(r) => r.accepted,
            CertificateReport::Witness(r) => r.accepted,
            CertificateReport::Lambda(r) => r.accepted,
        }
    }
}

impl Certificate {
    pub fn n(&self) -> usize {
        match self {
            Certificate::Decomposition(d) => d.n(),
            Certificate::Witness(w) => w.n(),
            Certificate::Lambda(l) => l.eigenvalues.len(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Decomposition(_) => "decomposition",
            Certificate::Witness(_) => "witness",
            Certificate::Lambda(_) => "lambda",
        }
    }

    pub fn verify(&self, target: &HermitianMatrix, tol: f64) -> Result<CertificateReport> {
        Ok(match self {
            Certificate::Decomposition(d) => {
                CertificateReport::Decomposition(verify_decomposition(target, d, tol)?)
            }
            Certificate::Witness(w) => CertificateReport::Witness(verify_witness(target, w, tol)?),
            Certificate::Lambda(l) => {
                check_dim(target.dim(), l.eigenvalues.len(), "spectrum")?;
                let lams = eigenvalues(target)?;
                let residual = l.lambda.residual(&lams);
                let eigenvalue_drift = lams
                    .iter()
                    .zip(&l.eigenvalues)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                CertificateReport::Lambda(LambdaReport {
                    accepted: residual <= LAMBDA_TOL,
                    residual,
                    eigenvalue_drift,
                })
            }
        })
    }

    pub fn to_file(&self) -> CertificateFile {
        let mut residuals = BTreeMap::new();
        match self {
            Certificate::Decomposition(d) => {
                residuals.insert("min_block_eig".to_string(), d.min_block_eig);
                if let Some(r) = d.sum_residual {
                    residuals.insert("sum_residual".to_string(), r);
                }
                CertificateFile::Decomposition {
                    n: d.n(),
                    blocks: d
                        .blocks
                        .iter()
                        .map(|b| matrix_to_json(b.as_matrix()))
                        .collect(),
                    claims: Claims { residuals },
                }
            }
            Certificate::Witness(w) => {
                residuals.insert("min_submatrix_eig".to_string(), w.min_submatrix_eig);
                if let Some(t) = w.trace_product {
                    residuals.insert("trace_product".to_string(), t);
                }
                CertificateFile::Witness {
                    n: w.n(),
                    y: matrix_to_json(w.y.as_matrix()),
                    claims: Claims { residuals },
                }
            }
            Certificate::Lambda(l) => {
                residuals.insert(
                    "lambda_residual".to_string(),
                    l.lambda.residual(&l.eigenvalues),
                );
                CertificateFile::Lambda {
                    n: l.eigenvalues.len(),
                    eigenvalues: l.eigenvalues.clone(),
                    v: l.lambda.v.clone(),
                    q: l.lambda.q,
                    claims: Claims { residuals },
                }
            }
        }
    }

    /// Rebuilds a certificate from its file form. Stored claims are ignored;
    /// statistics are recomputed from the matrices.
    pub fn from_file(file: &CertificateFile) -> Result<Self> {
        match file {
            CertificateFile::Decomposition { n, blocks, .. } => {
                check_dim(*n, blocks.len(), "block count")?;
                let blocks = blocks
                    .iter()
                    .map(|b| hermitian_from_json(*n, b))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Certificate::Decomposition(IncoherenceDecomposition::new(
                    blocks,
                )?))
            }
            CertificateFile::Witness { n, y, .. } => Ok(Certificate::Witness(
                LocallyPsdWitness::new(hermitian_from_json(*n, y)?)?,
            )),
            CertificateFile::Lambda {
                n,
                eigenvalues,
                v,
                q,
                ..
            } => {
                check_dim(*n, eigenvalues.len(), "spectrum")?;
                check_dim(*n, v.len(), "Lambda vector")?;
                Ok(Certificate::Lambda(SpectralCertificate {
                    eigenvalues: eigenvalues.clone(),
                    lambda: LambdaCertificate {
                        v: v.clone(),
                        q: *q,
                    },
                }))
            }
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claims {
    pub residuals: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CertificateFile {
    Decomposition {
        n: usize,
        blocks: Vec<MatrixJson>,
        claims: Claims,
    },
    Witness {
        n: usize,
        #[serde(rename = "Y")]
        y: MatrixJson,
        claims: Claims,
    },
    Lambda {
        n: usize,
        eigenvalues: Vec<f64>,
        v: Vec<f64>,
        q: f64,
        claims: Claims,
    },
}

/// `[[2,1,2],[1,2,-1],[2,-1,5]]` and a three-block decomposition of it.
pub fn small_decomposition_fixture() -> (HermitianMatrix, IncoherenceDecomposition) {
    let h = |rows: &[&[f64]]| HermitianMatrix::from_real_rows(rows).expect("real symmetric");
    let target = h(&[&[2.0, 1.0, 2.0], &[1.0, 2.0, -1.0], &[2.0, -1.0, 5.0]]);
    let blocks = vec![
        h(&[&[0.0, 0.0, 0.0], &[0.0, 1.0, -1.0], &[0.0, -1.0, 1.0]]),
        h(&[&[1.0, 0.0, 2.0], &[0.0, 0.0, 0.0], &[2.0, 0.0, 4.0]]),
        h(&[&[1.0, 1.0, 0.0], &[1.0, 1.0, 0.0], &[0.0, 0.0, 0.0]]),
    ];
    let dec = IncoherenceDecomposition::new(blocks).expect("three 3x3 blocks");
    (target, dec)
}

/// The all-ones 3×3 matrix and the locally PSD `Y = 2I - 𝟏𝟏ᵀ` separating it
/// (`Tr = -3`).
pub fn all_ones_witness_fixture() -> (HermitianMatrix, LocallyPsdWitness) {
    let ones =
        HermitianMatrix::from_real_rows(&[&[1.0; 3], &[1.0; 3], &[1.0; 3]]).expect("symmetric");
    let y = HermitianMatrix::from_real_rows(&[
        &[1.0, -1.0, -1.0],
        &[-1.0, 1.0, -1.0],
        &[-1.0, -1.0, 1.0],
    ])
    .expect("symmetric");
    (ones, LocallyPsdWitness::new(y).expect("3x3"))
}
