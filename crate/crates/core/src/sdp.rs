//! The state-exclusion SDP on the Gram matrix, solved by ADMM.
//!
//! Primal: minimize `Σᵢ⟨i|Fᵢ|i⟩` subject to `ΣFᵢ = G`, `Fᵢ ⪰ 0`.
//! Dual: maximize `Tr(XG)` subject to `X ⪯ |i⟩⟨i|` for every `i`.
//!
//! The optimal value is zero exactly when the states are antidistinguishable,
//! and `value / n` is the minimum error probability of state exclusion under
//! uniform priors. The solver alternates an exact projection onto the affine
//! set `{ΣFᵢ = G}` (with the linear objective folded in) and exact per-block
//! PSD projections. Iteration and summation order are fixed, so results are
//! bit-identical across runs.

use serde::{Deserialize, Serialize};

use crate::certificates::{round_decomposition, round_witness, Certificate, DEFAULT_VERIFY_TOL};
use crate::criteria::Decision;
use crate::error::{Error, Result};
use crate::gram::{circulant_profile, GramMatrix, DEFAULT_CIRCULANT_TOL};
use crate::linalg::{eig_hermitian, eig_hermitian_warm, ComplexMatrix, HermitianMatrix};
use crate::C64;

/// Default threshold on the SDP value below which the solver output is
/// treated as antidistinguishable.
pub const DEFAULT_ZERO_TOL: f64 = 1e-6;

const CHECK_EVERY: usize = 10;
const ADAPT_EVERY: usize = 50;
const RHO_MIN: f64 = 1e-4;
const RHO_MAX: f64 = 1e4;
/// Eigenvalues of `G` below this (relative to `max(1, λ_max)`) count as zero.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub step_rho: f64,
    pub max_iter: usize,
    pub eps_abs: f64,
    pub eps_rel: f64,
    pub over_relaxation: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            step_rho: 1.0,
            max_iter: 50_000,
            eps_abs: 1e-9,
            eps_rel: 1e-7,
            over_relaxation: 1.6,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.step_rho) || !positive(self.eps_abs) || !positive(self.eps_rel) {
            return Err(Error::InvalidParameter(
                "step_rho, eps_abs and eps_rel must be finite and positive".into(),
            ));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be positive".into()));
        }
        if self.eps_abs > self.eps_rel {
            return Err(Error::InvalidParameter(format!(
                "eps_abs ({}) must not exceed eps_rel ({})",
                self.eps_abs, self.eps_rel
            )));
        }
        if !(1.0..=1.8).contains(&self.over_relaxation) {
            return Err(Error::InvalidParameter(format!(
                "over_relaxation must lie in [1, 1.8], got {}",
                self.over_relaxation
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpSolution {
    /// `Σᵢ⟨i|Fᵢ|i⟩` at the returned blocks.
    pub value: f64,
    /// `Tr(XG)` for the returned (feasible) dual; a lower bound on the optimum.
    pub dual_value: f64,
    pub blocks: Vec<HermitianMatrix>,
    /// Dual matrix, shifted so that `X ⪯ |i⟩⟨i|` for every `i`.
    pub dual: HermitianMatrix,
    /// `‖ΣFᵢ - G‖_F`.
    pub primal_residual: f64,
    /// ADMM dual residual `ρ‖Fᵏ - Fᵏ⁻¹‖`.
    pub dual_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl SdpSolution {
    pub fn n(&self) -> usize {
        self.blocks.len()
    }

    /// Minimum error probability of excluding a uniformly chosen state.
    pub fn error_probability(&self) -> f64 {
        self.value / self.n() as f64
    }

    pub fn duality_gap(&self) -> f64 {
        self.value - self.dual_value
    }
}

/// PSD projections that reuse each block's previous eigenbasis as a warm start.
pub(crate) struct PsdProjector {
    bases: Vec<ComplexMatrix>,
}

impl PsdProjector {
    pub(crate) fn new(count: usize, dim: usize) -> Self {
        Self {
            bases: vec![ComplexMatrix::identity(dim); count],
        }
    }

    pub(crate) fn project(&mut self, slot: usize, a: ComplexMatrix) -> Result<ComplexMatrix> {
        let h = HermitianMatrix::symmetrize(a);
        let spectrum = eig_hermitian_warm(&h, &self.bases[slot])?;
        let out = spectrum.reconstruct_with(|l| l.max(0.0)).into_matrix();
        if let Some(q) = spectrum.eigenvectors {
            self.bases[slot] = q;
        }
        Ok(out)
    }
}

fn norm_sqr(m: &ComplexMatrix) -> f64 {
    m.as_slice().iter().map(|z| z.norm_sqr()).sum()
}

fn diff_norm_sqr(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum()
}

fn sum_blocks(blocks: &[ComplexMatrix], n: usize) -> ComplexMatrix {
    let mut sum = ComplexMatrix::zeros(n, n);
    for b in blocks {
        for (s, x) in sum.as_mut_slice().iter_mut().zip(b.as_slice()) {
            *s += x;
        }
    }
    sum
}

/// Shifts `x` down by the smallest `σ >= 0` making `x ⪯ cᵢ` for every `i`.
fn clamp_below(x: HermitianMatrix, caps: &[ComplexMatrix]) -> Result<HermitianMatrix> {
    let mut shift = 0.0f64;
    for c in caps {
        let lmax = eig_hermitian(&HermitianMatrix::symmetrize(x.as_matrix() - c))?.max();
        shift = shift.max(lmax);
    }
    Ok(if shift > 0.0 { x.shift(-shift) } else { x })
}

/// The problem restricted to `range(G)`: every feasible `Fᵢ` satisfies
/// `0 ⪯ Fᵢ ⪯ G`, so `Fᵢ = Q Aᵢ Q*` with `Q` an orthonormal basis of the
/// range. The map is an isometry, so the splitting iteration below is the
/// Gram-level one, but both problems are strictly feasible on the range and
/// the dual optimum is attained even when `G` is singular.
struct RangeProblem {
    q: ComplexMatrix,
    lams: Vec<f64>,
    /// `qᵢ qᵢ*` with `qᵢ = Q*|i⟩`.
    costs: Vec<ComplexMatrix>,
}

impl RangeProblem {
    fn new(g: &GramMatrix) -> Result<Self> {
        let spectrum = eig_hermitian(g.as_hermitian())?;
        let cutoff = RANK_TOL * spectrum.max().max(1.0);
        let r = spectrum
            .eigenvalues
            .iter()
            .filter(|&&l| l > cutoff)
            .count()
            .max(1);
        let full = spectrum.eigenvectors.expect("requested");
        let n = g.n();
        let q = ComplexMatrix::from_fn(n, r, |i, k| full[(i, k)]);
        let costs = (0..n)
            .map(|i| {
                let qi: Vec<C64> = (0..r).map(|k| q[(i, k)].conj()).collect();
                HermitianMatrix::outer(&qi).into_matrix()
            })
            .collect();
        Ok(Self {
            q,
            lams: spectrum.eigenvalues[..r].to_vec(),
            costs,
        })
    }

    fn rank(&self) -> usize {
        self.lams.len()
    }

    fn lift(&self, a: &ComplexMatrix) -> HermitianMatrix {
        HermitianMatrix::symmetrize(&(&self.q * a) * &self.q.adjoint())
    }

    /// A Gram-level dual `X ⪯ |i⟩⟨i|` from a reduced dual `Ξ ⪯ qᵢqᵢ*`:
    /// `X = QΞQ* - t(I - QQ*)`, clamped. Larger `t` loses less in the clamp,
    /// so the best of a few scales is kept.
    fn gram_dual(&self, xi: &ComplexMatrix, g: &GramMatrix) -> Result<HermitianMatrix> {
        let n = g.n();
        let caps: Vec<ComplexMatrix> = (0..n)
            .map(|i| {
                let mut e = ComplexMatrix::zeros(n, n);
                e[(i, i)] = C64::new(1.0, 0.0);
                e
            })
            .collect();
        let base = self.lift(xi);
        if self.rank() == n {
            return clamp_below(base, &caps);
        }
        let kernel =
            HermitianMatrix::identity(n).sub(&self.lift(&ComplexMatrix::identity(self.rank())));
        let scale = xi.frobenius_norm().max(1.0);
        let mut best: Option<(f64, HermitianMatrix)> = None;
        for k in 0..=8 {
            let t = scale * 10f64.powi(k);
            let x = clamp_below(base.sub(&kernel.scale(t)), &caps)?;
            let value = x.trace_product(g.as_hermitian());
            if best.as_ref().map_or(true, |(v, _)| value > *v) {
                best = Some((value, x));
            }
        }
        Ok(best.expect("at least one scale tried").1)
    }
}

pub fn solve_exclusion_sdp(g: &GramMatrix, cfg: &SolverConfig) -> Result<SdpSolution> {
    cfg.validate()?;
    let n = g.n();
    let problem = RangeProblem::new(g)?;
    let r = problem.rank();
    let target = ComplexMatrix::from_fn(r, r, |a, b| {
        C64::new(if a == b { problem.lams[a] } else { 0.0 }, 0.0)
    });
    let g_norm = g.frobenius_norm();
    let inv_n = 1.0 / n as f64;
    let alpha = cfg.over_relaxation;

    let mut rho = cfg.step_rho;
    let mut z = vec![target.scale(inv_n); n];
    let mut z_prev = z.clone();
    let mut u = vec![ComplexMatrix::zeros(r, r); n];
    let mut f = vec![ComplexMatrix::zeros(r, r); n];
    let mut projector = PsdProjector::new(n, r);

    let mut iterations = 0;
    let mut converged = false;
    let mut dual_residual = f64::INFINITY;
    let mut xi = ComplexMatrix::zeros(r, r);

    for it in 1..=cfg.max_iter {
        iterations = it;

        // Affine step: minimize Σ Tr(CᵢAᵢ) + (ρ/2)Σ‖Aᵢ - Zᵢ + Uᵢ‖² over ΣAᵢ = Λ.
        for i in 0..n {
            let inv_rho = 1.0 / rho;
            for (((fv, zv), uv), cv) in f[i]
                .as_mut_slice()
                .iter_mut()
                .zip(z[i].as_slice())
                .zip(u[i].as_slice())
                .zip(problem.costs[i].as_slice())
            {
                *fv = zv - uv - cv * inv_rho;
            }
        }
        let mut correction = sum_blocks(&f, r);
        for (c, t) in correction.as_mut_slice().iter_mut().zip(target.as_slice()) {
            *c = (*c - t) * inv_n;
        }
        for fi in f.iter_mut() {
            for (fv, c) in fi.as_mut_slice().iter_mut().zip(correction.as_slice()) {
                *fv -= c;
            }
        }

        // Relaxed PSD step and scaled dual update.
        std::mem::swap(&mut z, &mut z_prev);
        for i in 0..n {
            let mut w = ComplexMatrix::zeros(r, r);
            for (((wv, fv), zv), uv) in w
                .as_mut_slice()
                .iter_mut()
                .zip(f[i].as_slice())
                .zip(z_prev[i].as_slice())
                .zip(u[i].as_slice())
            {
                *wv = fv * alpha + zv * (1.0 - alpha) + uv;
            }
            let zi = projector.project(i, w.clone())?;
            for ((uv, wv), zv) in u[i]
                .as_mut_slice()
                .iter_mut()
                .zip(w.as_slice())
                .zip(zi.as_slice())
            {
                *uv = wv - zv;
            }
            z[i] = zi;
        }

        if it % CHECK_EVERY != 0 && it != cfg.max_iter {
            continue;
        }

        let r_prim = f
            .iter()
            .zip(&z)
            .map(|(a, b)| diff_norm_sqr(a, b))
            .sum::<f64>()
            .sqrt();
        let r_dual = rho
            * z.iter()
                .zip(&z_prev)
                .map(|(a, b)| diff_norm_sqr(a, b))
                .sum::<f64>()
                .sqrt();
        dual_residual = r_dual;
        let feasibility = (&sum_blocks(&z, r) - &target).frobenius_norm();
        let value: f64 = (0..n)
            .map(|i| trace_product(&problem.costs[i], &z[i]))
            .sum();
        // Ξ = (1/n) Σ (Cᵢ + ρUᵢ), the multiplier of ΣAᵢ = Λ, clamped feasible.
        let mut raw = sum_blocks(&u, r).scale(rho);
        for c in &problem.costs {
            for (x, cv) in raw.as_mut_slice().iter_mut().zip(c.as_slice()) {
                *x += cv;
            }
        }
        xi = clamp_below(
            HermitianMatrix::symmetrize(raw.scale(inv_n)),
            &problem.costs,
        )?
        .into_matrix();
        let reduced_dual: f64 = (0..r).map(|k| xi[(k, k)].re * problem.lams[k]).sum();

        let feas_tol = cfg.eps_abs + cfg.eps_rel * g_norm;
        let u_norm = rho * u.iter().map(norm_sqr).sum::<f64>().sqrt();
        if feasibility <= feas_tol
            && r_prim <= feas_tol
            && r_dual <= cfg.eps_abs * n as f64 + cfg.eps_rel * u_norm
            && (value - reduced_dual).abs() <= cfg.eps_abs + cfg.eps_rel * value.abs()
        {
            converged = true;
            break;
        }

        // Residual balancing: keep ρU (the unscaled multiplier) fixed while ρ moves.
        if it % ADAPT_EVERY == 0 {
            let z_norm = z.iter().map(norm_sqr).sum::<f64>().sqrt().max(1e-300);
            let rel_prim = r_prim / z_norm;
            let rel_dual = r_dual / u_norm.max(1e-300);
            let factor = if rel_prim > 10.0 * rel_dual && rho < RHO_MAX {
                2.0
            } else if rel_dual > 10.0 * rel_prim && rho > RHO_MIN {
                0.5
            } else {
                1.0
            };
            if factor != 1.0 {
                rho *= factor;
                for ui in u.iter_mut() {
                    for v in ui.as_mut_slice() {
                        *v /= factor;
                    }
                }
            }
        }
    }

    let blocks: Vec<HermitianMatrix> = z.iter().map(|a| problem.lift(a)).collect();
    let value = blocks.iter().enumerate().map(|(i, b)| b[(i, i)].re).sum();
    let primal_residual = blocks
        .iter()
        .fold(HermitianMatrix::zeros(n), |acc, b| acc.add(b))
        .sub(g.as_hermitian())
        .frobenius_norm();
    let dual = problem.gram_dual(&xi, g)?;
    let dual_value = dual.trace_product(g.as_hermitian());
    Ok(SdpSolution {
        value,
        dual_value,
        blocks,
        dual,
        primal_residual,
        dual_residual,
        iterations,
        converged,
    })
}

/// `Re Tr(A B)` for Hermitian `A`, `B`.
fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x * y.conj()).re)
        .sum()
}

/// Outcome of the SDP route. The decision comes from whichever rounded
/// certificate verifies, never from the solver value alone.
#[derive(Debug, Clone)]
pub struct SdpDecision {
    pub decision: Decision,
    pub solution: SdpSolution,
    pub certificate: Option<Certificate>,
    pub diagnostics: Vec<String>,
}

pub fn decide_by_sdp(g: &GramMatrix, cfg: &SolverConfig, zero_tol: f64) -> Result<SdpDecision> {
    if !(zero_tol.is_finite() && zero_tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "zero_tol must be positive, got {zero_tol}"
        )));
    }
    let solution = solve_exclusion_sdp(g, cfg)?;
    let target = g.as_hermitian();
    let circulant = circulant_profile(g, DEFAULT_CIRCULANT_TOL).is_circulant;
    let mut diagnostics = Vec::new();
    if !solution.converged {
        diagnostics.push(format!(
            "solver stopped after {} iterations without converging (primal residual {:e}, gap {:e})",
            solution.iterations,
            solution.primal_residual,
            solution.duality_gap()
        ));
    }

    let try_decomposition = |diag: &mut Vec<String>| match round_decomposition(
        target,
        &solution.blocks,
        DEFAULT_VERIFY_TOL,
    ) {
        Ok(dec) => Some((
            Decision::Antidistinguishable,
            Certificate::Decomposition(dec),
        )),
        Err(e) => {
            diag.push(format!("decomposition rounding failed: {e}"));
            None
        }
    };
    let try_witness = |diag: &mut Vec<String>| {
        let candidate = solution.dual.scale(-1.0);
        match round_witness(target, &candidate, circulant, DEFAULT_VERIFY_TOL) {
            Ok(w) => Some((Decision::NotAntidistinguishable, Certificate::Witness(w))),
            Err(e) => {
                diag.push(format!("witness rounding failed: {e}"));
                None
            }
        }
    };

    let looks_zero = solution.value <= zero_tol;
    let outcome = if looks_zero {
        try_decomposition(&mut diagnostics).or_else(|| try_witness(&mut diagnostics))
    } else {
        try_witness(&mut diagnostics).or_else(|| try_decomposition(&mut diagnostics))
    };
    let (decision, certificate) = match outcome {
        Some((d, c)) => {
            if (d == Decision::Antidistinguishable) != looks_zero {
                diagnostics.push(format!(
                    "solver value {:e} disagrees with zero_tol {zero_tol:e}; the verified certificate decides",
                    solution.value
                ));
            }
            (d, Some(c))
        }
        None => (Decision::Undecided, None),
    };
    Ok(SdpDecision {
        decision,
        solution,
        certificate,
        diagnostics,
    })
}
