//! Closed-form necessary and sufficient conditions for antidistinguishability.
//!
//! Every check reports a signed margin (positive means the rule fires).
//! Necessary conditions for antidistinguishability are strict inequalities
//! and fire on `margin > 0`; sufficient conditions are non-strict and fire
//! on `margin >= 0`. Margins within [`BOUNDARY_MARGIN`] of zero are flagged
//! because floating point cannot tell the two cases apart there.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gram::{CirculantProfile, GramMatrix};

/// `|margin|` below this is reported as a boundary case.
pub const BOUNDARY_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    #[serde(rename = "SumIP_NotAnti")]
    SumIpNotAnti,
    #[serde(rename = "PairwiseIP_NotAnti")]
    PairwiseIpNotAnti,
    #[serde(rename = "Eigenvalue_Anti")]
    EigenvalueAnti,
    #[serde(rename = "Frobenius_Anti")]
    FrobeniusAnti,
    #[serde(rename = "PairwiseIP_Anti")]
    PairwiseIpAnti,
    CirculantExact,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::SumIpNotAnti => "SumIP_NotAnti",
            Rule::PairwiseIpNotAnti => "PairwiseIP_NotAnti",
            Rule::EigenvalueAnti => "Eigenvalue_Anti",
            Rule::FrobeniusAnti => "Frobenius_Anti",
            Rule::PairwiseIpAnti => "PairwiseIP_Anti",
            Rule::CirculantExact => "CirculantExact",
        }
    }

    /// Rules that can only prove non-antidistinguishability.
    pub fn is_necessary_condition(self) -> bool {
        matches!(self, Rule::SumIpNotAnti | Rule::PairwiseIpNotAnti)
    }

    /// Rules that can only prove antidistinguishability.
    pub fn is_sufficient_condition(self) -> bool {
        matches!(
            self,
            Rule::EigenvalueAnti | Rule::FrobeniusAnti | Rule::PairwiseIpAnti
        )
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of a decision procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Decision {
    Antidistinguishable,
    NotAntidistinguishable,
    Boundary,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundVerdict {
    pub rule: Rule,
    pub applies: bool,
    pub margin: f64,
    pub boundary: bool,
    pub detail: String,
}

impl BoundVerdict {
    fn strict(rule: Rule, margin: f64, detail: String) -> Self {
        Self {
            rule,
            applies: margin > 0.0,
            margin,
            boundary: margin.abs() < BOUNDARY_MARGIN,
            detail,
        }
    }

    fn non_strict(rule: Rule, margin: f64, detail: String) -> Self {
        Self {
            rule,
            applies: margin >= 0.0,
            margin,
            boundary: margin.abs() < BOUNDARY_MARGIN,
            detail,
        }
    }

    /// What this verdict proves, if anything.
    pub fn implies(&self) -> Option<Decision> {
        match self.rule {
            Rule::CirculantExact => Some(if self.applies {
                Decision::Antidistinguishable
            } else {
                Decision::NotAntidistinguishable
            }),
            _ if !self.applies => None,
            r if r.is_necessary_condition() => Some(Decision::NotAntidistinguishable),
            _ => Some(Decision::Antidistinguishable),
        }
    }
}

/// Real vector `v` whose outer product `Λ = vvᵀ` satisfies
/// `λ₀ = -Λ₀₀ - Σᵢ(Λ₀ᵢ + Λᵢ₀)` and `λⱼ = Λⱼⱼ` for `j >= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaCertificate {
    pub v: Vec<f64>,
    pub q: f64,
}

impl LambdaCertificate {
    /// Largest violation of the two equalities, relative to `max(1, λ₀)`.
    pub fn residual(&self, lams: &[f64]) -> f64 {
        if lams.len() != self.v.len() || lams.is_empty() {
            return f64::INFINITY;
        }
        let lams = &clip_spectrum(lams)[..];
        let v0 = self.v[0];
        let tail: f64 = self.v[1..].iter().sum();
        let first = (lams[0] - (-v0 * v0 - 2.0 * v0 * tail)).abs();
        let rest = lams[1..]
            .iter()
            .zip(&self.v[1..])
            .map(|(l, vj)| (l - vj * vj).abs())
            .fold(0.0, f64::max);
        first.max(rest) / lams[0].abs().max(1.0)
    }
}

/// Eigenvalues at or below this, relative to `max(1, λ₀)`, are roundoff
/// from a singular Gram matrix and count as zero before taking roots.
pub const EIGENVALUE_DUST: f64 = 1e-12;

/// The spectrum with dust (including small negative values) set to zero.
pub fn clip_spectrum(lams: &[f64]) -> Vec<f64> {
    let cutoff = EIGENVALUE_DUST * lams.first().copied().unwrap_or(0.0).max(1.0);
    lams.iter()
        .map(|&l| if l <= cutoff { 0.0 } else { l })
        .collect()
}

fn clipped_sqrt_sum(lams: &[f64]) -> f64 {
    lams.iter().map(|l| l.max(0.0).sqrt()).sum()
}

/// `v₀ = -q - √(q² - λ₀)`, `vⱼ = √λⱼ` for eigenvalues sorted descending.
pub fn build_lambda_certificate(lams: &[f64]) -> Result<LambdaCertificate> {
    if lams.is_empty() {
        return Err(Error::InvalidParameter("empty spectrum".into()));
    }
    let lams = &clip_spectrum(lams)[..];
    let lam0 = lams[0].max(0.0);
    let q = clipped_sqrt_sum(&lams[1..]);
    let mut disc = q * q - lam0;
    if disc < 0.0 {
        if disc >= -1e-12 * lam0.max(1.0) {
            disc = 0.0;
        } else {
            return Err(Error::Precondition(format!(
                "sqrt(lambda_0) = {} exceeds q = {q}",
                lam0.sqrt()
            )));
        }
    }
    let mut v = Vec::with_capacity(lams.len());
    v.push(-q - disc.sqrt());
    v.extend(lams[1..].iter().map(|l| l.max(0.0).sqrt()));
    Ok(LambdaCertificate { v, q })
}

/// Not antidistinguishable if `Σ_{i≠j} |gᵢⱼ| > n(n-2)`.
pub fn check_sum_ip(g: &GramMatrix) -> BoundVerdict {
    let n = g.n() as f64;
    let sum: f64 = g.off_diagonal_moduli().sum();
    let threshold = n * (n - 2.0);
    BoundVerdict::strict(
        Rule::SumIpNotAnti,
        sum - threshold,
        format!("sum |g_ij| = {sum}, threshold n(n-2) = {threshold}"),
    )
}

/// Not antidistinguishable if every `|gᵢⱼ| > (n-2)/(n-1)`.
pub fn check_pairwise_ip_large(g: &GramMatrix) -> BoundVerdict {
    let n = g.n() as f64;
    let min = g.off_diagonal_moduli().fold(f64::INFINITY, f64::min);
    let threshold = (n - 2.0) / (n - 1.0);
    BoundVerdict::strict(
        Rule::PairwiseIpNotAnti,
        min - threshold,
        format!("min |g_ij| = {min}, threshold (n-2)/(n-1) = {threshold}"),
    )
}

/// Antidistinguishable if `√λ₀ <= Σ_{j>=1} √λⱼ`; carries the Λ certificate
/// when it fires.
pub fn check_eigenvalue_sufficient(
    g: &GramMatrix,
) -> Result<(BoundVerdict, Option<LambdaCertificate>)> {
    Ok(eigenvalue_verdict(Rule::EigenvalueAnti, &g.eigenvalues()?))
}

fn eigenvalue_verdict(rule: Rule, lams: &[f64]) -> (BoundVerdict, Option<LambdaCertificate>) {
    let lams = &clip_spectrum(lams)[..];
    let head = lams[0].max(0.0).sqrt();
    let tail = clipped_sqrt_sum(&lams[1..]);
    let verdict = BoundVerdict::non_strict(
        rule,
        tail - head,
        format!("sqrt(lambda_0) = {head}, sum_(j>=1) sqrt(lambda_j) = {tail}"),
    );
    let cert = if verdict.applies {
        build_lambda_certificate(lams).ok()
    } else {
        None
    };
    (verdict, cert)
}

/// Antidistinguishable if `‖G‖_F <= n/√2`.
pub fn check_frobenius(g: &GramMatrix) -> BoundVerdict {
    let n = g.n() as f64;
    let fro = g.frobenius_norm();
    let threshold = n / std::f64::consts::SQRT_2;
    BoundVerdict::non_strict(
        Rule::FrobeniusAnti,
        threshold - fro,
        format!("||G||_F = {fro}, threshold n/sqrt(2) = {threshold}"),
    )
}

/// Antidistinguishable if every `|gᵢⱼ| <= √((n-2)/(2n-2))`.
pub fn check_pairwise_ip_small(g: &GramMatrix) -> BoundVerdict {
    let n = g.n() as f64;
    let max = g.off_diagonal_moduli().fold(0.0, f64::max);
    let threshold = ((n - 2.0) / (2.0 * n - 2.0)).sqrt();
    BoundVerdict::non_strict(
        Rule::PairwiseIpAnti,
        threshold - max,
        format!("max |g_ij| = {max}, threshold sqrt((n-2)/(2n-2)) = {threshold}"),
    )
}

/// Exact test for circulant Gram matrices, on the DFT spectrum.
pub fn decide_circulant_exact(
    profile: &CirculantProfile,
) -> Result<(BoundVerdict, Option<LambdaCertificate>)> {
    if !profile.is_circulant {
        return Err(Error::NotCirculant {
            deviation: profile.deviation,
        });
    }
    Ok(eigenvalue_verdict(
        Rule::CirculantExact,
        &profile.eigenvalues,
    ))
}
