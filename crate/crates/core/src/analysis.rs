//! End-to-end decision pipeline: closed-form rules cheapest first, then the
//! exact circulant test, then the SDP. A stage decides only with a
//! certificate that verifies; rules sitting on their threshold are recorded
//! and skipped.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::certificates::{
    make_circulant_witness, make_sum_ip_witness, Certificate, CertificateFile, SpectralCertificate,
    DEFAULT_VERIFY_TOL,
};
use crate::criteria::{
    build_lambda_certificate, check_eigenvalue_sufficient, check_frobenius,
    check_pairwise_ip_large, check_pairwise_ip_small, check_sum_ip, decide_circulant_exact,
    BoundVerdict, Decision, Rule,
};
use crate::error::{Error, Result};
use crate::gram::{circulant_profile, GramMatrix, DEFAULT_CIRCULANT_TOL};
use crate::sdp::{decide_by_sdp, SolverConfig, DEFAULT_ZERO_TOL};

/// Label used in reports when the SDP stage decides.
pub const SDP_STAGE: &str = "SDP";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Every stage in order, stopping at the first certified decision.
    #[default]
    Auto,
    /// Closed-form rules only.
    Bounds,
    /// The exact circulant test only.
    Circulant,
    /// The SDP only.
    Sdp,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Method::Auto),
            "bounds" => Ok(Method::Bounds),
            "circulant" => Ok(Method::Circulant),
            "sdp" => Ok(Method::Sdp),
            other => Err(Error::InvalidParameter(format!(
                "unknown method {other:?} (expected auto, bounds, circulant or sdp)"
            ))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Auto => "auto",
            Method::Bounds => "bounds",
            Method::Circulant => "circulant",
            Method::Sdp => "sdp",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub method: Method,
    pub solver: SolverConfig,
    pub zero_tol: f64,
    pub verify_tol: f64,
    pub circulant_tol: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            method: Method::Auto,
            solver: SolverConfig::default(),
            zero_tol: DEFAULT_ZERO_TOL,
            verify_tol: DEFAULT_VERIFY_TOL,
            circulant_tol: DEFAULT_CIRCULANT_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub n: usize,
    pub decision: Decision,
    /// Rule identifier or `"SDP"`; absent when nothing decided.
    pub decided_by: Option<String>,
    /// Signed margin of every evaluated rule (positive means it fires).
    pub margins: BTreeMap<String, f64>,
    /// Rules whose margin was within floating-point resolution of zero.
    pub boundary_rules: Vec<String>,
    pub is_circulant: bool,
    pub sdp_value: Option<f64>,
    pub error_probability: Option<f64>,
    pub sdp_converged: Option<bool>,
    pub sdp_iterations: Option<usize>,
    pub certificate: Option<CertificateFile>,
    pub diagnostics: Vec<String>,
    /// Wall-clock milliseconds per stage; excluded from determinism checks.
    pub timings_ms: BTreeMap<String, f64>,
}

impl AnalysisReport {
    pub fn certificate(&self) -> Result<Option<Certificate>> {
        self.certificate
            .as_ref()
            .map(Certificate::from_file)
            .transpose()
    }

    /// The report with timings removed, for byte-for-byte comparisons.
    pub fn without_timings(&self) -> Self {
        Self {
            timings_ms: BTreeMap::new(),
            ..self.clone()
        }
    }
}

struct Pipeline<'a> {
    g: &'a GramMatrix,
    opts: &'a AnalysisOptions,
    report: AnalysisReport,
}

impl Pipeline<'_> {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        *self
            .report
            .timings_ms
            .entry(stage.to_string())
            .or_insert(0.0) += start.elapsed().as_secs_f64() * 1e3;
        out
    }

    fn record(&mut self, v: &BoundVerdict) {
        self.report
            .margins
            .insert(v.rule.name().to_string(), v.margin);
        if v.boundary {
            self.report.boundary_rules.push(v.rule.name().to_string());
        }
    }

    /// Accepts the verdict's decision if `cert` verifies against `G`.
    fn try_decide(
        &mut self,
        v: &BoundVerdict,
        build: impl FnOnce() -> Result<Certificate>,
    ) -> Result<bool> {
        let Some(decision) = v.implies() else {
            return Ok(false);
        };
        if v.boundary {
            return Ok(false);
        }
        let cert = match build() {
            Ok(c) => c,
            Err(e) => {
                self.report.diagnostics.push(format!(
                    "{} fired but no certificate could be built: {e}",
                    v.rule
                ));
                return Ok(false);
            }
        };
        let verified = self.time("certificate", || {
            cert.verify(self.g.as_hermitian(), self.opts.verify_tol)
        })?;
        if !verified.accepted() {
            self.report.diagnostics.push(format!(
                "{} fired but its certificate did not verify at tol {:e}",
                v.rule, self.opts.verify_tol
            ));
            return Ok(false);
        }
        self.report.decision = decision;
        self.report.decided_by = Some(v.rule.name().to_string());
        self.report.certificate = Some(cert.to_file());
        Ok(true)
    }

    fn bounds(&mut self, decide: bool) -> Result<bool> {
        let g = self.g;
        let (pairwise_large, pairwise_small, frobenius, sum, (eigen, eigen_cert)) =
            self.time("criteria", || {
                Ok::<_, Error>((
                    check_pairwise_ip_large(g),
                    check_pairwise_ip_small(g),
                    check_frobenius(g),
                    check_sum_ip(g),
                    check_eigenvalue_sufficient(g)?,
                ))
            })?;
        let ordered = [pairwise_large, pairwise_small, frobenius, sum, eigen];
        for v in &ordered {
            self.record(v);
        }
        if !decide {
            return Ok(false);
        }
        for v in &ordered {
            let build = || match v.rule {
                Rule::SumIpNotAnti | Rule::PairwiseIpNotAnti => {
                    Ok(Certificate::Witness(make_sum_ip_witness(g)))
                }
                // The weaker sufficient rules imply the eigenvalue test, so its
                // Λ certificate covers them too.
                _ => {
                    let eigenvalues = g.eigenvalues()?;
                    let lambda = match &eigen_cert {
                        Some(c) => c.clone(),
                        None => build_lambda_certificate(&eigenvalues)?,
                    };
                    Ok(Certificate::Lambda(SpectralCertificate {
                        eigenvalues,
                        lambda,
                    }))
                }
            };
            if self.try_decide(v, build)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn circulant(&mut self, decide: bool) -> Result<bool> {
        let profile = self.time("circulant", || {
            circulant_profile(self.g, self.opts.circulant_tol)
        });
        self.report.is_circulant = profile.is_circulant;
        if !profile.is_circulant {
            return Ok(false);
        }
        let (v, lambda) = decide_circulant_exact(&profile)?;
        self.record(&v);
        if !decide {
            return Ok(false);
        }
        let build = || {
            if v.applies {
                lambda
                    .map(|l| {
                        Certificate::Lambda(SpectralCertificate {
                            eigenvalues: profile.eigenvalues.clone(),
                            lambda: l,
                        })
                    })
                    .ok_or_else(|| {
                        Error::Precondition(
                            "no Lambda certificate for the circulant spectrum".into(),
                        )
                    })
            } else {
                make_circulant_witness(&profile).map(Certificate::Witness)
            }
        };
        self.try_decide(&v, build)
    }

    fn sdp(&mut self) -> Result<bool> {
        let d = self.time("sdp", || {
            decide_by_sdp(self.g, &self.opts.solver, self.opts.zero_tol)
        })?;
        self.report.sdp_value = Some(d.solution.value);
        self.report.error_probability = Some(d.solution.error_probability());
        self.report.sdp_converged = Some(d.solution.converged);
        self.report.sdp_iterations = Some(d.solution.iterations);
        self.report.diagnostics.extend(d.diagnostics);
        match d.certificate {
            Some(cert) if d.decision != Decision::Undecided => {
                self.report.decision = d.decision;
                self.report.decided_by = Some(SDP_STAGE.to_string());
                self.report.certificate = Some(cert.to_file());
                Ok(true)
            }
            _ => Ok(false),
        }
    }
}

pub fn analyze(g: &GramMatrix, opts: &AnalysisOptions) -> Result<AnalysisReport> {
    opts.solver.validate()?;
    let mut p = Pipeline {
        g,
        opts,
        report: AnalysisReport {
            n: g.n(),
            decision: Decision::Undecided,
            decided_by: None,
            margins: BTreeMap::new(),
            boundary_rules: Vec::new(),
            is_circulant: false,
            sdp_value: None,
            error_probability: None,
            sdp_converged: None,
            sdp_iterations: None,
            certificate: None,
            diagnostics: Vec::new(),
            timings_ms: BTreeMap::new(),
        },
    };
    let decided = match opts.method {
        Method::Auto => p.bounds(true)? || p.circulant(true)? || p.sdp()?,
        Method::Bounds => p.bounds(true)?,
        Method::Circulant => {
            if !p.circulant(true)? && !p.report.is_circulant {
                return Err(Error::NotCirculant {
                    deviation: circulant_profile(g, opts.circulant_tol).deviation,
                });
            }
            p.report.decided_by.is_some()
        }
        Method::Sdp => {
            p.bounds(false)?;
            p.circulant(false)?;
            p.sdp()?
        }
    };
    if !decided && !p.report.boundary_rules.is_empty() {
        p.report.decision = Decision::Boundary;
    }
    Ok(p.report)
}
