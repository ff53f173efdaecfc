//! Antidistinguishability of pure quantum states from their Gram matrix.
//!
//! Closed-form criteria decide most instances directly; the rest go to a
//! semidefinite program whose output is rounded into an independently
//! checkable certificate.

pub mod analysis;
pub mod certificates;
pub mod criteria;
pub mod error;
pub mod families;
pub mod gram;
pub mod io;
pub mod linalg;
pub mod povm;
pub mod sdp;

pub use analysis::{analyze, AnalysisOptions, AnalysisReport, Method};
pub use certificates::{
    verify_decomposition, verify_witness, Certificate, IncoherenceDecomposition, LocallyPsdWitness,
};
pub use criteria::{Decision, LambdaCertificate, Rule};
pub use error::{Error, Result};
pub use gram::{GramMatrix, StateSet};
pub use linalg::{ComplexMatrix, HermitianMatrix};
pub use num_complex::Complex64 as C64;
pub use povm::Povm;
pub use sdp::{decide_by_sdp, solve_exclusion_sdp, SdpSolution, SolverConfig};
