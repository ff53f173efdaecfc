//! JSON file formats.
//!
//! Matrices are row-major arrays of `{"re": f64, "im": f64}` objects.
//! - Gram matrix: `{"n": int, "entries": [[entry, ...], ...]}`
//! - State set: `{"d": int, "states": [[entry, ...], ...]}` (one row per state)
//!
//! Floats round-trip exactly through serde_json's `float_roundtrip` parser.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gram::{GramMatrix, StateSet};
use crate::linalg::{ComplexMatrix, HermitianMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexEntry {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for ComplexEntry {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexEntry> for C64 {
    fn from(e: ComplexEntry) -> Self {
        C64::new(e.re, e.im)
    }
}

pub type MatrixJson = Vec<Vec<ComplexEntry>>;

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|&z| z.into()).collect())
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<ComplexMatrix> {
    ComplexMatrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|&e| e.into()).collect())
            .collect(),
    )
}

pub fn hermitian_from_json(n: usize, rows: &MatrixJson) -> Result<HermitianMatrix> {
    let m = matrix_from_json(rows)?;
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: format!("{n}x{n} entries"),
            found: format!("{}x{}", m.rows(), m.cols()),
        });
    }
    HermitianMatrix::new(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramFile {
    pub n: usize,
    pub entries: MatrixJson,
}

impl GramFile {
    pub fn from_hermitian(h: &HermitianMatrix) -> Self {
        Self {
            n: h.dim(),
            entries: matrix_to_json(h.as_matrix()),
        }
    }

    pub fn from_gram(g: &GramMatrix) -> Self {
        Self::from_hermitian(g.as_hermitian())
    }

    /// The matrix as a Hermitian matrix, without Gram validation.
    pub fn to_hermitian(&self) -> Result<HermitianMatrix> {
        hermitian_from_json(self.n, &self.entries)
    }

    pub fn to_gram(&self) -> Result<GramMatrix> {
        GramMatrix::new(self.to_hermitian()?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatesFile {
    pub d: usize,
    pub states: MatrixJson,
}

impl StatesFile {
    pub fn from_states(s: &StateSet) -> Self {
        Self {
            d: s.d(),
            states: s
                .states()
                .iter()
                .map(|v| v.iter().map(|&z| z.into()).collect())
                .collect(),
        }
    }

    pub fn to_states(&self) -> Result<StateSet> {
        if let Some((i, s)) = self
            .states
            .iter()
            .enumerate()
            .find(|(_, s)| s.len() != self.d)
        {
            return Err(Error::DimensionMismatch {
                expected: format!("states of dimension d = {}", self.d),
                found: format!("dimension {} for state {i}", s.len()),
            });
        }
        StateSet::new(
            self.states
                .iter()
                .map(|s| s.iter().map(|&e| e.into()).collect())
                .collect(),
        )
    }
}

/// Either input format accepted by the analyzer.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalysisInput {
    Gram(GramMatrix),
    States(StateSet),
}

impl AnalysisInput {
    pub fn gram(&self) -> GramMatrix {
        match self {
            AnalysisInput::Gram(g) => g.clone(),
            AnalysisInput::States(s) => s.gram(),
        }
    }
}

/// Parses a Gram-matrix or state-set document, telling them apart by their keys.
pub fn parse_input(text: &str) -> Result<AnalysisInput> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    if value.get("entries").is_some() {
        Ok(AnalysisInput::Gram(
            serde_json::from_value::<GramFile>(value)?.to_gram()?,
        ))
    } else if value.get("states").is_some() {
        Ok(AnalysisInput::States(
            serde_json::from_value::<StatesFile>(value)?.to_states()?,
        ))
    } else {
        Err(Error::InvalidParameter(
            "input must contain either \"entries\" (Gram matrix) or \"states\" (state set)".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_d4_example, make_trine};

    #[test]
    fn gram_file_round_trip_is_exact() {
        let g = make_d4_example(0.05).unwrap().g_eps;
        let text = serde_json::to_string(&GramFile::from_gram(&g)).unwrap();
        match parse_input(&text).unwrap() {
            AnalysisInput::Gram(back) => assert_eq!(back, g),
            other => panic!("parsed as {other:?}"),
        }
    }

    #[test]
    fn states_file_round_trip() {
        let t = make_trine();
        let text = serde_json::to_string(&StatesFile::from_states(&t)).unwrap();
        assert!(text.contains("\"d\":2"));
        match parse_input(&text).unwrap() {
            AnalysisInput::States(back) => assert_eq!(back, t),
            other => panic!("parsed as {other:?}"),
        }
    }

    #[test]
    fn rejects_mismatched_dimensions() {
        let text = r#"{"n": 3, "entries": [[{"re":1,"im":0},{"re":0,"im":0}],[{"re":0,"im":0},{"re":1,"im":0}]]}"#;
        assert!(matches!(
            parse_input(text),
            Err(Error::DimensionMismatch { .. })
        ));
        let text = r#"{"d": 2, "states": [[{"re":1,"im":0}],[{"re":1,"im":0},{"re":0,"im":0}]]}"#;
        assert!(parse_input(text).is_err());
        assert!(parse_input(r#"{"foo": 1}"#).is_err());
    }
}
