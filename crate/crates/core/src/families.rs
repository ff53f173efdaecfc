//! Named state families: trine, equiangular sets and the four-state
//! example whose inner products all have modulus `1/√3`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::gram::{GramMatrix, StateSet};
use crate::linalg::{ComplexMatrix, HermitianMatrix};

/// The three real qubit states at mutual angle 120°.
pub fn make_trine() -> StateSet {
    let h = 3f64.sqrt() / 2.0;
    let c = |x: f64| C64::new(x, 0.0);
    StateSet::new(vec![
        vec![c(1.0), c(0.0)],
        vec![c(-0.5), c(-h)],
        vec![c(-0.5), c(h)],
    ])
    .expect("trine states are unit vectors")
}

/// `G = I + γ(𝟏𝟏ᵀ - I)`.
pub fn make_equiangular(n: usize, gamma: f64) -> Result<GramMatrix> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be >= 2, got {n}")));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidParameter(format!(
            "gamma must lie in [0, 1], got {gamma}"
        )));
    }
    let m = ComplexMatrix::from_fn(n, n, |i, j| C64::new(if i == j { 1.0 } else { gamma }, 0.0));
    GramMatrix::new(HermitianMatrix::new(m)?)
}

/// Threshold `(n-2)/(n-1)` up to which equiangular sets are antidistinguishable.
pub fn equiangular_threshold(n: usize) -> f64 {
    (n as f64 - 2.0) / (n as f64 - 1.0)
}

/// The four-state Gram matrix `G` (all off-diagonal moduli `1/√3`) and its
/// perturbation `G_ε = (G + ε(vv* + ww* - 3I)) / (1 - 2ε)`.
#[derive(Debug, Clone)]
pub struct D4Example {
    pub eps: f64,
    pub g: GramMatrix,
    pub g_eps: GramMatrix,
}

pub fn d4_gram_matrix() -> HermitianMatrix {
    let c = 1.0 / 3f64.sqrt();
    let re = |x: f64| C64::new(x, 0.0);
    let ci = C64::new(0.0, c);
    let half = |z: C64| z * 0.5;
    HermitianMatrix::from_rows(vec![
        vec![re(1.0), re(c), re(c), re(c)],
        vec![re(c), re(1.0), ci, half(re(1.0) + ci)],
        vec![re(c), -ci, re(1.0), half(re(1.0) - ci)],
        vec![re(c), half(re(1.0) - ci), half(re(1.0) + ci), re(1.0)],
    ])
    .expect("printed matrix is Hermitian")
}

pub fn make_d4_example(eps: f64) -> Result<D4Example> {
    if !(0.0..0.1).contains(&eps) {
        return Err(Error::InvalidParameter(format!(
            "eps must lie in [0, 1/10), got {eps}"
        )));
    }
    let g = d4_gram_matrix();
    let s3 = 3f64.sqrt();
    let v = [
        C64::new(1.0, 0.0),
        C64::new(-s3 / 2.0, 0.5),
        C64::new(-s3 / 2.0, -0.5),
        C64::new(0.0, 0.0),
    ];
    let w = [
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(1.0, 0.0),
    ];
    let perturbation = HermitianMatrix::outer(&v)
        .add(&HermitianMatrix::outer(&w))
        .shift(-3.0);
    let g_eps = g
        .add(&perturbation.scale(eps))
        .scale(1.0 / (1.0 - 2.0 * eps));
    Ok(D4Example {
        eps,
        g: GramMatrix::new(g)?,
        g_eps: GramMatrix::new(g_eps)?,
    })
}
