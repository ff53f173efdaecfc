//! Fixed workloads shared by the benchmarks.

use antidist_core::families::{make_d4_example, make_equiangular};
use antidist_core::gram::circulant_from_eigenvalues;
use antidist_core::GramMatrix;

/// Named Gram matrices spanning the pipeline's stages: closed-form rules,
/// the circulant test, and instances only the solver settles.
pub fn workloads() -> Vec<(&'static str, GramMatrix)> {
    let d4 = make_d4_example(0.05).expect("valid eps");
    vec![
        (
            "equiangular_8_0.9",
            make_equiangular(8, 0.9).expect("valid"),
        ),
        (
            "equiangular_6_0.8",
            make_equiangular(6, 0.8).expect("valid"),
        ),
        (
            "circulant_8",
            circulant_from_eigenvalues(&[4.1, 3.9, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).expect("valid"),
        ),
        ("d4_g", d4.g),
        ("d4_g_eps", d4.g_eps),
    ]
}
