//! Seeded random instances shared by the integration tests.
#![allow(dead_code)]

use antidist_core::gram::circulant_from_eigenvalues;
use antidist_core::{GramMatrix, HermitianMatrix, StateSet, C64};
use rand::Rng;

pub fn random_vector(rng: &mut impl Rng, d: usize) -> Vec<C64> {
    (0..d)
        .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect()
}

pub fn random_states(rng: &mut impl Rng, n: usize, d: usize) -> StateSet {
    let states = (0..n)
        .map(|_| {
            let v = random_vector(rng, d);
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.into_iter().map(|z| z / norm).collect()
        })
        .collect();
    StateSet::new(states).expect("normalized states")
}

/// Gram matrix of `n` random states in a random dimension `1..=n`.
pub fn random_gram(rng: &mut impl Rng, n: usize) -> GramMatrix {
    let d = rng.gen_range(1..=n);
    random_states(rng, n, d).gram()
}

/// `AA*` for a random `d×k` matrix `A`.
pub fn random_psd(rng: &mut impl Rng, d: usize, k: usize) -> HermitianMatrix {
    let cols: Vec<Vec<C64>> = (0..k).map(|_| random_vector(rng, d)).collect();
    cols.iter().fold(HermitianMatrix::zeros(d), |acc, c| {
        acc.add(&HermitianMatrix::outer(c))
    })
}

/// Circulant Gram matrix with a random spectrum, some bins zero.
pub fn random_circulant(rng: &mut impl Rng, n: usize) -> GramMatrix {
    loop {
        let mut lams: Vec<f64> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.3) {
                    0.0
                } else {
                    rng.gen::<f64>().powi(2)
                }
            })
            .collect();
        let total: f64 = lams.iter().sum();
        if total == 0.0 {
            continue;
        }
        for l in &mut lams {
            *l *= n as f64 / total;
        }
        return circulant_from_eigenvalues(&lams).expect("valid spectrum");
    }
}
