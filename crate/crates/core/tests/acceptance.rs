//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

// `ensure!` negates comparisons on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::f64::consts::SQRT_2;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use antidist_core::certificates::{
    all_ones_witness_fixture, d4_delta_max, d4_witness_parts, make_d4_witness,
    make_equiangular_decomposition, make_sum_ip_witness, round_decomposition, round_witness,
    small_decomposition_fixture, DEFAULT_VERIFY_TOL,
};
use antidist_core::criteria::{
    check_eigenvalue_sufficient, check_frobenius, check_pairwise_ip_large, check_pairwise_ip_small,
    check_sum_ip, decide_circulant_exact, BoundVerdict,
};
use antidist_core::families::{
    equiangular_threshold, make_d4_example, make_equiangular, make_trine,
};
use antidist_core::gram::{circulant_from_eigenvalues, circulant_profile, DEFAULT_CIRCULANT_TOL};
use antidist_core::povm::{gram_blocks_from_povm, reconstruct_povm};
use antidist_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn lib<T>(r: antidist_core::Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn within(elapsed: Duration, budget: Duration) -> std::result::Result<(), String> {
    if elapsed > budget {
        Err(format!("took {elapsed:?}, budget {budget:?}"))
    } else {
        Ok(())
    }
}

fn sdp_value(g: &GramMatrix) -> std::result::Result<f64, String> {
    let s = lib(solve_exclusion_sdp(g, &SolverConfig::default()))?;
    ensure!(
        s.converged,
        "solver did not converge in {} iterations",
        s.iterations
    );
    Ok(s.value)
}

fn trine() -> Check {
    let start = Instant::now();
    let states = make_trine();
    let g = states.gram();
    let report = lib(analyze(&g, &AnalysisOptions::default()))?;
    ensure!(
        report.decision == Decision::Antidistinguishable,
        "analyze returned {:?}",
        report.decision
    );
    let sol = lib(solve_exclusion_sdp(&g, &SolverConfig::default()))?;
    ensure!(sol.value <= 1e-6, "forced SDP value {:e}", sol.value);
    let povm = lib(reconstruct_povm(&states, &sol.blocks))?;
    let completeness = povm.completeness_residual();
    ensure!(
        completeness <= 1e-8,
        "sum of effects off identity by {completeness:e}"
    );
    let hits = lib(povm.hit_probabilities(&states))?;
    let worst = hits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    ensure!(worst <= 1e-7, "largest hit probability {worst:e}");
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!(
        "decided by {}, SDP value {:.1e}, max hit {worst:.1e}, {:?}",
        report.decided_by.unwrap_or_default(),
        sol.value,
        start.elapsed()
    ))
}

fn equiangular_threshold_sweep() -> Check {
    let start = Instant::now();
    let opts = AnalysisOptions::default();
    let mut analyzed = 0;
    for n in 2..=8 {
        let threshold = equiangular_threshold(n);
        let mut first_no: Option<f64> = None;
        let mut last_yes: Option<f64> = None;
        for k in 0..=1000 {
            let gamma = k as f64 / 1000.0;
            let g = lib(make_equiangular(n, gamma))?;
            let report = lib(analyze(&g, &opts))?;
            analyzed += 1;
            let expect_yes = gamma <= threshold;
            match report.decision {
                Decision::Antidistinguishable => {
                    ensure!(expect_yes, "n={n} gamma={gamma}: YES above the threshold");
                    ensure!(
                        first_no.is_none(),
                        "n={n} gamma={gamma}: flipped back to YES"
                    );
                    last_yes = Some(gamma);
                    if n >= 3 {
                        let dec = lib(make_equiangular_decomposition(n, gamma))?;
                        let rep = lib(verify_decomposition(g.as_hermitian(), &dec, 1e-10))?;
                        ensure!(
                            rep.accepted,
                            "n={n} gamma={gamma}: closed-form blocks rejected {rep:?}"
                        );
                    }
                }
                Decision::NotAntidistinguishable => {
                    ensure!(!expect_yes, "n={n} gamma={gamma}: NO below the threshold");
                    first_no.get_or_insert(gamma);
                    let witness = make_sum_ip_witness(&g);
                    let by_witness = lib(verify_witness(
                        g.as_hermitian(),
                        &witness,
                        DEFAULT_VERIFY_TOL,
                    ))?
                    .accepted;
                    let by_pairwise = check_pairwise_ip_large(&g).applies;
                    ensure!(
                        by_witness || by_pairwise,
                        "n={n} gamma={gamma}: no closed-form NO certificate"
                    );
                }
                other => return Err(format!("n={n} gamma={gamma}: {other:?}")),
            }
        }
        let first_no = first_no.ok_or(format!("n={n}: never NO"))?;
        let last_yes = last_yes.ok_or(format!("n={n}: never YES"))?;
        ensure!(
            first_no > threshold && first_no - threshold <= 1e-3 + 1e-12,
            "n={n}: first NO at {first_no}, threshold {threshold}"
        );
        ensure!(
            threshold - last_yes < 1e-3,
            "n={n}: last YES at {last_yes}, threshold {threshold}"
        );
    }
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!("{analyzed} instances, {:?}", start.elapsed()))
}

/// SDP values of equiangular sets cross-checked against an independent solver.
const FROZEN_VALUES: &[(usize, f64, f64)] = &[
    (3, 0.6, 0.015889130714),
    (3, 0.7, 0.068629150102),
    (3, 0.8, 0.171852993210),
    (3, 0.9, 0.361132983716),
    (3, 0.95, 0.525615126276),
    (4, 0.6, 0.0),
    (4, 0.7, 0.003452385851),
    (4, 0.8, 0.063068312315),
    (4, 0.9, 0.237585620455),
    (4, 0.95, 0.416877670946),
    (5, 0.9, 0.154827202700),
    (6, 0.6, 0.0),
    (6, 0.8, 0.0),
    (6, 0.9, 0.097300252151),
    (6, 0.95, 0.273016225436),
];

fn sdp_endpoints() -> Check {
    let mut solves = 0;
    for n in 2..=10 {
        let at_zero = sdp_value(&lib(make_equiangular(n, 0.0))?)?;
        ensure!(at_zero <= 1e-8, "n={n}: value at gamma=0 is {at_zero:e}");
        let at_one = sdp_value(&lib(make_equiangular(n, 1.0))?)?;
        ensure!(
            (at_one - 1.0).abs() <= 1e-6,
            "n={n}: value at gamma=1 is {at_one}"
        );
        let threshold = equiangular_threshold(n);
        for k in 0..=100 {
            let gamma = k as f64 / 100.0;
            let v = sdp_value(&lib(make_equiangular(n, gamma))?)?;
            solves += 1;
            ensure!(
                (v.abs() <= 1e-6) == (gamma <= threshold),
                "n={n} gamma={gamma}: value {v:e} on the wrong side of threshold {threshold}"
            );
        }
    }
    for &(n, gamma, expected) in FROZEN_VALUES {
        let v = sdp_value(&lib(make_equiangular(n, gamma))?)?;
        ensure!(
            (v - expected).abs() <= 1e-7,
            "n={n} gamma={gamma}: value {v}, frozen {expected}"
        );
    }
    let ex = lib(make_d4_example(0.05))?;
    let v = sdp_value(&ex.g_eps)?;
    ensure!(
        (v - 0.00503223).abs() <= 5e-8,
        "perturbed four-state value {v}"
    );
    Ok(format!(
        "{solves} grid solves, {} frozen values",
        FROZEN_VALUES.len() + 1
    ))
}

fn circulant_exactness() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let cfg = SolverConfig::default();
    let (mut agreed, mut tested, mut no_count) = (0, 0, 0);
    while tested < 200 {
        let n = rng.gen_range(2..=8);
        let g = common::random_circulant(&mut rng, n);
        let (verdict, _) = lib(decide_circulant_exact(&circulant_profile(
            &g,
            DEFAULT_CIRCULANT_TOL,
        )))?;
        if verdict.margin.abs() <= 1e-6 {
            continue;
        }
        tested += 1;
        let exact = verdict.implies().expect("circulant rule always decides");
        let sdp = lib(decide_by_sdp(&g, &cfg, 1e-6))?;
        if sdp.decision == exact {
            agreed += 1;
        }
        if exact == Decision::NotAntidistinguishable {
            no_count += 1;
        }
    }
    ensure!(agreed == tested, "agreement {agreed}/{tested}");
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!(
        "{agreed}/{tested} agree ({no_count} NO), {:?}",
        start.elapsed()
    ))
}

fn four_state_example() -> Check {
    let eps = 0.05;
    let ex = lib(make_d4_example(eps))?;
    let c = 1.0 / 3f64.sqrt();
    for m in ex.g.off_diagonal_moduli() {
        ensure!((m - c).abs() <= 1e-12, "off-diagonal modulus {m}");
    }
    let small = check_pairwise_ip_small(&ex.g);
    ensure!(
        small.margin.abs() <= 1e-12,
        "pairwise margin {:e}",
        small.margin
    );
    let opts = AnalysisOptions::default();
    let yes = lib(analyze(&ex.g, &opts))?;
    ensure!(
        yes.decision == Decision::Antidistinguishable,
        "G decided {:?}",
        yes.decision
    );

    let no = lib(analyze(&ex.g_eps, &opts))?;
    ensure!(
        no.decision == Decision::NotAntidistinguishable,
        "G_eps decided {:?}",
        no.decision
    );
    let cert = lib(no.certificate())?.ok_or("no certificate for G_eps")?;
    ensure!(
        matches!(cert, Certificate::Witness(_)),
        "G_eps certificate is a {}",
        cert.kind()
    );
    ensure!(
        lib(cert.verify(ex.g_eps.as_hermitian(), DEFAULT_VERIFY_TOL))?.accepted(),
        "G_eps witness rejected"
    );

    let (y, z) = d4_witness_parts(eps);
    let ty = y.trace_product(ex.g_eps.as_hermitian());
    let tz = z.trace_product(ex.g_eps.as_hermitian());
    let tz_expected = -20.0 * 3f64.sqrt() * eps * eps / (1.0 - 2.0 * eps);
    ensure!(ty.abs() <= 1e-9, "Tr(Y G_eps) = {ty:e}");
    ensure!(
        ((tz - tz_expected) / tz_expected).abs() <= 1e-9,
        "Tr(Z G_eps) = {tz}, expected {tz_expected}"
    );
    let delta = d4_delta_max(eps);
    let w = lib(make_d4_witness(eps, delta))?;
    ensure!(
        w.min_submatrix_eig() >= -1e-9,
        "min submatrix eigenvalue {:e}",
        w.min_submatrix_eig()
    );
    Ok(format!(
        "G via {}, G_eps via {}, Tr(Z G_eps) = {tz:.6}, delta_max = {delta:.6}",
        yes.decided_by.unwrap_or_default(),
        no.decided_by.unwrap_or_default()
    ))
}

fn tightness_spectrum() -> Check {
    let mut lines = 0;
    for eps in [0.01, 0.1] {
        for n in [4usize, 6, 8] {
            let mut lams = vec![0.0; n];
            lams[0] = n as f64 / 2.0 + eps;
            lams[1] = n as f64 / 2.0 - eps;
            let g = lib(circulant_from_eigenvalues(&lams))?;
            let (verdict, _) = lib(decide_circulant_exact(&circulant_profile(
                &g,
                DEFAULT_CIRCULANT_TOL,
            )))?;
            ensure!(
                verdict.implies() == Some(Decision::NotAntidistinguishable),
                "n={n} eps={eps}: circulant rule says {:?} (margin {:e})",
                verdict.implies(),
                verdict.margin
            );
            let report = lib(analyze(&g, &AnalysisOptions::default()))?;
            ensure!(
                report.decision == Decision::NotAntidistinguishable,
                "n={n} eps={eps}: analyze says {:?}",
                report.decision
            );
            let fro = g.frobenius_norm();
            let bound = n as f64 / SQRT_2 + SQRT_2 * eps + 1e-9;
            ensure!(fro <= bound, "n={n} eps={eps}: ||G||_F = {fro} > {bound}");
            lines += 1;
        }
    }
    Ok(format!(
        "{lines} spectra rejected within the Frobenius bound"
    ))
}

fn fires(v: &BoundVerdict) -> bool {
    v.applies && !v.boundary
}

fn fails_clearly(v: &BoundVerdict) -> bool {
    !v.applies && !v.boundary
}

fn soundness_suite() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let cfg = SolverConfig::default();
    let (mut yes, mut no, mut chain_violations, mut mixed) = (0, 0, 0, 0);
    for k in 0..1000 {
        let n = rng.gen_range(2..=8);
        let g = common::random_gram(&mut rng, n);
        let target = g.as_hermitian();
        let sol = lib(solve_exclusion_sdp(&g, &cfg))?;
        let dec = round_decomposition(target, &sol.blocks, DEFAULT_VERIFY_TOL).is_ok();
        let wit = round_witness(target, &sol.dual.scale(-1.0), false, DEFAULT_VERIFY_TOL).is_ok();
        ensure!(
            !(dec && wit),
            "instance {k} (n={n}): decomposition and witness both verify"
        );
        yes += dec as usize;
        no += wit as usize;

        let small = check_pairwise_ip_small(&g);
        let fro = check_frobenius(&g);
        let (eig, _) = lib(check_eigenvalue_sufficient(&g))?;
        if (fires(&small) && fails_clearly(&fro)) || (fires(&fro) && fails_clearly(&eig)) {
            chain_violations += 1;
        }
        let necessary = [check_sum_ip(&g), check_pairwise_ip_large(&g)];
        let sufficient = [small, fro, eig];
        if necessary.iter().any(fires) && sufficient.iter().any(fires) {
            mixed += 1;
        }
    }
    ensure!(
        chain_violations == 0,
        "{chain_violations} implication-chain violations"
    );
    ensure!(
        mixed == 0,
        "{mixed} instances where rules of both kinds fire"
    );
    Ok(format!(
        "{yes} YES, {no} NO, {} neither, {:?}",
        1000 - yes - no,
        start.elapsed()
    ))
}

fn fixtures() -> Check {
    let (target, dec) = small_decomposition_fixture();
    let rep = lib(verify_decomposition(&target, &dec, DEFAULT_VERIFY_TOL))?;
    ensure!(
        rep.accepted && rep.sum_residual == 0.0,
        "3x3 decomposition: {rep:?}"
    );
    let (ones, w) = all_ones_witness_fixture();
    let rep = lib(verify_witness(&ones, &w, DEFAULT_VERIFY_TOL))?;
    ensure!(rep.accepted, "all-ones witness: {rep:?}");
    ensure!(
        (rep.trace_product + 3.0).abs() <= 1e-12,
        "Tr(XY) = {}",
        rep.trace_product
    );
    Ok(format!(
        "decomposition exact, Tr(XY) = {}",
        rep.trace_product
    ))
}

fn povm_round_trip() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    let (mut worst_obj, mut worst_comp) = (0.0f64, 0.0f64);
    for k in 0..100 {
        let n = rng.gen_range(2..=8);
        let d = rng.gen_range(1..=8);
        let states = common::random_states(&mut rng, n, d);
        let parts: Vec<HermitianMatrix> = (0..n)
            .map(|_| {
                let rank = rng.gen_range(1..=d);
                common::random_psd(&mut rng, d, rank).add(&HermitianMatrix::identity(d).scale(1e-3))
            })
            .collect();
        let povm = lib(Povm::from_parts(&parts))?;
        let blocks = lib(gram_blocks_from_povm(&states, &povm))?;
        let back = lib(reconstruct_povm(&states, &blocks))?;
        let drift = (lib(back.objective(&states))? - lib(povm.objective(&states))?).abs();
        ensure!(
            drift <= 1e-7,
            "instance {k} (n={n}, d={d}): objective moved by {drift:e}"
        );
        let comp = back.completeness_residual();
        ensure!(
            comp <= 1e-8,
            "instance {k} (n={n}, d={d}): completeness {comp:e}"
        );
        worst_obj = worst_obj.max(drift);
        worst_comp = worst_comp.max(comp);
    }
    Ok(format!(
        "worst objective drift {worst_obj:.1e}, worst completeness {worst_comp:.1e}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("trine states", trine),
        ("equiangular threshold", equiangular_threshold_sweep),
        ("SDP endpoints and frozen values", sdp_endpoints),
        ("circulant exactness", circulant_exactness),
        ("four-state example", four_state_example),
        ("circulant tightness spectrum", tightness_spectrum),
        ("duality and soundness", soundness_suite),
        ("fixture verification", fixtures),
        ("POVM round trip", povm_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {}: {name} ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}: {name} ({why})", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
