//! Exclusion-SDP sweep over equiangular sets.

use std::fmt::Write as _;
use std::path::PathBuf;

use antidist_core::families::make_equiangular;
use antidist_core::{decide_by_sdp, Decision, SolverConfig};
use clap::Args;
use rayon::prelude::*;
use serde::Serialize;

use crate::{write_file, CliResult, Failure, SolverArgs, EXIT_OK};

/// Caps the worker count of the sweep.
pub const THREADS_ENV: &str = "ANTIDIST_THREADS";

pub const CSV_HEADER: &str = "n,gamma,sdp_value,error_probability,antidistinguishable,converged";

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Only the equiangular family is swept.
    #[arg(long, default_value = "equiangular", value_parser = ["equiangular"])]
    pub family: String,
    #[arg(long, default_value_t = 2)]
    pub n_min: usize,
    #[arg(long, default_value_t = 10)]
    pub n_max: usize,
    #[arg(long, default_value_t = 0.0)]
    pub gamma_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma_max: f64,
    #[arg(long, default_value_t = 0.01)]
    pub gamma_step: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Emit a JSON array instead of CSV.
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    /// Emit CSV (the default).
    #[arg(long)]
    pub csv: bool,
    /// Write to this file instead of stdout.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub gamma: f64,
    pub sdp_value: f64,
    pub error_probability: f64,
    /// `None` when neither certificate verified.
    pub antidistinguishable: Option<bool>,
    pub converged: bool,
}

impl SweepRow {
    pub fn to_csv(&self) -> String {
        let anti = match self.antidistinguishable {
            Some(true) => "true",
            Some(false) => "false",
            None => "undecided",
        };
        format!(
            "{},{:.16e},{:.16e},{:.16e},{anti},{}",
            self.n, self.gamma, self.sdp_value, self.error_probability, self.converged
        )
    }
}

/// `min, min + step, …` up to `max`, snapped to 12 decimals so that grid
/// points print as the decimals they stand for.
pub fn gamma_grid(min: f64, max: f64, step: f64) -> CliResult<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Failure::usage(format!(
            "gamma step must be positive, got {step}"
        )));
    }
    if !(0.0 <= min && min <= max && max <= 1.0) {
        return Err(Failure::usage(format!(
            "need 0 <= gamma-min <= gamma-max <= 1, got {min} and {max}"
        )));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize;
    Ok((0..=count)
        .map(|k| (((min + k as f64 * step) * 1e12).round() / 1e12).min(max))
        .collect())
}

pub fn sweep_rows(
    ns: &[usize],
    gammas: &[f64],
    cfg: &SolverConfig,
    zero_tol: f64,
) -> CliResult<Vec<SweepRow>> {
    let jobs: Vec<(usize, f64)> = ns
        .iter()
        .flat_map(|&n| gammas.iter().map(move |&g| (n, g)))
        .collect();
    let solve = |&(n, gamma): &(usize, f64)| -> CliResult<SweepRow> {
        let g = make_equiangular(n, gamma)?;
        let d = decide_by_sdp(&g, cfg, zero_tol)?;
        Ok(SweepRow {
            n,
            gamma,
            sdp_value: d.solution.value,
            error_probability: d.solution.error_probability(),
            antidistinguishable: match d.decision {
                Decision::Antidistinguishable => Some(true),
                Decision::NotAntidistinguishable => Some(false),
                _ => None,
            },
            converged: d.solution.converged,
        })
    };
    let pool = thread_pool()?;
    // `collect` on an indexed parallel iterator keeps input order.
    pool.install(|| jobs.par_iter().map(solve).collect())
}

fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let threads: usize = v.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
            Failure::usage(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))
        })?;
        builder = builder.num_threads(threads);
    }
    builder.build().map_err(|e| Failure::usage(e.to_string()))
}

/// Notes decision flips back to YES and value decreases, per `n`.
pub fn monotonicity_notes(rows: &[SweepRow]) -> Vec<String> {
    let mut notes = Vec::new();
    for pair in rows.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if a.n != b.n {
            continue;
        }
        if a.antidistinguishable == Some(false) && b.antidistinguishable == Some(true) {
            notes.push(format!(
                "n={}: decision flips back to YES at gamma={}",
                b.n, b.gamma
            ));
        }
        if b.sdp_value < a.sdp_value - 1e-6 {
            notes.push(format!(
                "n={}: value drops from {:e} to {:e} between gamma={} and {}",
                b.n, a.sdp_value, b.sdp_value, a.gamma, b.gamma
            ));
        }
    }
    notes
}

pub fn cmd_sweep(a: &SweepArgs) -> CliResult<u8> {
    if a.n_min < 2 || a.n_min > a.n_max {
        return Err(Failure::usage(format!(
            "need 2 <= n-min <= n-max, got {} and {}",
            a.n_min, a.n_max
        )));
    }
    let gammas = gamma_grid(a.gamma_min, a.gamma_max, a.gamma_step)?;
    let ns: Vec<usize> = (a.n_min..=a.n_max).collect();
    let rows = sweep_rows(&ns, &gammas, &a.solver.solver()?, a.solver.zero_tol)?;
    for row in rows.iter().filter(|r| !r.converged) {
        eprintln!(
            "warning: solver did not converge at n={} gamma={}",
            row.n, row.gamma
        );
    }
    for note in monotonicity_notes(&rows) {
        eprintln!("note: {note}");
    }
    let text = if a.json {
        serde_json::to_string_pretty(&rows).map_err(|e| Failure::usage(e.to_string()))? + "\n"
    } else {
        let mut s = String::new();
        let _ = writeln!(s, "{CSV_HEADER}");
        for row in &rows {
            let _ = writeln!(s, "{}", row.to_csv());
        }
        s
    };
    match &a.out {
        Some(path) => write_file(path, &text)?,
        None => out!("{text}"),
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_hits_decimals() {
        let g = gamma_grid(0.0, 1.0, 0.01).unwrap();
        assert_eq!(g.len(), 101);
        assert_eq!(g[7], 0.07);
        assert_eq!(g[75], 0.75);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!(gamma_grid(0.0, 1.0, 0.0).is_err());
        assert!(gamma_grid(0.5, 0.2, 0.1).is_err());
    }

    #[test]
    fn csv_row_has_seventeen_digits() {
        let row = SweepRow {
            n: 3,
            gamma: 0.5,
            sdp_value: 1.0 / 3.0,
            error_probability: 1.0 / 9.0,
            antidistinguishable: Some(false),
            converged: true,
        };
        assert_eq!(
            row.to_csv(),
            "3,5.0000000000000000e-1,3.3333333333333331e-1,1.1111111111111110e-1,false,true"
        );
    }
}
