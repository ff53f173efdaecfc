//! Writers for the named families.

use std::path::{Path, PathBuf};

use antidist_core::families::{make_d4_example, make_equiangular, make_trine};
use antidist_core::gram::circulant_from_eigenvalues;
use antidist_core::io::{GramFile, StatesFile};
use clap::{Args, Subcommand};
use serde::Serialize;

use crate::{write_file, CliResult, Failure, EXIT_OK};

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(subcommand)]
    pub family: Family,
    /// Output file; for `d4`, the directory receiving `G.json` and `G_eps.json`.
    #[arg(short, long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Family {
    /// The three trine qubit states (state-set file).
    Trine,
    /// `I + γ(𝟏𝟏ᵀ - I)`.
    Equiangular {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        gamma: f64,
    },
    /// The four-state Gram matrix and its perturbation.
    D4 {
        #[arg(long)]
        eps: f64,
    },
    /// Circulant Gram matrix with the given DFT spectrum.
    CirculantSpectrum {
        #[arg(long, value_delimiter = ',', required = true)]
        lams: Vec<f64>,
    },
}

fn json<T: Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Failure::usage(e.to_string()))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => write_file(path, text),
        None => {
            out!("{text}");
            Ok(())
        }
    }
}

pub fn cmd_generate(a: &GenerateArgs) -> CliResult<u8> {
    let out = a.out.as_deref();
    match &a.family {
        Family::Trine => emit(out, &json(&StatesFile::from_states(&make_trine()))?)?,
        Family::Equiangular { n, gamma } => emit(
            out,
            &json(&GramFile::from_gram(&make_equiangular(*n, *gamma)?))?,
        )?,
        Family::CirculantSpectrum { lams } => emit(
            out,
            &json(&GramFile::from_gram(&circulant_from_eigenvalues(lams)?))?,
        )?,
        Family::D4 { eps } => {
            let ex = make_d4_example(*eps)?;
            let dir = out.unwrap_or(Path::new("."));
            std::fs::create_dir_all(dir)
                .map_err(|e| Failure::usage(format!("cannot create {}: {e}", dir.display())))?;
            for (name, g) in [("G.json", &ex.g), ("G_eps.json", &ex.g_eps)] {
                let path = dir.join(name);
                write_file(&path, &json(&GramFile::from_gram(g))?)?;
                eprintln!("wrote {}", path.display());
            }
        }
    }
    Ok(EXIT_OK)
}
