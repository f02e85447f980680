//! `mlcoulomb`: spectra, corrections, eigenfunctions and extension checks for
//! the Coulomb problem with a minimal length.
//!
//! Exit codes: 0 success, 2 configuration or precondition error, 3 solver
//! failure, 4 a check exceeded its tolerance.

mod commands;
mod config;
mod table;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use config::{Layer, RunConfig, RECIPES};
use table::Table;

#[derive(Debug, Error)]
#[error("{message}")]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub const CONFIG: u8 = 2;
    pub const SOLVER: u8 = 3;
    pub const CHECK: u8 = 4;

    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: Self::CONFIG,
            message: message.into(),
        }
    }

    /// Bad input and violated preconditions are configuration errors;
    /// everything else is a failure of the numerics.
    pub fn from_core(e: mlcoulomb::Error) -> Self {
        use mlcoulomb::Error as E;
        let code = match e {
            E::InvalidParameter(_) | E::Precondition(_) | E::Unsupported(_) | E::Domain { .. } => {
                Self::CONFIG
            }
            _ => Self::SOLVER,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "mlcoulomb",
    version,
    about = "Coulomb bound states with a minimal length"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve levels and compare with closed forms where they exist.
    Spectrum(Common),
    /// Leading small-β corrections: formula, fit and ∂q²/∂β.
    Corrections(Common),
    /// Sample a normalized momentum-space eigenfunction.
    Eigenfunction {
        #[command(flatten)]
        common: Common,
        /// Number of pseudo-momentum samples across [-b, b].
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Orthonormality, completeness, inverse and parity checks of X_δ.
    ExtensionsCheck {
        #[command(flatten)]
        common: Common,
        /// Modes kept on each side of n = 0 in truncated sums.
        #[arg(long)]
        truncation: Option<usize>,
    },
    /// The momentum bound a, pseudo-momentum bound b and minimal length.
    MinimalLength(Common),
    /// List the built-in recipes.
    Recipes,
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// none | kempf | polyplus | polyminus | expsqrt | expcbrt
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    k: Option<f64>,
    /// Extension parameter δ ∈ [0, 1).
    #[arg(long, conflicts_with = "a")]
    delta: Option<f64>,
    /// Kernel constant A = cot(πδ), instead of δ.
    #[arg(long = "A", id = "a", allow_negative_numbers = true)]
    a: Option<f64>,
    /// Inclusive level range `a..b`, or a single level.
    #[arg(long)]
    levels: Option<String>,
    #[arg(long)]
    hbar: Option<f64>,
    #[arg(long)]
    mass: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Relative tolerance of quadratures and root solves.
    #[arg(long)]
    tol: Option<f64>,
    /// csv | json
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Named example; see `mlcoulomb recipes`.
    #[arg(long)]
    recipe: Option<String>,
    /// File of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Common {
    fn flags(&self) -> Result<Layer, CliError> {
        let mut l = Layer {
            family: self.family.clone(),
            beta: self.beta,
            k: self.k,
            delta: self.delta,
            a: self.a,
            hbar: self.hbar,
            mass: self.mass,
            alpha: self.alpha,
            tol: self.tol,
            output: self.output.clone(),
            ..Layer::default()
        };
        if let Some(levels) = &self.levels {
            l.set("levels", levels)?;
        }
        if let Some(format) = &self.format {
            l.set("format", format)?;
        }
        Ok(l)
    }

    /// Recipe, then file, then flags.
    fn resolve(&self, extra: Layer) -> Result<RunConfig, CliError> {
        let mut layer = match &self.recipe {
            Some(name) => config::recipe(name)?.layer(),
            None => Layer::default(),
        };
        if let Some(path) = &self.config {
            layer = layer.overlay(&Layer::load(path)?);
        }
        layer = layer.overlay(&self.flags()?).overlay(&extra);
        RunConfig::resolve(&layer)
    }
}

fn emit(cfg: &RunConfig, table: &Table) -> Result<(), CliError> {
    let text = table.render(cfg.format);
    match &cfg.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::config(format!("cannot write output: {e}")))
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Spectrum(c) => {
            let cfg = c.resolve(Layer::default())?;
            emit(&cfg, &commands::spectrum(&cfg)?)
        }
        Command::Corrections(c) => {
            let cfg = c.resolve(Layer::default())?;
            emit(&cfg, &commands::corrections(&cfg)?)
        }
        Command::Eigenfunction { common, samples } => {
            let cfg = common.resolve(Layer {
                samples,
                ..Layer::default()
            })?;
            emit(&cfg, &commands::eigenfunction(&cfg)?)
        }
        Command::ExtensionsCheck { common, truncation } => {
            let cfg = common.resolve(Layer {
                truncation,
                ..Layer::default()
            })?;
            let (table, ok) = commands::extensions_check(&cfg)?;
            emit(&cfg, &table)?;
            if ok {
                Ok(())
            } else {
                Err(CliError {
                    code: CliError::CHECK,
                    message: "one or more extension checks exceeded tolerance".into(),
                })
            }
        }
        Command::MinimalLength(c) => {
            let cfg = c.resolve(Layer::default())?;
            emit(&cfg, &commands::minimal_length(&cfg)?)
        }
        Command::Recipes => {
            let mut out = String::new();
            for r in RECIPES {
                out.push_str(&format!("{:<3} {}\n", r.name, r.summary));
            }
            print!("{out}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
