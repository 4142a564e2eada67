//! `sfwm`: joint spectra, count simulation, count-curve fitting and purity
//! bounds for dual-pump four-wave-mixing pair sources.

mod config;
mod fit;
mod jsd;
mod output;
mod purity;
mod simulate;
mod svg;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{RunConfig, MIN_GRID_POINTS};
use output::Provenance;

#[derive(Debug)]
pub enum CliError {
    /// Malformed or out-of-range input; exit code 2.
    Schema(String),
    /// The numerics refused the input (no phasematch, unidentifiable fit,
    /// inconsistent counts, ...); exit code 3.
    Numerical(sfwm::Error),
    /// Reading inputs or writing outputs failed; exit code 1.
    Io { path: PathBuf, source: std::io::Error },
    Output(String),
}

impl CliError {
    pub fn schema(msg: impl Into<String>) -> Self {
        CliError::Schema(msg.into())
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } | CliError::Output(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Schema(msg) => write!(f, "invalid input: {msg}"),
            CliError::Numerical(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Output(msg) => write!(f, "output: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<sfwm::Error> for CliError {
    fn from(e: sfwm::Error) -> Self {
        CliError::Numerical(e)
    }
}

#[derive(Parser)]
#[command(name = "sfwm", version, about = "Photon-pair source modelling for dual-pump four-wave mixing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to `output_dir` from the config, else `out`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Joint spectral densities, marginals and purities for each [[jsd]] entry.
    Jsd {
        #[command(flatten)]
        io: ConfigArgs,
        /// Grid points per axis; overrides `grid.points`.
        #[arg(long)]
        grid: Option<usize>,
        /// Also write SVG heatmaps.
        #[arg(long)]
        svg: bool,
    },
    /// Synthetic count records over the configured delay scan.
    Simulate {
        #[command(flatten)]
        io: ConfigArgs,
        /// Random seed; overrides `seed` from the config (default 0).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Joint fit of singles and coincidence curves from a counts CSV.
    Fit {
        /// CSV with columns tau_ps, C_s, C_i, C_si, R and optionally scale.
        input: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Also write an SVG overlay of data and model.
        #[arg(long)]
        svg: bool,
    },
    /// Noise-corrected purity bounds from a JSON bundle of autocorrelation counts.
    Purity {
        input: PathBuf,
        /// Directory for purity.json; without it only the table row is printed.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::io(path, e))
}

fn load_config(args: &ConfigArgs) -> Result<(RunConfig, Provenance, PathBuf), CliError> {
    let bytes = read(&args.config)?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| CliError::schema(format!("{}: not valid UTF-8", args.config.display())))?;
    let config = RunConfig::parse(&text)?;
    let out = args.out.clone().or_else(|| config.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    Ok((config, Provenance::of_input(&bytes), out))
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Jsd { io, grid, svg } => {
            let (config, provenance, out) = load_config(&io)?;
            let points = grid.unwrap_or(config.grid.points);
            if points < MIN_GRID_POINTS {
                return Err(CliError::schema(format!("--grid: need at least {MIN_GRID_POINTS}, got {points}")));
            }
            let reports = jsd::run(&config, &provenance, &out, points, svg)?;
            println!("{:<16} {:>10} {:>10} {:>10} {:>8} {:>8}", "label", "Δλ (nm)", "λs (nm)", "λi (nm)", "purity", "K");
            for r in &reports {
                println!(
                    "{:<16} {:>10.2} {:>10.2} {:>10.2} {:>8.4} {:>8.3}",
                    r.label, r.detuning_nm, r.signal_nm, r.idler_nm, r.purity, r.schmidt_number
                );
            }
        }
        Command::Simulate { io, seed } => {
            let (config, provenance, out) = load_config(&io)?;
            let seed = seed.or(config.seed).unwrap_or(0);
            let records = simulate::run(&config, &provenance, &out, seed)?;
            println!("{} records written to {}", records.len(), out.join("counts.csv").display());
        }
        Command::Fit { input, out, svg } => {
            let bytes = read(&input)?;
            let records = fit::read_records(&bytes)?;
            let result = fit::run(&records, &Provenance::of_input(&bytes), &out, svg)?;
            for (name, (value, err)) in sfwm::counts::PARAM_NAMES.iter().zip(result.estimates()) {
                println!("{name:<6} {value:>14.6e} ± {err:.3e}");
            }
            println!("χ²/dof = {:.4} ({} dof, {} iterations)", result.reduced_chi_square, result.dof, result.iterations);
        }
        Command::Purity { input, out } => {
            let bytes = read(&input)?;
            let report = purity::run(&bytes, &Provenance::of_input(&bytes), out.as_deref())?;
            println!("{}", purity::ROW_HEADER);
            println!("{}", report.row());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sfwm: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
