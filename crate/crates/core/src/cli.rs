//! Command-line front end for the `dyadic` binary.
//!
//! Exit codes: 0 on success, 2 for invalid input, 3 for filesystem errors.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::clt::{default_initial, emit_report, run_clt, CltConfig, ReportFormat, DEFAULT_STABILITY_GATE};
use crate::error::{Error, Result};
use crate::haar::{GridLayout, LpExponent};
use crate::io::{read_grid_function, read_kernel, write_grid_function, write_kernel, write_kernel_table, KernelColumn};
use crate::kernel::{convolve, gaussian, power_law_seed, psi, step, Window};
use crate::spectral::heat_solve;

#[derive(Debug, Parser)]
#[command(name = "dyadic", version, about = "Dyadic Markov kernels, Haar multipliers and the stable central limit")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build, inspect and combine kernels.
    #[command(subcommand)]
    Kernel(KernelCommand),
    /// Print the stability report of a kernel as JSON.
    Stability {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Print ψ(r) and r²ψ(r) as JSON.
    Psi {
        #[arg(long, allow_hyphen_values = true)]
        r: f64,
    },
    /// Run the iteration-mollification ladder against the heat semigroup.
    Clt(CltArgs),
    /// Solve the dyadic heat equation for a grid function.
    Solve {
        #[arg(long)]
        s: f64,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long)]
        u0: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KernelType {
    Gaussian,
    Powerlaw,
    Step,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Show {
    Lambda,
    Alpha,
    K,
    All,
}

#[derive(Debug, Subcommand)]
enum KernelCommand {
    /// Write a kernel to JSON.
    Build {
        #[arg(long = "type", value_enum)]
        kind: KernelType,
        /// Time parameter of the gaussian kernel.
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        t: f64,
        /// Stability parameter of the power-law seed.
        #[arg(long, allow_hyphen_values = true)]
        sigma: Option<f64>,
        #[arg(long, default_value = "-30:30", allow_hyphen_values = true, value_parser = parse_window)]
        window: Window,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print sequence views of a kernel as CSV.
    Convert {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        show: Show,
    },
    /// Convolve two kernels.
    Convolve {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct CltArgs {
    #[arg(long)]
    seed: PathBuf,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    t: f64,
    #[arg(long, default_value_t = 20)]
    imax: u32,
    #[arg(long, default_value = "-6:6", allow_hyphen_values = true, value_parser = parse_window)]
    jrange: Window,
    #[arg(long, default_value = "4:8", allow_hyphen_values = true, value_parser = parse_grid)]
    grid: GridLayout,
    #[arg(long, default_value = "1,2,inf", value_delimiter = ',', value_parser = parse_exponent)]
    p: Vec<LpExponent>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: PathBuf,
    /// Initial datum (grid-function CSV); defaults to h^0_0.
    #[arg(long)]
    u0: Option<PathBuf>,
    /// Relative tolerance of the stability check against 2t/3.
    #[arg(long, default_value_t = DEFAULT_STABILITY_GATE)]
    gate: f64,
    /// Skip the stability check.
    #[arg(long)]
    assume_stable: bool,
}

fn parse_window(s: &str) -> std::result::Result<Window, String> {
    Window::parse(s).map_err(|e| e.to_string())
}

fn parse_grid(s: &str) -> std::result::Result<GridLayout, String> {
    let (jd, jr) = s.split_once(':').ok_or_else(|| format!("expected <Jd>:<Jr>, got {s:?}"))?;
    let jd = jd.trim().parse().map_err(|_| format!("invalid Jd {jd:?}"))?;
    let jr = jr.trim().parse().map_err(|_| format!("invalid Jr {jr:?}"))?;
    GridLayout::new(jd, jr).map_err(|e| e.to_string())
}

fn parse_exponent(s: &str) -> std::result::Result<LpExponent, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Error::io("<stdout>", e.into()))?;
    writeln!(out).map_err(|e| Error::io("<stdout>", e))
}

#[derive(Serialize)]
struct PsiOutput {
    r: f64,
    psi: f64,
    r2_psi: f64,
}

fn run_kernel(cmd: KernelCommand) -> Result<()> {
    match cmd {
        KernelCommand::Build { kind, t, sigma, window, out } => {
            let k = match kind {
                KernelType::Gaussian => gaussian(t, window)?,
                KernelType::Powerlaw => {
                    let sigma = sigma.ok_or_else(|| Error::Domain("--sigma is required for powerlaw".into()))?;
                    power_law_seed(sigma, window)?
                }
                KernelType::Step => step(window)?,
            };
            write_kernel(&out, &k)
        }
        KernelCommand::Convert { input, show } => {
            let k = read_kernel(&input)?;
            let columns: &[KernelColumn] = match show {
                Show::Lambda => &[KernelColumn::Lambda],
                Show::Alpha => &[KernelColumn::Alpha],
                Show::K => &[KernelColumn::K],
                Show::All => &KernelColumn::ALL,
            };
            write_kernel_table(std::io::stdout().lock(), &k, columns)
        }
        KernelCommand::Convolve { a, b, out } => {
            let c = convolve(&read_kernel(&a)?, &read_kernel(&b)?);
            write_kernel(&out, &c)
        }
    }
}

fn run_clt_command(args: CltArgs) -> Result<()> {
    let seed = read_kernel(&args.seed)?;
    let config = CltConfig {
        t: args.t,
        i_max: args.imax,
        j_range: args.jrange,
        layout: args.grid,
        p: args.p,
        stability_gate: args.gate,
        assume_stable: args.assume_stable,
    };
    let u0 = match &args.u0 {
        Some(path) => read_grid_function(path)?,
        None => default_initial(config.layout)?,
    };
    let report = run_clt(&seed, &config, &u0)?;
    let format = match args.format {
        Format::Csv => ReportFormat::Csv,
        Format::Json => ReportFormat::Json,
    };
    emit_report(&report, format, &args.out)
}

/// Runs a parsed command line.
pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Kernel(cmd) => run_kernel(cmd),
        Command::Stability { input } => print_json(&read_kernel(&input)?.stability_estimate()?),
        Command::Psi { r } => {
            let value = psi(r)?;
            print_json(&PsiOutput { r, psi: value, r2_psi: r * r * value })
        }
        Command::Clt(args) => run_clt_command(args),
        Command::Solve { s, t, u0, out } => {
            let u = heat_solve(s, t, &read_grid_function(&u0)?)?;
            write_grid_function(&out, &u)
        }
    }
}

/// Entry point: parses `std::env::args`, runs, and maps errors to exit codes.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 3 } else { 2 })
        }
    }
}
