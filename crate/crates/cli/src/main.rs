// negated float comparisons are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{load_config, parse_tolerance, Overrides, RunConfig, OUT_ENV};
use error::CliError;

#[derive(Parser)]
#[command(name = "covqm", version, about = "Covariant quantum mechanics on periodic grids")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Config file, key=value lines or JSON; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Grid points per axis (power of two).
    #[arg(long, global = true)]
    grid_n: Option<usize>,
    /// Spatial dimension, 1 to 3.
    #[arg(long, global = true)]
    grid_dim: Option<usize>,
    /// Box side length.
    #[arg(long = "box", global = true)]
    box_length: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    kappa: Option<f64>,
    #[arg(long, global = true)]
    c: Option<f64>,
    /// Energy offset.
    #[arg(long, global = true, allow_hyphen_values = true)]
    d: Option<f64>,
    /// Gaussian width.
    #[arg(long, global = true)]
    lambda: Option<f64>,
    /// Seed for randomized suites.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides the COVQM_OUT environment variable.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Tolerance override, KEY=VAL; repeatable.
    #[arg(long = "tol-override", global = true, value_name = "KEY=VAL")]
    tol_override: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Gaussian characteristic and Wigner tables against their closed forms.
    DemoGaussian,
    /// Run every invariant suite and report measured values against tolerances.
    CheckInvariants,
    /// Galilei multiplier residuals on random element pairs.
    CocycleTable,
    /// Spin multipliers, lifts and spinor correlation phases.
    SpinDemo,
    /// Von Neumann projection diagnostics.
    VnCheck,
    /// Wavevector and energy spectrum on the circle.
    CircleSpectrum,
    /// Write a Gaussian in position and wavevector form.
    ExportWavefunction,
    /// Read a position-space file and summarize it.
    ImportWavefunction {
        #[arg(long)]
        input: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::DemoGaussian => "demo-gaussian",
            Command::CheckInvariants => "check-invariants",
            Command::CocycleTable => "cocycle-table",
            Command::SpinDemo => "spin-demo",
            Command::VnCheck => "vn-check",
            Command::CircleSpectrum => "circle-spectrum",
            Command::ExportWavefunction => "export-wavefunction",
            Command::ImportWavefunction { .. } => "import-wavefunction",
        }
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let g = &cli.global;
    let file = match &g.config {
        Some(p) => load_config(p)?,
        None => Overrides::default(),
    };
    let mut flags = Overrides {
        grid_n: g.grid_n,
        grid_dim: g.grid_dim,
        box_length: g.box_length,
        kappa: g.kappa,
        c: g.c,
        d: g.d,
        lambda: g.lambda,
        seed: g.seed,
        ..Default::default()
    };
    for t in &g.tol_override {
        let (k, v) = parse_tolerance(t)?;
        flags.tolerances.insert(k, v);
    }
    let env_out = std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
    let name = cli.command.name();
    RunConfig::resolve(name, file.merged(flags), env_out, g.out.clone(), commands::tolerances_for(name))
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let cfg = resolve(cli)?;
    match &cli.command {
        Command::DemoGaussian => commands::demo_gaussian(&cfg),
        Command::CheckInvariants => commands::check_invariants(&cfg),
        Command::CocycleTable => commands::cocycle_table(&cfg),
        Command::SpinDemo => commands::spin_demo(&cfg),
        Command::VnCheck => commands::vn(&cfg),
        Command::CircleSpectrum => commands::circle(&cfg),
        Command::ExportWavefunction => commands::export_wavefunction(&cfg),
        Command::ImportWavefunction { input } => commands::import_wavefunction(&cfg, input),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("{}: one or more checks failed", cli.command.name());
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
