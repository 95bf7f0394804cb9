//! `microcavity` command-line front end.
//!
//! Exit status: 0 on success, 2 for configuration or usage errors, 3 when a
//! numerical routine fails.

mod commands;
mod output;
mod scan;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use scan::ScanSpec;

#[derive(Parser)]
#[command(name = "microcavity", version, about = "Single-atom detection in optical microcavities")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Master random seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stationary state for the configured parameters (JSON).
    Steady {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Resonant intensity contrast over a parameter grid (CSV).
    ScanPump(ScanArgs),
    /// Homodyne phase signal over a parameter grid (CSV).
    HomodyneScan(ScanArgs),
    /// Standing-wave averages and heating over a parameter grid (CSV).
    MotionAverages(ScanArgs),
    /// Monte Carlo transit experiment.
    Simulate(SimulateArgs),
    /// Fiber-gap cavity design calculator (JSON).
    DesignCavity(DesignArgs),
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long)]
    config: PathBuf,
    /// `var:log|lin:lo:hi:points` with var in j_in [1/us], kappa_t [MHz],
    /// kappa_loss [MHz], delta_a [gamma]. Default: 200 log points of j_in
    /// over four decades around saturation.
    #[arg(long)]
    scan: Option<ScanSpec>,
    /// Output file; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub atoms: Option<usize>,
    /// Detection threshold in counts per window.
    #[arg(long)]
    pub threshold: Option<u32>,
    #[arg(long)]
    pub window_us: Option<f64>,
    /// Switch off recoil heating and momentum diffusion.
    #[arg(long)]
    pub no_recoil: bool,
    /// Also tabulate efficiency and dark rate, e.g. `threshold:lin:6:16:11`.
    #[arg(long)]
    pub scan: Option<ScanSpec>,
    /// Keep every n-th integration step in trajectories.csv.
    #[arg(long, default_value_t = 10)]
    pub trajectory_every: usize,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct DesignArgs {
    /// Core diameter (um).
    #[arg(long)]
    pub core_um: f64,
    #[arg(long)]
    pub n_core: f64,
    #[arg(long)]
    pub n_clad: f64,
    #[arg(long, default_value_t = 780.0)]
    pub lambda_nm: f64,
    /// Fiber length (mm).
    #[arg(long, conflicts_with = "length_half_waves")]
    pub length_mm: Option<f64>,
    /// Fiber length in half-wavelengths inside the core.
    #[arg(long)]
    pub length_half_waves: Option<f64>,
    /// Intensity transmission of the mirror coating.
    #[arg(long)]
    pub transmission: f64,
    /// Resonance order of the gap.
    #[arg(long, conflicts_with = "gap_um", allow_negative_numbers = true)]
    pub mode_index: Option<i64>,
    /// Full gap 2d (um).
    #[arg(long)]
    pub gap_um: Option<f64>,
    /// Additional loss added to kappa_gap (MHz).
    #[arg(long, default_value_t = 0.0)]
    pub extra_loss_mhz: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    pub fn config(msg: impl std::fmt::Display) -> Self {
        Failure { code: 2, error: anyhow::anyhow!("{msg}") }
    }
}

impl From<microcavity::Error> for Failure {
    fn from(e: microcavity::Error) -> Self {
        use microcavity::Error as E;
        let code = match e {
            E::NoPhysicalRoot | E::NoMaximumInBounds { .. } => 3,
            _ => 2,
        };
        Failure { code, error: e.into() }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::config(format!("--threads: {e}")))?;
    }
    let seed = cli.seed;
    match cli.command {
        Command::Steady { config, out } => commands::steady(&config, out.as_deref(), seed),
        Command::ScanPump(a) => commands::scan_pump(&a.config, a.scan, a.out.as_deref(), seed),
        Command::HomodyneScan(a) => commands::homodyne_scan(&a.config, a.scan, a.out.as_deref(), seed),
        Command::MotionAverages(a) => commands::motion_averages(&a.config, a.scan, a.out.as_deref(), seed),
        Command::Simulate(a) => commands::simulate(&a, seed),
        Command::DesignCavity(a) => commands::design_cavity(&a, seed),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numerical_failures_map_to_three() {
        assert_eq!(Failure::from(microcavity::Error::NoPhysicalRoot).code, 3);
        assert_eq!(Failure::from(microcavity::Error::NoMaximumInBounds { lower: 0.0, upper: 1.0 }).code, 3);
        assert_eq!(Failure::from(microcavity::Error::Config("x".into())).code, 2);
        assert_eq!(Failure::from(microcavity::Error::StepTooLarge { dt: 1.0, limit: 0.1 }).code, 2);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
