//! `dabkit` command-line front end.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dabkit::stability::LoadMode;

/// Exit status when per-point failures were reported.
pub const EXIT_POINT_FAILURES: u8 = 1;
/// Exit status for usage and configuration errors.
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "dabkit", version, about = "Dual active bridge converter analysis toolkit")]
pub struct Cli {
    /// Converter parameter file (TOML); built-in defaults when omitted.
    #[arg(long, global = true)]
    pub params: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Seed for the optimizer's multistart.
    #[arg(long, global = true, default_value_t = 0x0DAB)]
    pub seed: u64,
    /// Write angle columns in degrees instead of radians.
    #[arg(long, global = true)]
    pub degrees: bool,
    /// Log per-point warnings to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct Grid {
    /// Lowest output power of the sweep [W].
    #[arg(long, default_value_t = -1000.0, allow_negative_numbers = true)]
    pub pmin: f64,
    /// Highest output power of the sweep [W].
    #[arg(long, default_value_t = 1000.0, allow_negative_numbers = true)]
    pub pmax: f64,
    /// Number of grid points, both ends included.
    #[arg(long, default_value_t = 41)]
    pub steps: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal control sweep over output power: sweep.csv and sweep_summary.json.
    Sweep(Grid),
    /// ZVS currents and pass/fail map: zvs.csv and zvs_summary.json.
    Zvs {
        #[command(flatten)]
        grid: Grid,
        /// Fit the ZVS thresholds on this sweep before evaluating the map.
        #[arg(long)]
        fit_thresholds: bool,
    },
    /// Envelope eigenvalues (eig_cv.csv, eig_cpl.csv) and zero-dynamics verdicts (hurwitz.json).
    Stability {
        /// Output powers [W].
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [300.0, 700.0, 1000.0])]
        powers: Vec<f64>,
        /// Only this load mode (both by default).
        #[arg(long)]
        mode: Option<LoadMode>,
    },
    /// Controllability, observability and relative degree: geometry.json.
    Geometry {
        /// Output power of the operating point [W].
        #[arg(long, default_value_t = 500.0, allow_negative_numbers = true)]
        power: f64,
        /// Switching angle of the representative state [rad].
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4, allow_negative_numbers = true)]
        theta: f64,
    },
    /// Open-loop switched simulation: waveform.csv and simulate_summary.json.
    Simulate {
        /// Output power whose optimal controls are applied [W].
        #[arg(long, default_value_t = 500.0, allow_negative_numbers = true)]
        power: f64,
        /// Load held at the operating point's current (cv) or power (cpl).
        #[arg(long, default_value = "cv")]
        mode: LoadMode,
        /// Switching periods to integrate.
        #[arg(long, default_value_t = 200)]
        cycles: usize,
        /// Integration steps per period (even, at least 200).
        #[arg(long, default_value_t = 1000)]
        steps_per_cycle: usize,
        /// Periods kept in waveform.csv, counted from the end.
        #[arg(long, default_value_t = 2)]
        record_cycles: usize,
    },
    /// Envelope model against switched simulation: validate.csv and validate.json.
    Validate {
        /// Output powers [W].
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true,
              default_values_t = [-1000.0, -500.0, -250.0, 0.0, 250.0, 500.0, 1000.0])]
        powers: Vec<f64>,
        /// Cycle budget per point.
        #[arg(long, default_value_t = 5000)]
        max_cycles: usize,
    },
    /// Fit C1, C2, r and the ZVS thresholds: calibration.json and calibrated.toml.
    Calibrate(Grid),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    env_logger::Builder::new()
        .filter_level(if cli.verbose { log::LevelFilter::Info } else { log::LevelFilter::Error })
        .init();
    match commands::run(&cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(failures) => {
            eprintln!("{failures} point(s) failed");
            ExitCode::from(EXIT_POINT_FAILURES)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
