use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lbrc::commands::{self, EstimateOptions, EstimatorChoice, GridChoice, InfluenceOptions, SimulateOptions};
use lbrc::config::{parse_censor_rate, FamilyKind, ModelSpec};
use lbrc::io::CsvRecordSpec;
use lbrc::CliError;

/// Survival estimation for length-biased, right-censored data.
///
/// Exit codes: 0 success, 1 input or usage error, 2 computation error.
#[derive(Parser)]
#[command(name = "lbrc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimatorArg {
    /// F̃ₙ, F̄ₙ, S̃_A and Λ̃ from the pooled truncation/residual sample
    Pooled,
    /// The classical truncation product-limit estimator
    Tjw,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Exponential,
    Weibull,
}

#[derive(clap::Args)]
struct InputArgs {
    /// CSV with a header naming a, delta and one of v (residual) or y (total)
    input: PathBuf,
    /// Accept rows with a = 0 (data without truncation)
    #[arg(long)]
    allow_zero_truncation: bool,
}

impl InputArgs {
    fn spec(&self) -> CsvRecordSpec {
        CsvRecordSpec { allow_zero_truncation: self.allow_zero_truncation, ..Default::default() }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fit the distribution estimators and write one CSV per curve
    Estimate {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value = "both")]
        estimator: EstimatorArg,
        /// `jumps`, or `n:<count>` to add equispaced points on (0, max y]
        #[arg(long, default_value = "jumps", value_parser = GridChoice::parse)]
        grid: GridChoice,
        /// Output directory
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Draw a seeded LBRC sample and write it as a,v,delta CSV
    Simulate {
        #[arg(long, value_enum, default_value = "exponential")]
        family: FamilyArg,
        /// Exponential rate
        #[arg(long, default_value_t = 1.0)]
        rate: f64,
        /// Weibull shape, in [0.5, 50]
        #[arg(long, default_value_t = 1.0)]
        shape: f64,
        /// Weibull scale
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Rate of the exponential residual censoring time, or `none`
        #[arg(long, default_value = "0.5")]
        censor_rate: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output file; standard output when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a Monte-Carlo rate experiment described by a key=value config
    RateExperiment {
        config: PathBuf,
        /// Directory for rate_report.csv and rate_summary.txt
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; 0 uses every core. Does not change the output.
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Plug-in standard errors, confidence intervals and LIL scale for F̃ₙ
    Influence {
        #[command(flatten)]
        input: InputArgs,
        /// Two-sided confidence level in (0, 1)
        #[arg(long, default_value_t = 0.95)]
        level: f64,
        /// `jumps` (event times) or `n:<count>` equispaced points on (0, max y]
        #[arg(long, default_value = "n:25", value_parser = GridChoice::parse)]
        grid: GridChoice,
        /// Output file; standard output when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Estimate { input, estimator, grid, out } => {
            let estimator = match estimator {
                EstimatorArg::Pooled => EstimatorChoice::Pooled,
                EstimatorArg::Tjw => EstimatorChoice::Tjw,
                EstimatorArg::Both => EstimatorChoice::Both,
            };
            let opts = EstimateOptions { estimator, grid, out, csv: input.spec() };
            for p in commands::estimate(&input.input, &opts)? {
                println!("{}", p.display());
            }
        }
        Command::Simulate { family, rate, shape, scale, censor_rate, n, seed, out } => {
            let censor_rate = parse_censor_rate(&censor_rate)
                .ok_or_else(|| CliError::input(format!("--censor-rate: expected a rate or none, got {censor_rate:?}")))?;
            let family = match family {
                FamilyArg::Exponential => FamilyKind::Exponential,
                FamilyArg::Weibull => FamilyKind::Weibull,
            };
            let model = ModelSpec { family, rate, shape, scale, censor_rate };
            commands::simulate(&SimulateOptions { model, n, seed, out })?;
        }
        Command::RateExperiment { config, out, threads } => {
            let r = commands::rate_experiment(&config, out.as_deref(), threads)?;
            print!("{}", r.summary);
        }
        Command::Influence { input, level, grid, out } => {
            let opts = InfluenceOptions { level, grid, csv: input.spec(), out };
            commands::influence(&input.input, &opts)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
