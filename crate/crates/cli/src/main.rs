//! Command-line front end: simulate chains, fit and invert the localized
//! monotone estimator, and run Monte Carlo experiments from config files.
//!
//! Exit codes: 0 success, 2 usage or validation error, 3 empty window,
//! 4 experiment acceptance failure (reports are still written).

use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use monocoint::chains::{write_path_csv, ChainSpec};
use monocoint::estimator::{EstimatorError, LocalizedFit, TimeSeriesSample};
use monocoint::experiments::{
    parse_config_str, run_experiment, write_report, OutputFormat, ReportFormat,
};
use monocoint::Window;

const EXIT_USAGE: u8 = 2;
const EXIT_EMPTY_WINDOW: u8 = 3;
const EXIT_ACCEPTANCE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "monocoint",
    version,
    about = "Localized monotone least-squares estimation for Markov-driven time series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a chain path and write it as single-column CSV.
    Simulate {
        /// Chain model: rw | ar1 | lazy.
        #[arg(long)]
        chain: String,
        /// Comma-separated model parameters, e.g. "rho=0.5,sd=1.0".
        /// Keys: sd, rho, hold, l.
        #[arg(long)]
        params: Option<String>,
        /// Path length (the file holds n + 1 states).
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Output CSV file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the monotone estimator to x,z data restricted to a window.
    Fit {
        /// Input CSV with header `x,z`.
        #[arg(long)]
        data: PathBuf,
        /// Window center.
        #[arg(long)]
        x0: f64,
        /// Window half-width.
        #[arg(long)]
        delta: f64,
        /// Evaluate the fit at this point and print the value.
        #[arg(long)]
        query: Option<f64>,
        /// Write the fitted step function as CSV (`knot,value`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the localized ECDF as CSV (`knot,height`).
        #[arg(long)]
        ecdf_out: Option<PathBuf>,
    },
    /// Invert the fitted estimator at a level and print value and status.
    Invert {
        /// Input CSV with header `x,z`.
        #[arg(long)]
        data: PathBuf,
        /// Window center.
        #[arg(long)]
        x0: f64,
        /// Window half-width.
        #[arg(long)]
        delta: f64,
        /// Level to invert at.
        #[arg(long)]
        level: f64,
    },
    /// Run the experiments named in a config file and write reports.
    Experiment {
        /// Flat key-value config file.
        #[arg(long)]
        config: PathBuf,
        /// Directory for report files (created if missing).
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Simulate {
            chain,
            params,
            n,
            seed,
            out,
        } => {
            let spec = parse_chain(&chain, params.as_deref())?;
            let path = spec.simulate(n, seed);
            let file = File::create(&out)
                .map_err(|e| Failure::usage(format!("{}: {e}", out.display())))?;
            write_path_csv(&path, BufWriter::new(file))
                .map_err(|e| Failure::usage(format!("{}: {e}", out.display())))?;
            Ok(0)
        }
        Command::Fit {
            data,
            x0,
            delta,
            query,
            out,
            ecdf_out,
        } => {
            let fit = load_and_fit(&data, x0, delta)?;
            if let Some(q) = query {
                let value = fit.value_at(q).map_err(|e| match e {
                    EstimatorError::QueryOutsideWindow { .. } => {
                        Failure::usage(format!("query outside window: {e}"))
                    }
                    other => Failure::usage(other.to_string()),
                })?;
                println!("{value:?}");
            }
            if let Some(path) = out {
                let file = File::create(&path)
                    .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
                fit.write_fit_csv(BufWriter::new(file))
                    .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            }
            if let Some(path) = ecdf_out {
                let file = File::create(&path)
                    .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
                fit.ecdf()
                    .write_csv(BufWriter::new(file))
                    .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            }
            Ok(0)
        }
        Command::Invert {
            data,
            x0,
            delta,
            level,
        } => {
            let fit = load_and_fit(&data, x0, delta)?;
            let result = fit.inverse(level);
            println!("{:?} {}", result.value, result.status);
            Ok(0)
        }
        Command::Experiment { config, out_dir } => {
            let text = fs::read_to_string(&config)
                .map_err(|e| Failure::usage(format!("{}: {e}", config.display())))?;
            let file = parse_config_str(&text).map_err(|e| Failure::usage(e.to_string()))?;
            fs::create_dir_all(&out_dir)
                .map_err(|e| Failure::usage(format!("{}: {e}", out_dir.display())))?;
            let mut all_pass = true;
            for kind in &file.experiments {
                let report = run_experiment(*kind, &file.scenario)
                    .map_err(|e| Failure::usage(e.to_string()))?;
                all_pass &= report.summary.pass;
                let stem = format!("{}_{}", file.out_stem, kind.as_str());
                let write = |format, ext: &str| {
                    let path = out_dir.join(format!("{stem}.{ext}"));
                    write_report(&report, &path, format)
                        .map_err(|e| Failure::usage(e.to_string()))
                };
                match file.format {
                    OutputFormat::Csv => write(ReportFormat::Csv, "csv")?,
                    OutputFormat::Json => write(ReportFormat::Json, "json")?,
                    OutputFormat::Both => {
                        write(ReportFormat::Csv, "csv")?;
                        write(ReportFormat::Json, "json")?;
                    }
                }
                println!(
                    "{}: {}",
                    kind.as_str(),
                    if report.summary.pass { "pass" } else { "FAIL" }
                );
            }
            Ok(if all_pass { 0 } else { EXIT_ACCEPTANCE })
        }
    }
}

fn load_and_fit(data: &PathBuf, x0: f64, delta: f64) -> Result<LocalizedFit<f64>, Failure> {
    let file =
        File::open(data).map_err(|e| Failure::usage(format!("{}: {e}", data.display())))?;
    let sample = TimeSeriesSample::read_csv(BufReader::new(file))
        .map_err(|e| Failure::usage(e.to_string()))?;
    let window = Window::new(x0, delta).map_err(|e| Failure::usage(e.to_string()))?;
    LocalizedFit::fit(&sample, &window).map_err(|e| match e {
        EstimatorError::EmptyWindow => Failure {
            code: EXIT_EMPTY_WINDOW,
            message: "no observations in window".into(),
        },
        other => Failure::usage(other.to_string()),
    })
}

fn parse_chain(chain: &str, params: Option<&str>) -> Result<ChainSpec, Failure> {
    let mut sd = 1.0;
    let mut rho = 0.5;
    let mut hold = 0.5;
    let mut l = 1.0;
    if let Some(params) = params {
        for pair in params.split(',') {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| Failure::usage(format!("bad parameter '{pair}'")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|e| Failure::usage(format!("parameter '{pair}': {e}")))?;
            match key.trim() {
                "sd" => sd = value,
                "rho" => rho = value,
                "hold" => hold = value,
                "l" => l = value,
                other => return Err(Failure::usage(format!("unknown parameter '{other}'"))),
            }
        }
    }
    let spec = match chain {
        "rw" => ChainSpec::gaussian_random_walk(sd),
        "ar1" => ChainSpec::ar1(rho, sd),
        "lazy" => ChainSpec::lazy_srw(hold),
        other => return Err(Failure::usage(format!("unknown chain '{other}'"))),
    }
    .and_then(|s| s.with_slowly_varying(l));
    spec.map_err(|e| Failure::usage(e.to_string()))
}
