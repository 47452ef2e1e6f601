use clap::{Parser, Subcommand};
use lzsm::harness::{parse_config, parse_sweep, run_compare, run_sweep, run_trace, Method};
use lzsm::{specfun, Error};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "lzsm", version, about = "Driven two-level crossings: numerics and closed-form comparisons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration and write the trajectory as CSV.
    Trace {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan one or two drive parameters and write the grid as CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        sweep: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare a closed-form result with numerics and write a JSON report.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        method: String,
        #[arg(long, default_value_t = 2e-2)]
        threshold: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the special functions against identities and quadrature.
    Selftest,
}

const EXIT_VALIDATION: u8 = 1;
const EXIT_NUMERIC: u8 = 2;
const EXIT_COMPARE_FAIL: u8 = 3;

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Write to `out`, or to the config's `output` key, or to stdout.
fn emit(text: &str, out: Option<&Path>, fallback: &str) -> Result<(), Error> {
    let target = out.map(Path::to_path_buf).or_else(|| (!fallback.is_empty()).then(|| PathBuf::from(fallback)));
    match target {
        Some(p) => std::fs::write(&p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Trace { config, out } => {
            let spec = parse_config(&read(&config)?)?;
            emit(&run_trace(&spec)?, out.as_deref(), &spec.output_path)?;
        }
        Command::Sweep { config, sweep, workers, out } => {
            let spec = parse_config(&read(&config)?)?;
            let sw = parse_sweep(&read(&sweep)?)?;
            emit(&run_sweep(&spec, &sw, workers)?, out.as_deref(), &spec.output_path)?;
        }
        Command::Compare { config, method, threshold, out } => {
            let spec = parse_config(&read(&config)?)?;
            let method: Method = method.parse()?;
            let report = run_compare(&spec, method, threshold)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            let mut json = report.to_json();
            json.push('\n');
            emit(&json, out.as_deref(), &spec.output_path)?;
            eprintln!(
                "{}: max_abs_dev = {:.3e}, rms_dev = {:.3e}, threshold = {:.3e}",
                if report.pass { "PASS" } else { "FAIL" },
                report.max_abs_dev,
                report.rms_dev,
                threshold
            );
            if !report.pass {
                return Ok(ExitCode::from(EXIT_COMPARE_FAIL));
            }
        }
        Command::Selftest => {
            let checks = specfun::selftest();
            println!("{:<40} {:>12} {:>12}  result", "check", "worst", "tolerance");
            for c in &checks {
                println!(
                    "{:<40} {:>12.3e} {:>12.1e}  {}",
                    c.name,
                    c.worst,
                    c.tolerance,
                    if c.passed() { "PASS" } else { "FAIL" }
                );
            }
            if !checks.iter().all(|c| c.passed()) {
                return Ok(ExitCode::from(EXIT_NUMERIC));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { EXIT_VALIDATION } else { EXIT_NUMERIC })
        }
    }
}
