use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use modadapt::config::{load_config, ConfigError, Overrides, RunConfig};
use modadapt::drivers::{RunTrace, TerminationStatus};
use modadapt::problem::catalog;
use modadapt::report::{export_trace, run_all, summarize, ExportFormat};

const VALIDATION: u8 = 1;
const RUNTIME: u8 = 2;

#[derive(Parser)]
#[command(name = "modadapt", version, about = "Modifier adaptation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configuration in a file and export the traces.
    Run {
        config: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Run several configuration files concurrently and print a comparison table.
    Compare {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        #[command(flatten)]
        flags: Flags,
    },
    /// List the built-in problems.
    ListProblems,
    /// Validate a configuration file without running it.
    Check {
        config: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Args)]
struct Flags {
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_parser = parse_format)]
    format: Option<ExportFormat>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    tol: Option<f64>,
}

fn parse_format(s: &str) -> Result<ExportFormat, String> {
    s.parse().map_err(|e: modadapt::Error| e.to_string())
}

impl Flags {
    fn overrides(&self, output: bool) -> Overrides {
        Overrides {
            output: if output { self.output.clone() } else { None },
            format: self.format,
            seed: self.seed,
            max_iterations: self.max_iter,
            tolerance: self.tol,
        }
    }
}

/// Loads, applies CLI overrides and re-validates.
fn load(path: &Path, overrides: &Overrides) -> Result<Vec<RunConfig>, u8> {
    let mut configs = load_config(path).map_err(|e| {
        match e {
            ConfigError::Io { .. } => eprintln!("error: {e}"),
            _ => eprintln!("error: {}: {e}", path.display()),
        }
        VALIDATION
    })?;
    for (i, c) in configs.iter_mut().enumerate() {
        c.apply(overrides);
        c.validate().map_err(|e| {
            eprintln!("error: {}: entry {i}: {e}", path.display());
            VALIDATION
        })?;
    }
    Ok(configs)
}

/// `out.csv` becomes `out-2.csv` for the third entry of a batch.
fn indexed_path(path: &Path, index: usize, count: usize) -> PathBuf {
    if count <= 1 {
        return path.to_path_buf();
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("trace");
    let name = match path.extension().and_then(|s| s.to_str()) {
        Some(ext) => format!("{stem}-{index}.{ext}"),
        None => format!("{stem}-{index}"),
    };
    path.with_file_name(name)
}

fn execute(configs: &[RunConfig]) -> Result<Vec<RunTrace>, u8> {
    let mut traces = Vec::with_capacity(configs.len());
    let mut code = 0;
    let count = configs.len();
    for (i, (config, result)) in configs.iter().zip(run_all(configs)).enumerate() {
        let trace = match result {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {} / {}: {e}", config.problem, config.algorithm);
                code = RUNTIME;
                continue;
            }
        };
        for note in &trace.notes {
            eprintln!("note: {} / {}: {note}", trace.problem, trace.algorithm);
        }
        if trace.termination == TerminationStatus::OracleFailure {
            code = RUNTIME;
        }
        if let Some(out) = &config.output {
            let path = indexed_path(&out.path, i, count);
            if let Err(e) = export_trace(&trace, out.format, &path) {
                eprintln!("error: {e}");
                code = RUNTIME;
            }
        }
        traces.push(trace);
    }
    if code == 0 {
        Ok(traces)
    } else {
        if !traces.is_empty() {
            print!("{}", summarize(&traces).to_text());
        }
        Err(code)
    }
}

fn run(path: &Path, flags: &Flags) -> Result<(), u8> {
    let configs = load(path, &flags.overrides(true))?;
    let traces = execute(&configs)?;
    print!("{}", summarize(&traces).to_text());
    Ok(())
}

fn compare(paths: &[PathBuf], flags: &Flags) -> Result<(), u8> {
    // --output names the summary file here, not per-run traces
    let overrides = flags.overrides(false);
    let mut configs = Vec::new();
    for path in paths {
        configs.extend(load(path, &overrides)?);
    }
    let traces = execute(&configs)?;
    let summary = summarize(&traces);
    print!("{}", summary.to_text());
    if let Some(out) = &flags.output {
        let text = match flags.format.unwrap_or_default() {
            ExportFormat::Csv => summary.to_csv(),
            ExportFormat::Json => serde_json::to_string_pretty(&summary).map_err(|e| {
                eprintln!("error: {e}");
                RUNTIME
            })?,
        };
        std::fs::write(out, text).map_err(|e| {
            eprintln!("error: {}: {e}", out.display());
            RUNTIME
        })?;
    }
    Ok(())
}

fn list_problems() {
    println!("{:<4} {:<18} {:>3}  {:<12} description", "id", "alias", "dim", "start");
    for e in catalog() {
        let start = format!("{:?}", e.start);
        println!("{:<4} {:<18} {:>3}  {:<12} {}", e.id, e.alias, e.dim, start, e.description);
    }
}

fn check(path: &Path, flags: &Flags) -> Result<(), u8> {
    let configs = load(path, &flags.overrides(true))?;
    println!("{}: {} valid configuration(s)", path.display(), configs.len());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { VALIDATION } else { 0 });
        }
    };
    let outcome = match &cli.command {
        Command::Run { config, flags } => run(config, flags),
        Command::Compare { configs, flags } => compare(configs, flags),
        Command::ListProblems => {
            list_problems();
            Ok(())
        }
        Command::Check { config, flags } => check(config, flags),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}
