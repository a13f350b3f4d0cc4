use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::error;
use lsq_cli::experiment::{run, sweep, RunOutput};
use lsq_cli::table::emit_plotdata;
use lsq_cli::{acceptance, CliError, ExperimentConfig, ResultTable};

#[derive(Parser)]
#[command(name = "lsq", version, about = "Log-Sobolev and hypercontractivity experiments on small quantum semigroups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its table.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Vary one model parameter; one summary row per value.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        param: String,
        /// Comma-separated values; may be empty.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert a CSV table into whitespace-separated plot data.
    Plotdata {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        x: String,
        /// Comma-separated y columns.
        #[arg(long)]
        y: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance suite.
    Selftest,
}

fn parse_values(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| v.parse::<f64>().map_err(|_| CliError::Config(format!("bad value `{v}` in --values"))))
        .collect()
}

fn meta_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn write_output(output: &RunOutput, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            output.table.write_csv(BufWriter::new(File::create(path)?))?;
            let meta = serde_json::to_string_pretty(&output.table.metadata_json()).expect("json");
            std::fs::write(meta_path(path), meta + "\n")?;
        }
        None => output.table.write_csv(io::stdout().lock())?,
    }
    Ok(())
}

fn load(config: &Path, seed: Option<u64>) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::load(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn finish(output: RunOutput, out: Option<PathBuf>) -> Result<(), CliError> {
    write_output(&output, out.as_deref())?;
    if output.violations.is_empty() {
        Ok(())
    } else {
        Err(CliError::Violation(output.violations.join("; ")))
    }
}

fn execute(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Run { config, seed, out } => {
            let cfg = load(&config, seed)?;
            let out = out.or_else(|| cfg.output.as_ref().map(|p| cfg.resolve(p)));
            finish(run(&cfg)?, out)
        }
        Command::Sweep { config, param, values, seed, out } => {
            let cfg = load(&config, seed)?;
            let values = parse_values(&values)?;
            let out = out.or_else(|| cfg.output.as_ref().map(|p| cfg.resolve(p)));
            finish(sweep(&cfg, &param, &values)?, out)
        }
        Command::Plotdata { input, x, y, out } => {
            let table = ResultTable::read_csv(File::open(&input)?)?;
            let ys: Vec<&str> = y.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            let mut buf = Vec::new();
            emit_plotdata(&table, &x, &ys, &mut buf)?;
            match out {
                Some(path) => std::fs::write(path, buf)?,
                None => io::stdout().lock().write_all(&buf)?,
            }
            Ok(())
        }
        Command::Selftest => {
            let results = acceptance::run_all();
            for r in &results {
                println!("{r}");
            }
            let failed: Vec<String> = results.iter().filter(|r| !r.passed).map(|r| r.id.to_string()).collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Violation(format!("criteria {} failed", failed.join(", "))))
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Ok(n) = std::env::var("LSQ_THREADS") {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    error!("could not size thread pool: {e}");
                }
            }
            _ => error!("ignoring LSQ_THREADS={n}: expected a positive integer"),
        }
    }
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lsq: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
