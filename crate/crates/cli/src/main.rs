use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use entroflux::{emit_csv, emit_svg, parse_config, presets, run_sweep, Outcome, RunOptions, Scenario};

const EXIT_CONFIG: u8 = 1;
const EXIT_UNSTABLE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
/// Largest tolerated gap between the Lyapunov and time-integrated states.
const ORACLE_TOL: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "entroflux", version, about = "Entropy production sweeps for coupled oscillators with coherent feedback")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep from a config file or a built-in preset.
    Run {
        /// Config file path or preset name (fig1 ... fig7).
        target: String,
        /// Write the table here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Also plot the numeric output columns.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Exit with status 2 if any grid point is unstable.
        #[arg(long)]
        strict: bool,
        /// Re-check every point by integrating the covariance ODE.
        #[arg(long)]
        oracle: bool,
        /// Worker threads (default: ENTROFLUX_THREADS, else all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Print a preset's config text, or list presets.
    Presets { name: Option<String> },
}

fn load(target: &str) -> Result<Scenario, String> {
    let path = Path::new(target);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{target}: {e}"))?;
        return parse_config(&text).map_err(|e| format!("{target}: {e}"));
    }
    entroflux::preset(target).ok_or_else(|| {
        format!(
            "{target}: no such file or preset (presets: {})",
            presets::NAMES.join(", ")
        )
    })
}

fn create(path: &Path) -> Result<BufWriter<File>, String> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| format!("{}: {e}", path.display()))
}

fn run(target: &str, csv: Option<PathBuf>, svg: Option<PathBuf>, strict: bool, oracle: bool, threads: Option<usize>) -> u8 {
    let scenario = match load(target) {
        Ok(s) => s,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_CONFIG;
        }
    };
    let rows = run_sweep(&scenario, &RunOptions { threads, oracle });

    let written = match &csv {
        Some(path) => create(path).and_then(|f| emit_csv(&scenario, &rows, f).map_err(|e| e.to_string())),
        None => emit_csv(&scenario, &rows, io::stdout().lock()).map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return EXIT_CONFIG;
    }
    if let Some(path) = &svg {
        let columns: Vec<_> = scenario.outputs.iter().copied().filter(|o| o.is_numeric()).collect();
        let plotted = create(path).and_then(|mut f| {
            emit_svg(&rows, scenario.sweep.var.name(), &columns, &mut f).map_err(|e| e.to_string())?;
            f.flush().map_err(|e| e.to_string())
        });
        if let Err(msg) = plotted {
            eprintln!("error: {}: {msg}", path.display());
            return EXIT_NUMERICAL;
        }
    }

    let mut unstable = 0;
    let mut failed = 0;
    let mut worst_gap: f64 = 0.0;
    for row in &rows {
        match &row.outcome {
            Outcome::Ok { oracle_gap, .. } => worst_gap = worst_gap.max(oracle_gap.unwrap_or(0.0)),
            Outcome::Unstable => unstable += 1,
            Outcome::Failed { error, .. } => {
                failed += 1;
                eprintln!("{} = {}: {error}", scenario.sweep.var, row.x);
            }
        }
    }
    eprintln!("{} points, {unstable} unstable, {failed} failed", rows.len());
    if oracle {
        eprintln!("max |V_ode - V| = {worst_gap:.3e}");
    }
    if failed > 0 || worst_gap > ORACLE_TOL {
        EXIT_NUMERICAL
    } else if strict && unstable > 0 {
        EXIT_UNSTABLE
    } else {
        0
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { target, csv, svg, strict, oracle, threads } => run(&target, csv, svg, strict, oracle, threads),
        Command::Presets { name: None } => {
            println!("{}", presets::NAMES.join("\n"));
            0
        }
        Command::Presets { name: Some(name) } => match presets::text(&name) {
            Some(text) => {
                print!("{text}");
                0
            }
            None => {
                eprintln!("error: unknown preset `{name}`");
                EXIT_CONFIG
            }
        },
    };
    ExitCode::from(code)
}
