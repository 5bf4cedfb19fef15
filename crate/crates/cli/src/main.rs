use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod manifest;
mod settings;

use settings::Settings;

/// Clutter scoring, cluttered-scenario generation and policy evaluation
/// for tabletop manipulation benchmarks.
#[derive(Debug, Parser)]
#[command(name = "clutterbench", version, allow_negative_numbers = true)]
struct Cli {
    /// TOML file with default settings; flags and environment win.
    #[arg(long, global = true, env = "CLUTTERBENCH_CONFIG")]
    config: Option<PathBuf>,
    /// Worker threads for batch work (default: all cores).
    #[arg(long, global = true, env = "CLUTTERBENCH_JOBS")]
    jobs: Option<usize>,
    #[command(flatten)]
    settings: Settings,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Four skills x {0,1,2,4,8,16} distractors x 9 arrangements.
    RealWorld,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score images (PPM/PNG) or scene files (.json) for clutter.
    Score {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Write scores.jsonl and a manifest here instead of stdout.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Render a scene's robot and top views to PPM.
    Render {
        scene: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// Also write each view's clutter map, scaled to its maximum.
        #[arg(long)]
        clutter_maps: bool,
    },
    /// Generate scored cluttered scenarios.
    Generate {
        /// Built-in base name or base-scenario JSON file; repeatable.
        /// Defaults to every built-in simulated base.
        #[arg(long)]
        base: Vec<String>,
        /// Accepted scenarios per base.
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Generate a fixed protocol instead of `--base`/`--count`.
        #[arg(long, value_enum, conflicts_with_all = ["base", "count"])]
        preset: Option<Preset>,
        /// Candidates tried per base before giving up.
        #[arg(long)]
        max_attempts: Option<u64>,
        /// Distractor catalog CSV replacing the built-in one.
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Bin scenarios by DvFC and sample uniformly per bin.
    Sample {
        scenarios: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Classify episodes and compute per-policy metrics.
    Eval {
        #[arg(long)]
        scenarios: PathBuf,
        #[arg(required = true)]
        logs: Vec<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Summary table, clutter curves, reach failures and agreement.
    Report {
        #[arg(long)]
        scenarios: PathBuf,
        #[arg(required = true)]
        logs: Vec<PathBuf>,
        /// Episodes on the scenes without distractors, for the sr_base column.
        #[arg(long)]
        base_logs: Vec<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// List built-in base scenarios, optionally exporting them as JSON.
    Bases {
        #[arg(long)]
        export: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, configuration or missing inputs (exit 2).
    Usage(String),
    /// Failure while doing the work (exit 1).
    Runtime(String),
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Runtime(format!("{}: {e}", path.display()))
    }
}

impl From<clutterbench::Error> for CliError {
    fn from(e: clutterbench::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

/// Inputs must exist before any work starts.
pub fn require_file(path: &Path) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{}: no such file", path.display())))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(p) => {
            require_file(p)?;
            Settings::from_file(p).map_err(CliError::Usage)?
        }
        None => Settings::default(),
    };
    let cfg = cli.settings.or(file).resolve().map_err(|problems| {
        CliError::Usage(format!(
            "invalid configuration:\n  {}",
            problems.join("\n  ")
        ))
    })?;
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(CliError::Usage("jobs: must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    match cli.command {
        Command::Score { inputs, out_dir } => commands::score(&cfg, &inputs, out_dir.as_deref()),
        Command::Render {
            scene,
            out_dir,
            clutter_maps,
        } => commands::render(&cfg, &scene, &out_dir, clutter_maps),
        Command::Generate {
            base,
            count,
            preset,
            max_attempts,
            catalog,
            out_dir,
        } => commands::generate(
            &cfg,
            &commands::GenerateOpts {
                bases: base,
                count,
                preset,
                max_attempts,
                catalog,
            },
            &out_dir,
        ),
        Command::Sample { scenarios, out_dir } => commands::sample(&cfg, &scenarios, &out_dir),
        Command::Eval {
            scenarios,
            logs,
            out_dir,
        } => commands::eval(&cfg, &scenarios, &logs, &out_dir),
        Command::Report {
            scenarios,
            logs,
            base_logs,
            out_dir,
        } => commands::report(&cfg, &scenarios, &logs, &base_logs, &out_dir),
        Command::Bases { export } => commands::bases(export.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
