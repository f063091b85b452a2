//! Configuration-driven front end for `warpgeo`: one task per invocation,
//! CSV/JSON artifacts and a text summary in an output directory.

pub mod config;
pub mod error;
pub mod output;
pub mod tasks;

use std::path::PathBuf;

use clap::Parser;
use warpgeo::manifold::ChartRegistry;

pub use config::TaskConfig;
pub use error::CliError;
pub use output::Artifacts;
pub use tasks::{Context, Task, TaskRegistry};

/// Command-line flags.
#[derive(Debug, Clone, Parser)]
#[command(
    name = "warpgeo",
    version,
    about = "Geodesics of warped products g1 - k g2"
)]
pub struct Options {
    /// Task configuration (TOML).
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,

    /// Output directory; overrides `out` in the config.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Integrator steps; overrides `integrator.steps`.
    #[arg(long, value_name = "N")]
    pub steps: Option<usize>,

    /// Do not print the summary.
    #[arg(long)]
    pub quiet: bool,
}

/// Outcome of a successful run.
#[derive(Debug)]
pub struct RunOutput {
    pub out_dir: PathBuf,
    pub files: Vec<String>,
    pub summary: String,
}

const DEFAULT_OUT: &str = "warpgeo-out";

fn out_dir(opts: &Options, cfg: &TaskConfig) -> PathBuf {
    opts.out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

/// Loads the config, runs its task and writes the artifacts.
///
/// Errors carry the output directory when one is known.
pub fn run(
    opts: &Options,
    tasks: &TaskRegistry,
    charts: &ChartRegistry,
) -> Result<RunOutput, (CliError, Option<PathBuf>)> {
    let cfg = TaskConfig::load(&opts.config).map_err(|e| (e, opts.out.clone()))?;
    let dir = out_dir(opts, &cfg);
    execute(opts, &cfg, tasks, charts)
        .and_then(|art| {
            let files = art.write_to(&dir)?;
            Ok(RunOutput {
                out_dir: dir.clone(),
                files,
                summary: art.summary_text(),
            })
        })
        .map_err(|e| (e, Some(dir)))
}

fn execute(
    opts: &Options,
    cfg: &TaskConfig,
    tasks: &TaskRegistry,
    charts: &ChartRegistry,
) -> Result<Artifacts, CliError> {
    let mut integrator = cfg.integrator;
    if let Some(n) = opts.steps {
        integrator.steps = n;
    }
    integrator.validate()?;
    cfg.connect.validate()?;
    let (kind, params) = cfg.task_kind()?;
    let task = tasks.get(&kind)?;
    let ctx = Context {
        problem: cfg.problem(charts)?,
        integrator,
        connect: cfg.connect,
    };
    task.run(&ctx, params)
}

/// Runs the CLI and returns the process exit code.
///
/// On failure the error payload goes to stderr and, when the output
/// directory can be created, to `error.json` inside it.
pub fn main_with(opts: &Options) -> i32 {
    let tasks = TaskRegistry::with_builtins();
    let charts = ChartRegistry::with_builtins();
    match run(opts, &tasks, &charts) {
        Ok(done) => {
            if !opts.quiet {
                print!("{}", done.summary);
                println!(
                    "wrote {} files to {}",
                    done.files.len(),
                    done.out_dir.display()
                );
            }
            0
        }
        Err((err, dir)) => {
            let payload = serde_json::to_string_pretty(&err.payload()).unwrap_or_default();
            eprintln!("error: {err}");
            eprintln!("{payload}");
            if let Some(dir) = dir.filter(|d| std::fs::create_dir_all(d).is_ok()) {
                let _ = std::fs::write(dir.join("error.json"), payload + "\n");
            }
            err.exit_code()
        }
    }
}
