use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use endim::cli::{
    exit_code, preset, presets, run, ExperimentConfig, Format, RunOptions, Status, Task,
};
use endim::par::{with_threads, Exec};
use endim::Error;

#[derive(Parser)]
#[command(
    name = "endim",
    version,
    about = "Relative entropy dimensions of subshifts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Use a built-in experiment instead of a config file.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Report destination (standard output when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Overrides the node and search budgets of the config.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Worker threads; 1 runs sequentially.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    Complexity,
    Dimension,
    SubsetDim,
    Genset,
    Construct,
    Independence,
    TupleDim,
    Joining,
    Folner,
    /// Run the task stored in the config.
    Run,
    /// List the built-in experiments as JSON.
    Presets,
}

fn task_of(c: &Command) -> Option<Task> {
    Some(match c {
        Command::Complexity => Task::Complexity,
        Command::Dimension => Task::Dimension,
        Command::SubsetDim => Task::SubsetDim,
        Command::Genset => Task::Genset,
        Command::Construct => Task::Construct,
        Command::Independence => Task::Independence,
        Command::TupleDim => Task::TupleDim,
        Command::Joining => Task::Joining,
        Command::Folner => Task::Folner,
        Command::Run | Command::Presets => return None,
    })
}

fn load(cli: &Cli) -> Result<ExperimentConfig, Error> {
    match (&cli.config, &cli.preset) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::config("/", format!("{}: {e}", path.display())))?;
            ExperimentConfig::parse(&text)
        }
        (None, Some(name)) => {
            preset(name).ok_or_else(|| Error::config("/", format!("unknown preset {name:?}")))
        }
        _ => Err(Error::config(
            "/",
            "give exactly one of --config and --preset",
        )),
    }
}

fn execute(cli: &Cli) -> Result<Status, Error> {
    if let Command::Presets = cli.command {
        let all: serde_json::Map<String, serde_json::Value> = presets()
            .into_iter()
            .map(|(n, c)| {
                (
                    n.to_string(),
                    serde_json::to_value(c).expect("preset serialises"),
                )
            })
            .collect();
        println!("{}", serde_json::to_string_pretty(&all).expect("json"));
        return Ok(Status::Ok);
    }
    let config = load(cli)?;
    let threads = cli.threads.unwrap_or(0);
    let opts = RunOptions {
        budget: cli.budget,
        exec: if threads == 1 {
            Exec::Sequential
        } else {
            Exec::Parallel
        },
    };
    let start = Instant::now();
    let report = with_threads(threads, || run(&config, task_of(&cli.command), &opts))?;
    let format = cli.format.or(config.output.format).unwrap_or_default();
    let out = cli.out.clone().or_else(|| config.output.path.clone());
    report.emit(format, out.as_deref())?;
    eprintln!(
        "endim: {} finished in {:.3} s ({:?})",
        report.task,
        start.elapsed().as_secs_f64(),
        report.status
    );
    for w in &report.warnings {
        eprintln!("endim: warning: {w}");
    }
    Ok(report.status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Degraded) => ExitCode::from(3),
        Err(e) => {
            eprintln!("endim: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
