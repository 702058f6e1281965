use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cutstokes3f::assembly::write_coordinate;
use cutstokes3f::geometry::write_svg;
use cutstokes3f::harness::{run, thread_cap, ExperimentConfig};
use cutstokes3f::Error;

#[derive(Parser)]
#[command(
    name = "cutstokes3f",
    version,
    about = "Cut finite element solver for three-field Stokes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        /// CSV destination; overrides `output.path`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the last assembled matrix as `i j value` triplets.
        #[arg(long)]
        export_matrix: Option<PathBuf>,
        /// Write the background mesh and cut geometry of the last run.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config { .. } | Error::InvalidInput(_) => 2,
        Error::Io(_) => 1,
        _ => 3,
    }
}

fn execute(
    config: &Path,
    out: Option<PathBuf>,
    matrix: Option<PathBuf>,
    svg: Option<PathBuf>,
) -> Result<(), Error> {
    let threads = thread_cap()?;
    let cfg = ExperimentConfig::load(config)?;
    let study = run(&cfg, threads)?;
    match out.or(cfg.output.clone()) {
        Some(path) => std::fs::write(&path, &study.csv)?,
        None => print!("{}", study.csv),
    }
    if matrix.is_some() || svg.is_some() {
        let (disc, system) = study
            .last
            .as_ref()
            .ok_or_else(|| Error::Internal("study produced no system".into()))?;
        if let Some(path) = matrix {
            write_coordinate(&path, &system.matrix())?;
        }
        if let Some(path) = svg {
            write_svg(&path, &disc.mesh, &disc.cut)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let Command::Run {
        config,
        out,
        export_matrix,
        svg,
    } = cli.command;
    match execute(&config, out, export_matrix, svg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
