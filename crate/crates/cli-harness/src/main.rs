use clap::{Parser, Subcommand};
use ncg_index::{configure_threads, emit_report, load_config, run, Format};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ncg-index", version, about = "Index pipelines and identity suites for spectral triples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the tasks of a JSON job file.
    Run {
        config: PathBuf,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// csv or jsonl.
        #[arg(long)]
        format: Option<String>,
        /// Lattice window applied to every task.
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        verbose: bool,
    },
}

fn main() -> ExitCode {
    let Command::Run { config, out, format, window, verbose } = Cli::parse().command;
    configure_threads();
    let text = match std::fs::read_to_string(&config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", config.display());
            return ExitCode::from(2);
        }
    };
    let mut job = match load_config(&text) {
        Ok(j) => j,
        Err(e) => {
            eprintln!("{}: {e}", config.display());
            return ExitCode::from(2);
        }
    };
    if let Some(w) = window {
        job.set_window(w);
    }
    let format = match format.as_deref().map(Format::parse) {
        Some(Some(f)) => f,
        Some(None) => {
            eprintln!("unknown format {:?}", format.unwrap_or_default());
            return ExitCode::from(2);
        }
        None => job.format,
    };
    let (rows, code) = run(&job, verbose);
    let text = emit_report(&rows, format);
    match out.or_else(|| job.output_path.clone().map(PathBuf::from)) {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, text) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(code as u8)
}
