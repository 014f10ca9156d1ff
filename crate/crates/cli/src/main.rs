use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use orbitkit_cli::{cmd_equiv, cmd_groupoid, cmd_paths, cmd_recognize, cmd_validate, Mode, Options, Report, EXIT_USAGE};

#[derive(Parser)]
#[command(name = "orbitkit", version, about = "Checks partial dynamical systems, groupoids and orbit equivalences")]
struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Word length and |k| bound for truncated tables.
    #[arg(long, global = true, default_value_t = orbitkit_cli::DEFAULT_BOUND)]
    bound: usize,
    /// Prefix and cycle length of sample boundary paths.
    #[arg(long, global = true, default_value_t = orbitkit_cli::DEFAULT_DEPTH)]
    depth: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate every declaration in the files.
    Validate { files: Vec<PathBuf> },
    /// Build groupoids and report their sizes.
    Groupoid {
        /// Write the groupoids in DOT format to this file.
        #[arg(long)]
        dot: Option<PathBuf>,
        files: Vec<PathBuf>,
    },
    /// Compare the first system or graph of two files.
    Equiv {
        #[arg(long, default_value = "iso")]
        mode: Mode,
        a: PathBuf,
        b: PathBuf,
    },
    /// Recognize groupoids with a partition as transformation groupoids.
    Recognize { files: Vec<PathBuf> },
    /// List boundary paths with their stabilisers.
    Paths { files: Vec<PathBuf> },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            return ExitCode::from(code as u8);
        }
    };
    let opts = Options { bound: cli.bound, depth: cli.depth };
    let result: Result<Report, _> = match &cli.command {
        Command::Validate { files } => cmd_validate(files, opts),
        Command::Groupoid { dot, files } => cmd_groupoid(files, dot.as_deref(), opts),
        Command::Equiv { mode, a, b } => cmd_equiv(a, b, *mode, opts),
        Command::Recognize { files } => cmd_recognize(files),
        Command::Paths { files } => cmd_paths(files, opts),
    };
    match result {
        Ok(report) => {
            let text = if cli.json {
                serde_json::to_string_pretty(&report.to_json()).expect("json values serialize") + "\n"
            } else {
                report.render()
            };
            let _ = std::io::stdout().write_all(text.as_bytes());
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            if cli.json {
                println!("{}", serde_json::json!({ "error": e.to_string(), "status": "usage" }));
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
