use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sidlab_cli::{parse_config, run_command, write_artifacts, Command, RunError};

#[derive(Parser)]
#[command(
    name = "sidlab",
    version,
    about = "Experiments on self-interacting diffusions on the torus"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Spectral summary of the interaction kernel
    KernelInfo(Common),
    /// Enumerate and classify fixed points
    Analyze(Common),
    /// Integrate the deterministic flow
    Flow(Common),
    /// Simulate one trajectory
    Simulate(Common),
    /// Classify the terminal states of many trajectories
    Montecarlo(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration file
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: output.directory, else "out")
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suppress progress lines
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (command, args) = match cli.command {
        Cmd::KernelInfo(a) => (Command::KernelInfo, a),
        Cmd::Analyze(a) => (Command::Analyze, a),
        Cmd::Flow(a) => (Command::Flow, a),
        Cmd::Simulate(a) => (Command::Simulate, a),
        Cmd::Montecarlo(a) => (Command::MonteCarlo, a),
    };
    match execute(command, &args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(command: Command, args: &Common) -> Result<(), RunError> {
    let text = fs::read_to_string(&args.config).map_err(|e| {
        RunError::Config(sidlab_cli::ConfigErrors(vec![sidlab_cli::ConfigError {
            path: String::new(),
            message: format!("cannot read {}: {e}", args.config.display()),
        }]))
    })?;
    let config = parse_config(&text)?;
    let quiet = args.quiet;
    let mut progress = |line: &str| {
        if !quiet {
            eprintln!("[{}] {line}", command.name());
        }
    };
    let output = run_command(command, &config, &mut progress)?;
    let dir = args
        .out
        .clone()
        .or_else(|| {
            config
                .output
                .as_ref()
                .and_then(|o| o.directory.clone())
                .map(PathBuf::from)
        })
        .unwrap_or_else(|| PathBuf::from("out"));
    let written = write_artifacts(&dir, &output.artifacts)
        .map_err(|e| RunError::Runtime(format!("writing to {}: {e}", dir.display())))?;
    for line in &output.summary {
        println!("{line}");
    }
    for path in written {
        progress(&format!("wrote {}", path.display()));
    }
    Ok(())
}
