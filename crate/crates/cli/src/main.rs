use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use paravaractor_cli::{execute, thread_count, write_output, CliError, Command, ToolConfig};

/// Quantum-paraelectric varactor parametric amplifier design tool.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// TOML configuration, or an output file whose header echoes one.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output.path`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Built-in material, overriding `material.name`.
    #[arg(long, value_parser = ["sto", "kto"])]
    material: Option<String>,
    /// `section.key=value`, applied after the configuration file; repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn run(args: Args) -> Result<(), CliError> {
    if let Some(n) = thread_count()? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let base = match &args.config {
        Some(path) => ToolConfig::load(path)?,
        None => ToolConfig::default(),
    };
    let mut overrides = Vec::new();
    if let Some(m) = &args.material {
        overrides.push(format!("material.name={m}"));
    }
    overrides.extend(args.overrides.iter().cloned());
    let mut config = base.with_overrides(&overrides)?;
    if let Some(out) = args.out {
        config.output.path = out;
    }
    let output = execute(args.command, &config)?;
    print!("{}", output.stdout);
    for path in write_output(&output, &config.output.path)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
