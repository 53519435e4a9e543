//! Command-line front end for the `paravaractor` models: TOML configuration,
//! CSV tables and a key-value design report.

pub mod commands;
pub mod config;
pub mod table;

use std::path::{Path, PathBuf};

pub use commands::{execute, Command, Output};
pub use config::ToolConfig;

/// Environment variable setting the worker-thread count.
pub const THREADS_ENV: &str = "PARAVARACTOR_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] paravaractor::Error),
    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for configuration and validation errors, 3 for numerical failures
    /// (including parametric threshold), 1 for I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Model(e) if e.is_validation() => 2,
            CliError::Model(_) => 3,
            CliError::Io { .. } => 1,
        }
    }
}

/// Writes every file of `output` into `dir`, creating it if needed.
pub fn write_output(output: &Output, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    output
        .files
        .iter()
        .map(|(name, contents)| {
            let path = dir.join(name);
            std::fs::write(&path, contents).map_err(io(&path))?;
            Ok(path)
        })
        .collect()
}

/// Reads the thread count from [`THREADS_ENV`]; `None` when unset.
pub fn thread_count() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!(
                "{THREADS_ENV} must be a positive integer, got `{v}`"
            ))),
        },
    }
}
