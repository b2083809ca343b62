//! Front end for the `qfock` binary: run configuration, the verification
//! suite, `(q, lambda)` sweeps and object dumps.

pub mod config;
pub mod dump;
pub mod sweep;
pub mod verify;

use std::path::Path;

pub use config::{parse_list, Caps, Format, RunConfig, Tolerances};
pub use dump::{cmd_dump, DumpObject};
pub use sweep::{cmd_sweep, run_sweep, SweepRow, SWEEP_SCHEMA};
pub use verify::{cmd_verify, run_checks, Check, VerifyReport};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad configuration or arguments; exit code 2.
    #[error("configuration error: {0}")]
    Config(String),
    /// Rejected by the library before any work started; exit code 2.
    #[error(transparent)]
    Library(#[from] qfock::Error),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    /// At least one check failed; exit code 1.
    #[error("check failed: {0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::CheckFailed(_) => 1,
            _ => 2,
        }
    }
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io {
            path: dir.display().to_string(),
            source: e,
        })?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Runs `f` on a pool of `jobs` threads (0: all cores).
pub(crate) fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {jobs} workers: {e}")))?;
    Ok(pool.install(f))
}
