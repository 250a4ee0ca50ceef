//! Config-driven driver around the `mixbem` library: `solve`, `verify`,
//! `measure-study`, and `operator-dump`.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{run, run_config, Command};
pub use config::RunConfig;
pub use error::{CliError, ErrorKind};

/// Environment variable that fixes the worker thread count.
pub const THREADS_ENV: &str = "MIXBEM_THREADS";

/// Sizes the global rayon pool from [`THREADS_ENV`] if it is set.
pub fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::config(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::config(format!("thread pool: {e}")))
}
