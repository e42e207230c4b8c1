//! Command-line front end for `g2-core`: a registry of commands sharing one
//! input loader, each filling a JSON report.

pub mod commands;
pub mod context;
pub mod registry;
pub mod report;

pub use context::{CliError, Context, InputSource};
pub use registry::{Command, Registry};
pub use report::{Report, Status};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

/// Environment variable overriding every command's default tolerance.
pub const TOL_ENV: &str = "G2_TOL";

/// What a run printed and how it ended.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    /// The JSON report on stdout, when one was written.
    pub fn report(&self) -> Option<serde_json::Value> {
        serde_json::from_str(&self.stdout).ok()
    }
}

/// Runs the command line `argv` (program name first). `env_tol` is the value
/// of [`TOL_ENV`], if set.
pub fn run<I, T>(argv: I, env_tol: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    Registry::standard().run(argv, env_tol)
}
