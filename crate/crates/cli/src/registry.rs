//! The command trait and the registry dispatching on it.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{value_parser, Arg, ArgAction, ArgMatches};

use crate::commands;
use crate::context::{CliError, Context};
use crate::report::{Report, Status};
use crate::{Outcome, EXIT_INVALID, EXIT_OK, EXIT_PARSE};

/// One `g2` subcommand.
pub trait Command: Send + Sync {
    fn name(&self) -> &'static str;
    fn about(&self) -> &'static str;
    /// Tolerance used when neither `--tol` nor `G2_TOL` is given.
    fn default_tol(&self) -> f64;
    /// Flags beyond the shared `INPUT`, `--catalog` and `--tol`.
    fn args(&self) -> Vec<Arg> {
        Vec::new()
    }
    /// Fills `report`. Validation problems either go through
    /// [`Report::fail`] or come back as [`CliError::Invalid`].
    fn run(&self, ctx: &Context, report: &mut Report) -> Result<(), CliError>;
}

pub struct Registry {
    commands: Vec<Box<dyn Command>>,
}

impl Registry {
    pub fn new() -> Self {
        Registry {
            commands: Vec::new(),
        }
    }

    /// All built-in commands.
    pub fn standard() -> Self {
        let mut r = Registry::new();
        r.register(Box::new(commands::Check));
        r.register(Box::new(commands::MetricCmd));
        r.register(Box::new(commands::Torsion));
        r.register(Box::new(commands::Classify));
        r.register(Box::new(commands::Ricci));
        r.register(Box::new(commands::Soliton));
        r.register(Box::new(commands::Einstein));
        r.register(Box::new(commands::Su3));
        r.register(Box::new(commands::Flow));
        r.register(Box::new(commands::Catalog));
        r.register(Box::new(commands::Oracle));
        r
    }

    /// Adds `cmd`, replacing any command of the same name.
    pub fn register(&mut self, cmd: Box<dyn Command>) {
        self.commands.retain(|c| c.name() != cmd.name());
        self.commands.push(cmd);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Command> {
        self.commands
            .iter()
            .find(|c| c.name() == name)
            .map(|c| c.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.commands.iter().map(|c| c.name())
    }

    fn clap(&self) -> clap::Command {
        let subs = self.commands.iter().map(|c| {
            clap::Command::new(c.name())
                .about(c.about())
                .args(shared_args())
                .args(c.args())
        });
        clap::Command::new("g2")
            .about("G2-structures on Lie algebras: metrics, torsion, curvature, solitons and flows")
            .version(env!("CARGO_PKG_VERSION"))
            .subcommand_required(true)
            .arg_required_else_help(true)
            .subcommands(subs)
    }

    pub fn run<I, T>(&self, argv: I, env_tol: Option<&str>) -> Outcome
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        let matches = match self.clap().try_get_matches_from(argv) {
            Ok(m) => m,
            Err(e) => {
                let text = e.render().to_string();
                return match e.kind() {
                    ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                        code: EXIT_OK,
                        stdout: text,
                        stderr: String::new(),
                    },
                    _ => parse_failure(text),
                };
            }
        };
        let (name, sub) = matches.subcommand().expect("subcommand is required");
        let cmd = self.get(name).expect("clap only accepts registered names");
        match self.execute(cmd, sub, env_tol) {
            Ok(report) => {
                let code = match report.status {
                    Status::Ok => EXIT_OK,
                    Status::Invalid => EXIT_INVALID,
                };
                Outcome {
                    code,
                    stdout: report.to_json(),
                    stderr: report
                        .errors
                        .iter()
                        .map(|e| format!("error: {e}\n"))
                        .collect(),
                }
            }
            Err(CliError::Parse(msg)) => parse_failure(format!("error: {msg}\n")),
            Err(CliError::Invalid(msg)) => unreachable!("invalid input is reported: {msg}"),
        }
    }

    fn execute(
        &self,
        cmd: &dyn Command,
        sub: &ArgMatches,
        env_tol: Option<&str>,
    ) -> Result<Report, CliError> {
        let tol = match (sub.get_one::<f64>("tol"), env_tol) {
            (Some(&t), _) => t,
            (None, Some(s)) => {
                parse_tol(s).map_err(|m| CliError::Parse(format!("{}: {m}", crate::TOL_ENV)))?
            }
            (None, None) => cmd.default_tol(),
        };
        let ctx = Context::load(sub, tol)?;
        let mut report = Report::new(cmd.name());
        report.input = ctx.describe();
        report.tolerance("tol", tol);
        match cmd.run(&ctx, &mut report) {
            Ok(()) => Ok(report),
            Err(CliError::Invalid(msg)) => {
                report.fail(msg);
                Ok(report)
            }
            Err(e) => Err(e),
        }
    }
}

impl Default for Registry {
    fn default() -> Self {
        Registry::standard()
    }
}

fn parse_failure(stderr: String) -> Outcome {
    Outcome {
        code: EXIT_PARSE,
        stdout: String::new(),
        stderr,
    }
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let t: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("'{s}' is not a number"))?;
    if t.is_finite() && t > 0.0 {
        Ok(t)
    } else {
        Err(format!("tolerance must be positive and finite, got {s}"))
    }
}

fn shared_args() -> [Arg; 3] {
    [
        Arg::new("input")
            .value_name("INPUT")
            .help("input document; '-' reads standard input")
            .value_parser(value_parser!(PathBuf)),
        Arg::new("catalog")
            .long("catalog")
            .value_name("NAME")
            .help("use a built-in catalog entry instead of an input file"),
        Arg::new("tol")
            .long("tol")
            .value_name("TOL")
            .help("override the command's tolerance (also G2_TOL)")
            .value_parser(parse_tol)
            .action(ArgAction::Set),
    ]
}
