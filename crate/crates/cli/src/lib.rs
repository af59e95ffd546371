//! Command-line front end: fixture I/O, curvature tables, identity
//! verification and screen-change reports.
//!
//! Exit codes: 0 success, 1 an expected-exact residual failed, 2 bad input.

pub mod args;
pub mod config;
pub mod report;

mod analysis;
mod curv;
mod listing;
mod render;
mod screen;
mod source;
mod verify;

use std::ffi::OsString;

use clap::Parser;
use sacurv::{ArithmeticMode, Rational, Scalar};

use args::{Cli, Command, ConventionArg, FixturesAction};
use config::{InputError, RunConfig};
use render::Render;
use report::Status;

pub use source::SEARCH_PATH_VAR;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IDENTITY_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Result of one invocation, captured for the binary and for tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_INPUT,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match dispatch(&cli) {
        Ok(o) => o,
        Err(e) => Outcome {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome, InputError> {
    match &cli.command {
        Command::Curv => {
            let cfg = RunConfig::from_opts(&cli.opts, ConventionArg::Screen)?;
            by_mode(&cfg, curv_command::<Rational>, curv_command::<f64>)
        }
        Command::Verify => {
            let cfg = RunConfig::from_opts(&cli.opts, ConventionArg::Both)?;
            by_mode(&cfg, verify_command::<Rational>, verify_command::<f64>)
        }
        Command::ScreenChange { coeffs } => {
            let cfg = RunConfig::from_opts(&cli.opts, ConventionArg::Full)?;
            let loc = source::locate(cfg.fixture_arg()?)?;
            let report = match cfg.mode {
                ArithmeticMode::Exact => screen::build::<Rational>(&loc, &cfg, coeffs)?,
                ArithmeticMode::Float => screen::build::<f64>(&loc, &cfg, coeffs)?,
            };
            let failed = report.failed();
            Ok(Outcome {
                code: if failed {
                    EXIT_IDENTITY_FAILURE
                } else {
                    EXIT_OK
                },
                stdout: report.render(cfg.format),
                stderr: if failed {
                    "screen-change decomposition does not close; see residual columns\n".to_string()
                } else {
                    String::new()
                },
            })
        }
        Command::Fixtures {
            action: FixturesAction::List,
        } => {
            let cfg = RunConfig::from_opts(&cli.opts, ConventionArg::Both)?;
            Ok(Outcome {
                code: EXIT_OK,
                stdout: listing::build().render(cfg.format),
                stderr: String::new(),
            })
        }
    }
}

type Handler = fn(&RunConfig) -> Result<Outcome, InputError>;

fn by_mode(cfg: &RunConfig, exact: Handler, float: Handler) -> Result<Outcome, InputError> {
    match cfg.mode {
        ArithmeticMode::Exact => exact(cfg),
        ArithmeticMode::Float => float(cfg),
    }
}

fn curv_command<S: Scalar>(cfg: &RunConfig) -> Result<Outcome, InputError> {
    let loc = source::locate(cfg.fixture_arg()?)?;
    let an = analysis::analyze::<S>(&loc, cfg)?;
    let report = curv::build(&an, cfg);
    Ok(Outcome {
        code: EXIT_OK,
        stdout: report.render(cfg.format),
        stderr: String::new(),
    })
}

fn verify_command<S: Scalar>(cfg: &RunConfig) -> Result<Outcome, InputError> {
    let loc = source::locate(cfg.fixture_arg()?)?;
    let an = analysis::analyze::<S>(&loc, cfg)?;
    let report = verify::build(&an, cfg);
    let mut stderr = String::new();
    for f in &report.failures {
        stderr.push_str(&format!(
            "FAIL {} {}: {}\n",
            f.suite,
            f.label,
            f.detail.as_deref().unwrap_or_default()
        ));
    }
    let failed = report.failures.iter().any(|f| f.status == Status::Fail);
    Ok(Outcome {
        code: if failed {
            EXIT_IDENTITY_FAILURE
        } else {
            EXIT_OK
        },
        stdout: report.render(cfg.format),
        stderr,
    })
}
