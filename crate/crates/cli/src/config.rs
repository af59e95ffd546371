use std::fmt;

use sacurv::sacrel::SpectrumConvention;
use sacurv::ArithmeticMode;

use crate::args::{ConventionArg, FormatArg, GlobalOpts, ModeArg};

pub const DEFAULT_FLOAT_TOL: f64 = 1e-9;

/// Error that ends a run with exit code 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

pub fn input_error(msg: impl Into<String>) -> InputError {
    InputError(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Markdown,
}

/// Validated options for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: ArithmeticMode,
    /// Tolerance handed to the library: 0 in exact mode.
    pub tol: f64,
    pub conventions: Vec<SpectrumConvention>,
    pub format: Format,
    pub fixture: Option<String>,
    pub r_max: Option<usize>,
}

impl RunConfig {
    pub fn from_opts(
        opts: &GlobalOpts,
        default_convention: ConventionArg,
    ) -> Result<Self, InputError> {
        let mode = match opts.mode {
            ModeArg::Exact => ArithmeticMode::Exact,
            ModeArg::Float => ArithmeticMode::Float,
        };
        let tol = match mode {
            ArithmeticMode::Exact => 0.0,
            ArithmeticMode::Float => {
                let t = opts.tol.unwrap_or(DEFAULT_FLOAT_TOL);
                if !(t.is_finite() && t > 0.0) {
                    return Err(input_error(format!(
                        "--tol must be a positive number in float mode, got {t}"
                    )));
                }
                t
            }
        };
        let conventions = match opts.convention.unwrap_or(default_convention) {
            ConventionArg::Full => vec![SpectrumConvention::Full],
            ConventionArg::Screen => vec![SpectrumConvention::ScreenOnly],
            ConventionArg::Both => vec![SpectrumConvention::ScreenOnly, SpectrumConvention::Full],
        };
        let format = match opts.format {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
            FormatArg::Markdown => Format::Markdown,
        };
        Ok(Self {
            mode,
            tol,
            conventions,
            format,
            fixture: opts.fixture.clone(),
            r_max: opts.r_max,
        })
    }

    pub fn fixture_arg(&self) -> Result<&str, InputError> {
        self.fixture
            .as_deref()
            .ok_or_else(|| input_error("--fixture is required for this command"))
    }

    /// Reported tolerance: `None` in exact mode.
    pub fn reported_tol(&self) -> Option<f64> {
        (self.mode == ArithmeticMode::Float).then_some(self.tol)
    }

    pub fn convention_names(&self) -> Vec<String> {
        self.conventions
            .iter()
            .map(|c| c.name().to_string())
            .collect()
    }

    /// Orders `0..=min(top, r_max)`.
    pub fn orders(&self, top: usize) -> std::ops::RangeInclusive<usize> {
        0..=self.r_max.map_or(top, |m| m.min(top))
    }
}
