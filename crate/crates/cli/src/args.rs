use clap::{Args, Parser, Subcommand, ValueEnum};

/// Curvature tables, identity verification and screen-change reports for
/// half-lightlike frame fixtures.
#[derive(Debug, Parser)]
#[command(name = "sacurv", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: GlobalOpts,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Bundled fixture name, path to a TOML fixture, or a name looked up in
    /// the directories of SACURV_FIXTURE_PATH.
    #[arg(long, global = true)]
    pub fixture: Option<String>,
    /// Spectrum convention; `curv` defaults to screen, `verify` to both.
    #[arg(long, global = true, value_enum)]
    pub convention: Option<ConventionArg>,
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    /// Relative tolerance for float mode (ignored in exact mode).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,
    /// Largest order `r` to report.
    #[arg(long, global = true)]
    pub r_max: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-order curvature table.
    Curv,
    /// Run every residual suite; exit 1 if an expected-exact residual fails.
    Verify,
    /// Apply a screen change with characteristic coefficients `c_1..c_n`.
    ScreenChange {
        /// Comma-separated screen coefficients, e.g. `1,0,0` or `1/2,-3`.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        coeffs: Vec<String>,
    },
    /// Fixture catalogue.
    Fixtures {
        #[command(subcommand)]
        action: FixturesAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum FixturesAction {
    /// Bundled fixtures and those found on the search path.
    List,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Full,
    Screen,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
    Markdown,
}
