//! Serializable report types. Every scalar is rendered to a string before it
//! enters a report, so the same structs serve exact and float runs.

use serde::Serialize;

use sacurv::framecalc::{CheckResult, CheckStatus};
use sacurv::sacrel::Expectation;
use sacurv::{Matrix, Scalar};

pub const SCHEMA_VERSION: &str = "1";

/// Exact values print as `p/q`; floats print in shortest round-trip form,
/// with `-0` folded into `0`.
pub fn fmt_scalar<S: Scalar>(v: &S) -> String {
    if S::is_exact() {
        return v.to_string();
    }
    let f = v.to_f64();
    if f == 0.0 {
        "0".to_string()
    } else if (1e-4..1e15).contains(&f.abs()) {
        format!("{f}")
    } else {
        format!("{f:e}")
    }
}

pub fn fmt_matrix<S: Scalar>(m: &Matrix<S>) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| fmt_scalar(&m[(i, j)])).collect())
        .collect()
}

pub fn fmt_vec<S: Scalar>(v: &[S]) -> Vec<String> {
    v.iter().map(fmt_scalar).collect()
}

/// `Z1 + 1/2 Z4` style rendering of a coordinate vector; `0` when empty.
pub fn fmt_combination<S: Scalar>(v: &[S], labels: &[String]) -> String {
    let terms: Vec<String> = v
        .iter()
        .zip(labels)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, l)| {
            if *c == S::one() {
                l.clone()
            } else if *c == -S::one() {
                format!("-{l}")
            } else {
                format!("{} {l}", fmt_scalar(c))
            }
        })
        .collect();
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ").replace("+ -", "- ")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub fixture: String,
    pub source: String,
    pub mode: String,
    pub tolerance: Option<f64>,
    pub conventions: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SacInfo {
    pub form: String,
    pub phi: String,
    pub a: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct GeometrySummary {
    pub labels: Vec<String>,
    pub a_estar: Vec<Vec<String>>,
    pub a_n: Vec<Vec<String>>,
    pub a_estar_self_adjoint: bool,
    /// Eigenvalues of `A_E*` (radical first) when it is diagonal.
    pub kstar: Option<Vec<String>>,
}

/// One line of the curvature table. Field names double as CSV headers.
#[derive(Debug, Clone, Serialize)]
pub struct CurvRow {
    pub convention: String,
    pub r: usize,
    #[serde(rename = "S_r_star")]
    pub s_r_star: String,
    #[serde(rename = "H_r_star")]
    pub h_r_star: String,
    #[serde(rename = "S_r")]
    pub s_r: String,
    #[serde(rename = "J_r_operational")]
    pub j_r_operational: Option<String>,
    #[serde(rename = "J_r_closed")]
    pub j_r_closed: Option<String>,
    pub r_maximal: bool,
    pub r_umbilical: Option<bool>,
    /// `S_r - φ^r S_r* - J_r*` with the closed-form `J_r*`.
    pub decomposition_residual: Option<String>,
}

pub const CURV_CSV_COLUMNS: [&str; 10] = [
    "convention",
    "r",
    "S_r_star",
    "H_r_star",
    "S_r",
    "J_r_operational",
    "J_r_closed",
    "r_maximal",
    "r_umbilical",
    "decomposition_residual",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Audit,
    Skipped,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Audit => "audit",
            Status::Skipped => "skipped",
        }
    }
}

/// One residual of one suite.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityRow {
    pub suite: &'static str,
    pub label: String,
    pub convention: Option<String>,
    pub r: Option<usize>,
    pub residual: Option<String>,
    /// `zero`, `value` or `audit`.
    pub expectation: &'static str,
    pub expected: Option<String>,
    pub status: Status,
    pub detail: Option<String>,
}

pub const VERIFY_CSV_COLUMNS: [&str; 9] = [
    "suite",
    "label",
    "convention",
    "r",
    "residual",
    "expectation",
    "expected",
    "status",
    "detail",
];

impl IdentityRow {
    /// Row for a residual with a known expectation. `scale` is the magnitude
    /// used for float comparisons.
    pub fn checked<S: Scalar>(
        suite: &'static str,
        label: impl Into<String>,
        convention: Option<&str>,
        r: Option<usize>,
        residual: &S,
        expectation: &Expectation<S>,
        scale: f64,
        tol: f64,
    ) -> Self {
        let status = match expectation.check(residual, scale, tol) {
            Some(true) => Status::Pass,
            Some(false) => Status::Fail,
            None => Status::Audit,
        };
        let expected = match expectation {
            Expectation::Zero => Some("0".to_string()),
            Expectation::Value(v) => Some(fmt_scalar(v)),
            Expectation::Audit => None,
        };
        Self {
            suite,
            label: label.into(),
            convention: convention.map(str::to_string),
            r,
            residual: Some(fmt_scalar(residual)),
            expectation: expectation.name(),
            expected,
            status,
            detail: None,
        }
    }

    pub fn skipped(
        suite: &'static str,
        label: impl Into<String>,
        convention: Option<&str>,
        r: Option<usize>,
        reason: impl Into<String>,
    ) -> Self {
        Self {
            suite,
            label: label.into(),
            convention: convention.map(str::to_string),
            r,
            residual: None,
            expectation: "zero",
            expected: None,
            status: Status::Skipped,
            detail: Some(reason.into()),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    /// Fixture compatibility checks. Failures on non-strict fixtures are
    /// documented properties of the fixture and are reported as audits.
    pub fn from_check<S: Scalar>(c: &CheckResult<S>, strict: bool) -> Self {
        let label = c.check.key();
        match &c.status {
            CheckStatus::Passed { max_residual } => Self {
                suite: "fixture_checks",
                label: label.to_string(),
                convention: None,
                r: None,
                residual: Some(fmt_scalar(max_residual)),
                expectation: "zero",
                expected: Some("0".to_string()),
                status: Status::Pass,
                detail: None,
            },
            CheckStatus::Failed {
                max_residual,
                worst_at,
            } => Self {
                suite: "fixture_checks",
                label: label.to_string(),
                convention: None,
                r: None,
                residual: Some(fmt_scalar(max_residual)),
                expectation: if strict { "zero" } else { "audit" },
                expected: strict.then(|| "0".to_string()),
                status: if strict { Status::Fail } else { Status::Audit },
                detail: Some(if strict {
                    format!("worst at {worst_at}")
                } else {
                    format!("worst at {worst_at}; fixture is non-strict")
                }),
            },
            CheckStatus::Skipped { reason } => {
                Self::skipped("fixture_checks", label, None, None, reason.clone())
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyRow {
    pub r: usize,
    pub s_full: String,
    pub s_screen: String,
    pub difference: String,
    /// `-a S_{r-1}` over the screen when `A_N E = -a E`.
    pub expected: Option<String>,
    pub status: Status,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub audit: usize,
    pub skipped: usize,
}

impl Summary {
    pub fn tally<'a>(statuses: impl IntoIterator<Item = &'a Status>) -> Self {
        let mut s = Summary::default();
        for st in statuses {
            match st {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::Audit => s.audit += 1,
                Status::Skipped => s.skipped += 1,
            }
        }
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CurvatureReport {
    #[serde(flatten)]
    pub header: Header,
    pub geometry: GeometrySummary,
    pub fixture_checks: Vec<IdentityRow>,
    pub sac: Option<SacInfo>,
    pub rows: Vec<CurvRow>,
    /// Relations between `A_N` and `A_E*` under each reported convention.
    pub residuals: Vec<IdentityRow>,
    pub notices: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    #[serde(flatten)]
    pub header: Header,
    pub sac: Option<SacInfo>,
    pub rows: Vec<IdentityRow>,
    pub discrepancy: Vec<DiscrepancyRow>,
    pub notices: Vec<String>,
    pub summary: Summary,
    pub failures: Vec<IdentityRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StepRow {
    pub r: usize,
    pub before: Vec<Vec<String>>,
    pub after: Vec<Vec<String>>,
    pub delta_theta: String,
    pub shape_term: Vec<Vec<String>>,
    pub correction_term: Vec<Vec<String>>,
    pub max_change: String,
    pub max_shape_term: String,
    pub max_correction_term: String,
    pub residual: String,
    pub status: Status,
}

pub const SCREEN_CSV_COLUMNS: [&str; 7] = [
    "r",
    "delta_theta",
    "max_change",
    "max_shape_term",
    "max_correction_term",
    "residual",
    "status",
];

#[derive(Debug, Clone, Serialize)]
pub struct ScreenChangeReport {
    #[serde(flatten)]
    pub header: Header,
    pub coefficients: Vec<String>,
    pub labels: Vec<String>,
    pub characteristic: String,
    pub transversal_shift: String,
    pub a_estar_before: Vec<Vec<String>>,
    pub a_estar_after: Vec<Vec<String>>,
    pub a_estar_predicted: Vec<Vec<String>>,
    pub uniqueness_residual: String,
    pub uniqueness_status: Status,
    pub steps: Vec<StepRow>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FixtureEntry {
    pub name: String,
    pub source: String,
    pub dimension: Option<usize>,
    pub connection: Option<String>,
    pub strict: Option<bool>,
    pub description: String,
    pub valid: bool,
}

pub const LIST_CSV_COLUMNS: [&str; 7] = [
    "name",
    "source",
    "dimension",
    "connection",
    "strict",
    "valid",
    "description",
];

#[derive(Debug, Clone, Serialize)]
pub struct FixtureList {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub fixtures: Vec<FixtureEntry>,
}
