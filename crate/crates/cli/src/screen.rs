use sacurv::framecalc::{screen_change_report, FrameFixture, ScreenChangeError};
use sacurv::Scalar;

use crate::config::{input_error, InputError, RunConfig};
use crate::report::{
    fmt_combination, fmt_matrix, fmt_scalar, fmt_vec, Header, ScreenChangeReport, Status, StepRow,
    SCHEMA_VERSION,
};
use crate::source::{self, Located};

pub fn parse_coefficients<S: Scalar>(raw: &[String]) -> Result<Vec<S>, InputError> {
    raw.iter()
        .map(|s| S::parse_scalar(s.trim()).map_err(|e| input_error(format!("--coeffs: {e}"))))
        .collect()
}

pub fn build<S: Scalar>(
    loc: &Located,
    cfg: &RunConfig,
    raw: &[String],
) -> Result<ScreenChangeReport, InputError> {
    let fixture: FrameFixture<S> = source::parse(loc)?;
    let c: Vec<S> = parse_coefficients(raw)?;
    let rep = screen_change_report(&fixture, &c, cfg.tol).map_err(|e| match e {
        ScreenChangeError::CoefficientCount { expected, found } => input_error(format!(
            "fixture {:?} has {expected} screen directions but {found} coefficients were given",
            fixture.name
        )),
        other => input_error(other.to_string()),
    })?;
    let tol = cfg.tol;
    let judge = |res: &S, scale: f64| {
        if res.is_negligible(scale, tol) {
            Status::Pass
        } else {
            Status::Fail
        }
    };
    let top = cfg.orders(rep.steps.len().saturating_sub(1));
    let steps: Vec<_> = rep.steps.iter().filter(|s| top.contains(&s.r)).collect();
    let step_rows = steps
        .iter()
        .map(|s| StepRow {
            r: s.r,
            before: fmt_matrix(&s.before),
            after: fmt_matrix(&s.after),
            delta_theta: fmt_scalar(&s.delta_theta),
            shape_term: fmt_matrix(&s.shape_term),
            correction_term: fmt_matrix(&s.correction_term),
            max_change: fmt_scalar(&(&s.after - &s.before).max_abs_scalar()),
            max_shape_term: fmt_scalar(&s.shape_term.max_abs_scalar()),
            max_correction_term: fmt_scalar(&s.correction_term.max_abs_scalar()),
            residual: fmt_scalar(&s.residual),
            status: judge(
                &s.residual,
                s.before.max_abs().max(s.after.max_abs()).max(1.0),
            ),
        })
        .collect();
    let labels = rep.labels.clone();
    let all_labels: Vec<String> = fixture.labels.clone();
    let scale = rep
        .a_estar_before
        .max_abs()
        .max(rep.a_estar_after.max_abs())
        .max(1.0);
    Ok(ScreenChangeReport {
        header: Header {
            schema_version: SCHEMA_VERSION,
            command: "screen-change",
            fixture: fixture.name.clone(),
            source: loc.origin.describe(),
            mode: S::MODE.to_string(),
            tolerance: cfg.reported_tol(),
            conventions: vec!["full".to_string()],
        },
        coefficients: fmt_vec(&rep.coefficients),
        characteristic: fmt_combination(&rep.change.characteristic, &all_labels),
        transversal_shift: fmt_combination(&rep.change.transversal_shift, &all_labels),
        labels,
        a_estar_before: fmt_matrix(&rep.a_estar_before),
        a_estar_after: fmt_matrix(&rep.a_estar_after),
        a_estar_predicted: fmt_matrix(&rep.a_estar_predicted),
        uniqueness_residual: fmt_scalar(&rep.uniqueness_residual),
        uniqueness_status: judge(&rep.uniqueness_residual, scale),
        steps: step_rows,
        notes: rep.notes.clone(),
    })
}

impl ScreenChangeReport {
    pub fn failed(&self) -> bool {
        self.uniqueness_status == Status::Fail
            || self.steps.iter().any(|s| s.status == Status::Fail)
    }
}
