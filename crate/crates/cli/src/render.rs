//! JSON, CSV and Markdown renderings. JSON is the full report; CSV carries
//! the main table with a fixed column order; Markdown is for reading.

use serde::Serialize;

use crate::config::Format;
use crate::report::*;
use crate::verify::discrepancy_row;

pub trait Render: Serialize {
    fn csv_table(&self) -> (Vec<&'static str>, Vec<Vec<String>>);
    fn markdown(&self) -> String;

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
                s.push('\n');
                s
            }
            Format::Csv => {
                let (header, rows) = self.csv_table();
                write_csv(&header, &rows)
            }
            Format::Markdown => self.markdown(),
        }
    }
}

fn write_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

fn md_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let esc = |s: &str| s.replace('|', "\\|");
    let mut out = format!("| {} |\n", header.join(" | "));
    out.push_str(&format!("|{}\n", " --- |".repeat(header.len())));
    for r in rows {
        let cells: Vec<String> = r.iter().map(|c| esc(c)).collect();
        out.push_str(&format!("| {} |\n", cells.join(" | ")));
    }
    out
}

fn md_matrix(labels: &[String], m: &[Vec<String>]) -> String {
    let mut header = vec![""];
    header.extend(labels.iter().map(String::as_str));
    let rows: Vec<Vec<String>> = m
        .iter()
        .zip(labels)
        .map(|(row, l)| {
            std::iter::once(l.clone())
                .chain(row.iter().cloned())
                .collect()
        })
        .collect();
    md_table(&header, &rows)
}

fn md_header(h: &Header) -> String {
    let tol = h
        .tolerance
        .map(|t| format!(", tolerance {t}"))
        .unwrap_or_default();
    format!(
        "# {}: {}\n\nsource `{}`, mode {}{tol}, conventions {}, schema {}\n\n",
        h.command,
        h.fixture,
        h.source,
        h.mode,
        h.conventions.join(", "),
        h.schema_version
    )
}

fn md_notices(notices: &[String]) -> String {
    if notices.is_empty() {
        return String::new();
    }
    let mut out = "## Notices\n\n".to_string();
    for n in notices {
        out.push_str(&format!("- {n}\n"));
    }
    out.push('\n');
    out
}

fn md_sac(sac: &Option<SacInfo>) -> String {
    match sac {
        Some(s) => format!(
            "SAC relation: form `{}`, φ = {}, a = {}\n\n",
            s.form, s.phi, s.a
        ),
        None => "SAC relation: none detected\n\n".to_string(),
    }
}

fn identity_cells(r: &IdentityRow) -> Vec<String> {
    vec![
        r.suite.to_string(),
        r.label.clone(),
        opt(&r.convention),
        opt(&r.r),
        opt(&r.residual),
        r.expectation.to_string(),
        opt(&r.expected),
        r.status.name().to_string(),
        opt(&r.detail),
    ]
}

fn curv_cells(r: &CurvRow) -> Vec<String> {
    vec![
        r.convention.clone(),
        r.r.to_string(),
        r.s_r_star.clone(),
        r.h_r_star.clone(),
        r.s_r.clone(),
        opt(&r.j_r_operational),
        opt(&r.j_r_closed),
        r.r_maximal.to_string(),
        opt(&r.r_umbilical),
        opt(&r.decomposition_residual),
    ]
}

impl Render for CurvatureReport {
    fn csv_table(&self) -> (Vec<&'static str>, Vec<Vec<String>>) {
        (
            CURV_CSV_COLUMNS.to_vec(),
            self.rows.iter().map(curv_cells).collect(),
        )
    }

    fn markdown(&self) -> String {
        let mut out = md_header(&self.header);
        out.push_str(&md_sac(&self.sac));
        out.push_str("## A_E*\n\n");
        out.push_str(&md_matrix(&self.geometry.labels, &self.geometry.a_estar));
        out.push_str("\n## A_N\n\n");
        out.push_str(&md_matrix(&self.geometry.labels, &self.geometry.a_n));
        out.push_str("\n## Curvatures\n\n");
        let rows: Vec<Vec<String>> = self.rows.iter().map(curv_cells).collect();
        out.push_str(&md_table(&CURV_CSV_COLUMNS, &rows));
        out.push_str("\n## Fixture checks\n\n");
        let rows: Vec<Vec<String>> = self.fixture_checks.iter().map(identity_cells).collect();
        out.push_str(&md_table(&VERIFY_CSV_COLUMNS, &rows));
        if !self.residuals.is_empty() {
            out.push_str("\n## Relations between A_N and A_E*\n\n");
            let rows: Vec<Vec<String>> = self.residuals.iter().map(identity_cells).collect();
            out.push_str(&md_table(&VERIFY_CSV_COLUMNS, &rows));
        }
        out.push('\n');
        out.push_str(&md_notices(&self.notices));
        out
    }
}

impl Render for VerifyReport {
    fn csv_table(&self) -> (Vec<&'static str>, Vec<Vec<String>>) {
        let mut rows: Vec<Vec<String>> = self.rows.iter().map(identity_cells).collect();
        rows.extend(
            self.discrepancy
                .iter()
                .map(|d| identity_cells(&discrepancy_row(d))),
        );
        (VERIFY_CSV_COLUMNS.to_vec(), rows)
    }

    fn markdown(&self) -> String {
        let mut out = md_header(&self.header);
        out.push_str(&md_sac(&self.sac));
        let s = &self.summary;
        out.push_str(&format!(
            "Summary: {} pass, {} fail, {} audit, {} skipped\n\n",
            s.pass, s.fail, s.audit, s.skipped
        ));
        out.push_str("## Residuals\n\n");
        let rows: Vec<Vec<String>> = self.rows.iter().map(identity_cells).collect();
        out.push_str(&md_table(&VERIFY_CSV_COLUMNS, &rows));
        out.push_str("\n## Convention discrepancy\n\n");
        let rows: Vec<Vec<String>> = self
            .discrepancy
            .iter()
            .map(|d| {
                vec![
                    d.r.to_string(),
                    d.s_full.clone(),
                    d.s_screen.clone(),
                    d.difference.clone(),
                    opt(&d.expected),
                    d.status.name().to_string(),
                ]
            })
            .collect();
        out.push_str(&md_table(
            &[
                "r",
                "S_r full",
                "S_r screen",
                "difference",
                "expected",
                "status",
            ],
            &rows,
        ));
        if !self.failures.is_empty() {
            out.push_str("\n## Failures\n\n");
            for f in &self.failures {
                out.push_str(&format!(
                    "- {} / {}: {}\n",
                    f.suite,
                    f.label,
                    opt(&f.detail)
                ));
            }
        }
        out.push('\n');
        out.push_str(&md_notices(&self.notices));
        out
    }
}

fn step_cells(s: &StepRow) -> Vec<String> {
    vec![
        s.r.to_string(),
        s.delta_theta.clone(),
        s.max_change.clone(),
        s.max_shape_term.clone(),
        s.max_correction_term.clone(),
        s.residual.clone(),
        s.status.name().to_string(),
    ]
}

impl Render for ScreenChangeReport {
    fn csv_table(&self) -> (Vec<&'static str>, Vec<Vec<String>>) {
        let rows = self.steps.iter().map(step_cells).collect();
        (SCREEN_CSV_COLUMNS.to_vec(), rows)
    }

    fn markdown(&self) -> String {
        let mut out = md_header(&self.header);
        out.push_str(&format!(
            "coefficients ({}), characteristic W = {}, N - N' = {}\n\n",
            self.coefficients.join(", "),
            self.characteristic,
            self.transversal_shift
        ));
        out.push_str("## A_E* before\n\n");
        out.push_str(&md_matrix(&self.labels, &self.a_estar_before));
        out.push_str("\n## A_E* after (old frame)\n\n");
        out.push_str(&md_matrix(&self.labels, &self.a_estar_after));
        out.push_str(&format!(
            "\nuniqueness residual {} ({})\n\n## Newton transformation steps\n\n",
            self.uniqueness_residual,
            self.uniqueness_status.name()
        ));
        let rows: Vec<Vec<String>> = self.steps.iter().map(step_cells).collect();
        out.push_str(&md_table(&SCREEN_CSV_COLUMNS, &rows));
        out.push('\n');
        out.push_str(&md_notices(&self.notes));
        out
    }
}

impl Render for FixtureList {
    fn csv_table(&self) -> (Vec<&'static str>, Vec<Vec<String>>) {
        let rows = self
            .fixtures
            .iter()
            .map(|f| {
                vec![
                    f.name.clone(),
                    f.source.clone(),
                    opt(&f.dimension),
                    opt(&f.connection),
                    opt(&f.strict),
                    f.valid.to_string(),
                    f.description.clone(),
                ]
            })
            .collect();
        (LIST_CSV_COLUMNS.to_vec(), rows)
    }

    fn markdown(&self) -> String {
        let (h, rows) = self.csv_table();
        format!("# fixtures\n\n{}", md_table(&h, &rows))
    }
}
