//! Fixture loading and the geometry shared by `curv` and `verify`.

use sacurv::framecalc::{
    derive_geometry, detect_sac, FrameFixture, InducedGeometry, SacDetection, SacForm,
};
use sacurv::newton::Operator;
use sacurv::sacrel::{SacParams, SpectrumConvention};
use sacurv::{Scalar, Spectrum};

use crate::config::{input_error, InputError, RunConfig};
use crate::report::{fmt_combination, fmt_matrix, fmt_scalar, GeometrySummary, Header, SacInfo};
use crate::source::{self, Located};

pub struct Analysis<S> {
    pub fixture: FrameFixture<S>,
    pub source: String,
    pub geom: InducedGeometry<S>,
    pub kstar: Option<Spectrum<S>>,
    pub sac: Option<SacDetection<S>>,
    pub notices: Vec<String>,
    pub tol: f64,
}

pub fn analyze<S: Scalar>(loc: &Located, cfg: &RunConfig) -> Result<Analysis<S>, InputError> {
    let fixture: FrameFixture<S> = source::parse(loc)?;
    let geom = derive_geometry(&fixture, cfg.tol).map_err(|e| input_error(e.to_string()))?;
    let kstar = geom.kstar_spectrum(cfg.tol);
    let sac = detect_sac(&geom, cfg.tol);
    let mut a = Analysis {
        fixture,
        source: loc.origin.describe(),
        geom,
        kstar,
        sac,
        notices: Vec::new(),
        tol: cfg.tol,
    };
    a.notices = a.collect_notices();
    Ok(a)
}

impl<S: Scalar> Analysis<S> {
    pub fn n(&self) -> usize {
        self.geom.n()
    }

    pub fn labels(&self) -> &[String] {
        &self.geom.labels
    }

    pub fn header(&self, command: &'static str, cfg: &RunConfig) -> Header {
        Header {
            schema_version: crate::report::SCHEMA_VERSION,
            command,
            fixture: self.fixture.name.clone(),
            source: self.source.clone(),
            mode: S::MODE.to_string(),
            tolerance: cfg.reported_tol(),
            conventions: cfg.convention_names(),
        }
    }

    pub fn sac_info(&self) -> Option<SacInfo> {
        self.sac.as_ref().map(|d| SacInfo {
            form: d.form.name().to_string(),
            phi: fmt_scalar(&d.phi),
            a: fmt_scalar(&d.a),
        })
    }

    pub fn params(&self, conv: SpectrumConvention) -> Option<SacParams<S>> {
        let d = self.sac.as_ref()?;
        SacParams::new(d.phi.clone(), d.a.clone(), conv).ok()
    }

    /// `A_N` on the convention's domain.
    pub fn a_n_on(&self, conv: SpectrumConvention) -> Operator<S> {
        match conv {
            SpectrumConvention::Full => self.geom.a_n.clone(),
            SpectrumConvention::ScreenOnly => self.geom.a_n.screen_restriction(),
        }
    }

    /// `A_N E + a E` in tangent coordinates.
    pub fn radical_column_defect(&self) -> Vec<S> {
        let m = self.geom.a_n.entries();
        let mut col = m.column(0);
        col[0] = col[0].clone() + self.geom.xi_a.clone();
        col
    }

    pub fn radical_column_is_minus_a(&self) -> bool {
        let scale = self.geom.a_n.entries().max_abs().max(1.0);
        self.radical_column_defect()
            .iter()
            .all(|v| v.is_negligible(scale, self.tol))
    }

    pub fn geometry_summary(&self) -> GeometrySummary {
        GeometrySummary {
            labels: self.labels().to_vec(),
            a_estar: fmt_matrix(self.geom.a_estar.entries()),
            a_n: fmt_matrix(self.geom.a_n.entries()),
            a_estar_self_adjoint: self.geom.a_estar.is_self_adjoint(self.tol),
            kstar: self
                .kstar
                .as_ref()
                .map(|k| k.values().iter().map(fmt_scalar).collect()),
        }
    }

    fn collect_notices(&self) -> Vec<String> {
        let mut out = Vec::new();
        let labels = self.labels().to_vec();
        let failed: Vec<String> = self
            .geom
            .failed_checks()
            .iter()
            .map(|c| c.check.key().to_string())
            .collect();
        if !failed.is_empty() {
            out.push(format!(
                "fixture {:?} is non-strict and fails: {}",
                self.fixture.name,
                failed.join(", ")
            ));
        }
        if self.kstar.is_none() {
            let why = match self.geom.a_estar.self_adjoint_violation(self.tol) {
                Some((i, j, _, _)) => {
                    format!("it is not self-adjoint (pair {}, {})", labels[i], labels[j])
                }
                None => "it is not diagonal in the fixture frame".to_string(),
            };
            out.push(format!(
                "A_E* has no frame spectrum because {why}; eigenvalue-based quantities \
                 (closed-form J_r*, r-umbilicity, deleted-function and eigenvector identities) are skipped"
            ));
        }
        if !self.radical_column_is_minus_a() {
            let a_n_e = self.geom.a_n.entries().column(0);
            let expected = {
                let mut v = vec![S::zero(); labels.len()];
                v[0] = -self.geom.xi_a.clone();
                v
            };
            let mut msg = format!(
                "A_N E = {} whereas the -aI form requires {}",
                fmt_combination(&a_n_e, &labels),
                fmt_combination(&expected, &labels)
            );
            if let Some(xi) = &self.geom.xi_tangent {
                msg.push_str(&format!(" (ξ = {})", fmt_combination(xi, &labels)));
            }
            out.push(msg);
        }
        match &self.sac {
            None => out.push(
                "no screen almost conformal relation detected; SAC quantities (S_r relation, J_r*, \
                 correction operators) are omitted"
                    .to_string(),
            ),
            Some(d) if d.form == SacForm::LambdaXi => out.push(format!(
                "A_N = φ A_E* + λ⊗ξ with φ = {}; relations between A_N and A_E* are evaluated for \
                 φ A_E* - a I with a = {}",
                fmt_scalar(&d.phi),
                fmt_scalar(&d.a)
            )),
            Some(_) => {}
        }
        out
    }
}
