use rayon::prelude::*;

use sacurv::newton::{classify, curvatures};
use sacurv::sacrel::{j_closed, sac_report, SpectrumConvention};
use sacurv::scalar::binomial;
use sacurv::Scalar;

use crate::analysis::Analysis;
use crate::config::RunConfig;
use crate::report::{fmt_scalar, CurvRow, CurvatureReport, IdentityRow};

pub fn build<S: Scalar>(an: &Analysis<S>, cfg: &RunConfig) -> CurvatureReport {
    let s_star = curvatures(an.geom.a_estar.entries());
    let class = classify(&an.geom.a_estar, an.tol);
    let per_convention: Vec<(Vec<CurvRow>, Vec<IdentityRow>)> = cfg
        .conventions
        .par_iter()
        .map(|&conv| {
            (
                rows_for(an, cfg, conv, &s_star, &class),
                residuals_for(an, conv),
            )
        })
        .collect();
    let mut rows = Vec::new();
    let mut residuals = Vec::new();
    for (r, x) in per_convention {
        rows.extend(r);
        residuals.extend(x);
    }
    CurvatureReport {
        header: an.header("curv", cfg),
        geometry: an.geometry_summary(),
        fixture_checks: an
            .geom
            .checks
            .iter()
            .map(|c| IdentityRow::from_check(c, an.fixture.strict))
            .collect(),
        sac: an.sac_info(),
        rows,
        residuals,
        notices: an.notices.clone(),
    }
}

fn rows_for<S: Scalar>(
    an: &Analysis<S>,
    cfg: &RunConfig,
    conv: SpectrumConvention,
    s_star: &[S],
    class: &sacurv::newton::Classification,
) -> Vec<CurvRow> {
    let n = an.n();
    let s = curvatures(an.a_n_on(conv).entries());
    let params = an.params(conv);
    let at = |v: &[S], r: usize| v.get(r).cloned().unwrap_or_else(S::zero);
    cfg.orders(n)
        .map(|r| {
            let sr_star = at(s_star, r);
            let sr = at(&s, r);
            let h = sr_star.clone() / binomial::<S>(n + 1, r);
            let j_op = params
                .as_ref()
                .map(|p| sr.clone() - p.phi().powi(r as u32) * sr_star.clone());
            let j_cl = match (&params, &an.kstar) {
                (Some(p), Some(k)) if r >= 1 => j_closed(k, r, p).ok(),
                (Some(_), _) if r == 0 => Some(S::zero()),
                _ => None,
            };
            let decomposition = match (&params, &j_cl) {
                (Some(p), Some(j)) => {
                    Some(sr.clone() - p.phi().powi(r as u32) * sr_star.clone() - j.clone())
                }
                _ => None,
            };
            let (maximal, umbilical) = if r == 0 {
                (false, Some(true))
            } else {
                (
                    class.r_maximal[r - 1],
                    class.r_umbilical.as_ref().map(|u| u[r - 1]),
                )
            };
            CurvRow {
                convention: conv.name().to_string(),
                r,
                s_r_star: fmt_scalar(&sr_star),
                h_r_star: fmt_scalar(&h),
                s_r: fmt_scalar(&sr),
                j_r_operational: j_op.as_ref().map(fmt_scalar),
                j_r_closed: j_cl.as_ref().map(fmt_scalar),
                r_maximal: maximal,
                r_umbilical: umbilical,
                decomposition_residual: decomposition.as_ref().map(fmt_scalar),
            }
        })
        .collect()
}

fn residuals_for<S: Scalar>(an: &Analysis<S>, conv: SpectrumConvention) -> Vec<IdentityRow> {
    let Some(p) = an.params(conv) else {
        return Vec::new();
    };
    match sac_report(&an.geom.a_estar, an.kstar.as_ref(), &p) {
        Ok(rep) => rep
            .rows
            .iter()
            .map(|row| {
                IdentityRow::checked(
                    "sac_relations",
                    row.identity.key(),
                    Some(conv.name()),
                    Some(row.r),
                    &row.residual,
                    &row.expectation,
                    row.scale,
                    an.tol,
                )
            })
            .collect(),
        Err(e) => vec![IdentityRow::skipped(
            "sac_relations",
            "all",
            Some(conv.name()),
            None,
            e.to_string(),
        )],
    }
}
