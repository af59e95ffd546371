use rayon::prelude::*;

use sacurv::identities::{
    bridge_residual, cooo_residual, duu_residual, the2_divergence, theo1_residual, TheoremInputs,
};
use sacurv::newton::{
    curvatures, eigen_action_residual, trace_identities_matrix, NewtonFamily, TraceIdentity,
};
use sacurv::sacrel::{sac_report, ConventionData, Expectation, SpectrumConvention};
use sacurv::scalar::sign;
use sacurv::symfun::sigma_deleted;
use sacurv::{Scalar, Spectrum};

use crate::analysis::Analysis;
use crate::config::RunConfig;
use crate::report::{fmt_scalar, DiscrepancyRow, IdentityRow, Status, Summary, VerifyReport};

fn magnitude<S: Scalar>(xs: &[&S]) -> f64 {
    xs.iter().map(|x| x.abs().to_f64()).fold(1.0, f64::max)
}

fn trace_key(t: TraceIdentity) -> &'static str {
    match t {
        TraceIdentity::TraceNewton => "trace_newton",
        TraceIdentity::TraceShapeNewton => "trace_shape_newton",
        TraceIdentity::TraceShapeSquaredNewton => "trace_shape_squared_newton",
    }
}

/// Algebraic identities of `A_E*` and its Newton transformations.
fn newton_suite<S: Scalar>(an: &Analysis<S>) -> Vec<IdentityRow> {
    let a = an.geom.a_estar.entries();
    let tol = an.tol;
    let mut rows: Vec<IdentityRow> = trace_identities_matrix(a)
        .iter()
        .map(|t| {
            IdentityRow::checked(
                "newton_identities",
                trace_key(t.identity),
                None,
                Some(t.r),
                &t.residual,
                &Expectation::Zero,
                magnitude(&[&t.lhs, &t.rhs]),
                tol,
            )
            .with_detail(format!(
                "lhs = {}, rhs = {}",
                fmt_scalar(&t.lhs),
                fmt_scalar(&t.rhs)
            ))
        })
        .collect();
    let Some(k) = &an.kstar else {
        rows.push(IdentityRow::skipped(
            "newton_identities",
            "deleted_function_sum",
            None,
            None,
            "A_E* has no frame spectrum",
        ));
        rows.push(IdentityRow::skipped(
            "newton_identities",
            "eigenvector_action",
            None,
            None,
            "A_E* has no frame spectrum",
        ));
        return rows;
    };
    let m = k.len();
    let s = curvatures(a);
    let fam = NewtonFamily::from_matrix(a);
    for r in 0..=m {
        let sum = (0..m).fold(S::zero(), |acc, b| acc + sigma_deleted(k, r, b));
        let rhs = S::from_i64((m - r) as i64) * s.get(r).cloned().unwrap_or_else(S::zero);
        rows.push(IdentityRow::checked(
            "newton_identities",
            "deleted_function_sum",
            None,
            Some(r),
            &(sum.clone() - rhs.clone()),
            &Expectation::Zero,
            magnitude(&[&sum, &rhs]),
            tol,
        ));
    }
    for r in 0..=m {
        let t = fam.transform(r);
        let mut worst = S::zero();
        for beta in 0..m {
            let mut e = vec![S::zero(); m];
            e[beta] = S::one();
            for v in eigen_action_residual(&t, r, k.values(), beta, &e) {
                if v.abs() > worst {
                    worst = v.abs();
                }
            }
        }
        rows.push(IdentityRow::checked(
            "newton_identities",
            "eigenvector_action",
            None,
            Some(r),
            &worst,
            &Expectation::Zero,
            t.max_abs().max(1.0),
            tol,
        ));
    }
    for r in 1..m {
        let res = bridge_residual(k.values(), r);
        rows.push(IdentityRow::checked(
            "newton_identities",
            "deleted_square_sum",
            None,
            Some(r),
            &res,
            &Expectation::Zero,
            magnitude(&[&res]),
            tol,
        ));
    }
    rows
}

fn sac_suite<S: Scalar>(an: &Analysis<S>, conv: SpectrumConvention) -> Vec<IdentityRow> {
    let Some(p) = an.params(conv) else {
        return vec![IdentityRow::skipped(
            "sac_relations",
            "all",
            Some(conv.name()),
            None,
            "no screen almost conformal relation detected",
        )];
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

/// Pointwise theorem scalars. Traces are taken over the full tangent space;
/// `J_r*` follows the convention. Derivatives along `E` are zero because a
/// fixture is a single point with constant coefficients.
fn theorem_suite<S: Scalar>(
    an: &Analysis<S>,
    conventions: &[SpectrumConvention],
) -> Vec<IdentityRow> {
    let (Some(full_p), true) = (an.params(SpectrumConvention::Full), an.n() >= 1) else {
        return vec![IdentityRow::skipped(
            "theorem_scalars",
            "all",
            None,
            None,
            "no screen almost conformal relation detected",
        )];
    };
    let Ok(full) = ConventionData::new(&an.geom.a_estar, &full_p) else {
        return vec![IdentityRow::skipped(
            "theorem_scalars",
            "all",
            None,
            None,
            "A_E* has no radical slot",
        )];
    };
    let tol = an.tol;
    let kstar: Option<Vec<S>> = an.kstar.as_ref().map(Spectrum::screen_values);
    let mut rows = Vec::new();
    for r in 1..=an.n() {
        let Ok(base) = TheoremInputs::from_convention(&full, r) else {
            continue;
        };
        let mut base = base;
        base.tau_e = an.geom.tau[0].clone();
        if let Some(k) = &kstar {
            base = base.with_spectrum(k.clone());
        }
        for (label, v) in base.consistency() {
            rows.push(IdentityRow::checked(
                "theorem_scalars",
                format!("input_{label}"),
                None,
                Some(r),
                &v,
                &Expectation::Zero,
                magnitude(&[&v]),
                tol,
            ));
        }
        for &conv in conventions {
            let Some(p) = an.params(conv) else { continue };
            let Ok(data) = ConventionData::new(&an.geom.a_estar, &p) else {
                continue;
            };
            let mut inp = base.clone();
            inp.jr_star = data.j(r);
            let cname = Some(conv.name());
            let audit = |label: &str, v: Result<S, sacurv::identities::IdentityError>| match v {
                Ok(v) => IdentityRow::checked(
                    "theorem_scalars",
                    label,
                    cname,
                    Some(r),
                    &v,
                    &Expectation::Audit,
                    1.0,
                    tol,
                ),
                Err(e) => {
                    IdentityRow::skipped("theorem_scalars", label, cname, Some(r), e.to_string())
                }
            };
            let theo1 = theo1_residual(&inp);
            let cooo = cooo_residual(&inp);
            rows.push(audit("leaf_relation", theo1.clone()));
            rows.push(audit("flatness_criterion", cooo.clone()));
            rows.push(audit("flatness_deleted_form", duu_residual(&inp)));
            rows.push(audit("divergence_integrand", the2_divergence(&inp)));
            if let (Ok(t), Ok(c)) = (theo1, cooo) {
                let res = t.clone() - sign::<S>(r) * c.clone();
                rows.push(IdentityRow::checked(
                    "theorem_scalars",
                    "leaf_relation_reduces_to_flatness",
                    cname,
                    Some(r),
                    &res,
                    &Expectation::Zero,
                    magnitude(&[&t, &c]),
                    tol,
                ));
            }
        }
    }
    rows
}

/// `S_r` of `A_N` with and without the radical direction.
fn discrepancy<S: Scalar>(an: &Analysis<S>) -> Vec<DiscrepancyRow> {
    let full = curvatures(an.a_n_on(SpectrumConvention::Full).entries());
    let screen = curvatures(an.a_n_on(SpectrumConvention::ScreenOnly).entries());
    let at = |v: &[S], r: usize| v.get(r).cloned().unwrap_or_else(S::zero);
    let predictable = an.radical_column_is_minus_a();
    let a = an.geom.xi_a.clone();
    (1..=an.n())
        .map(|r| {
            let (sf, ss) = (at(&full, r), at(&screen, r));
            let diff = sf.clone() - ss.clone();
            let expected = predictable.then(|| -a.clone() * at(&screen, r - 1));
            let status = match &expected {
                Some(e)
                    if (diff.clone() - e.clone()).is_negligible(magnitude(&[&sf, &ss]), an.tol) =>
                {
                    Status::Pass
                }
                Some(_) => Status::Fail,
                None => Status::Audit,
            };
            DiscrepancyRow {
                r,
                s_full: fmt_scalar(&sf),
                s_screen: fmt_scalar(&ss),
                difference: fmt_scalar(&diff),
                expected: expected.as_ref().map(fmt_scalar),
                status,
            }
        })
        .collect()
}

pub fn build<S: Scalar>(an: &Analysis<S>, cfg: &RunConfig) -> VerifyReport {
    let checks: Vec<IdentityRow> = an
        .geom
        .checks
        .iter()
        .map(|c| IdentityRow::from_check(c, an.fixture.strict))
        .collect();
    let ((newton, sac), (theorems, disc)) = rayon::join(
        || {
            rayon::join(
                || newton_suite(an),
                || {
                    cfg.conventions
                        .par_iter()
                        .map(|&c| sac_suite(an, c))
                        .collect::<Vec<_>>()
                },
            )
        },
        || rayon::join(|| theorem_suite(an, &cfg.conventions), || discrepancy(an)),
    );
    let mut rows = checks;
    rows.extend(newton);
    rows.extend(sac.into_iter().flatten());
    rows.extend(theorems);
    let r_max = cfg.r_max;
    rows.retain(|row| match (row.r, r_max) {
        (Some(r), Some(m)) => r <= m,
        _ => true,
    });
    let disc: Vec<DiscrepancyRow> = disc
        .into_iter()
        .filter(|d| r_max.is_none_or(|m| d.r <= m))
        .collect();
    let mut failures: Vec<IdentityRow> = rows
        .iter()
        .filter(|r| r.status == Status::Fail)
        .cloned()
        .collect();
    for d in disc.iter().filter(|d| d.status == Status::Fail) {
        failures.push(discrepancy_row(d));
    }
    for f in &mut failures {
        let ctx = format!(
            "fixture {}, {}r = {}, residual = {}",
            an.fixture.name,
            f.convention
                .as_ref()
                .map(|c| format!("convention {c}, "))
                .unwrap_or_default(),
            f.r.map(|r| r.to_string()).unwrap_or_else(|| "-".into()),
            f.residual.clone().unwrap_or_default()
        );
        f.detail = Some(match &f.detail {
            Some(d) => format!("{ctx}; {d}"),
            None => ctx,
        });
    }
    let mut statuses: Vec<Status> = rows.iter().map(|r| r.status).collect();
    statuses.extend(disc.iter().map(|d| d.status));
    VerifyReport {
        header: an.header("verify", cfg),
        sac: an.sac_info(),
        rows,
        discrepancy: disc,
        notices: an.notices.clone(),
        summary: Summary::tally(&statuses),
        failures,
    }
}

/// A discrepancy line in the flat row format used by CSV and failure lists.
pub fn discrepancy_row(d: &DiscrepancyRow) -> IdentityRow {
    IdentityRow {
        suite: "convention_discrepancy",
        label: "s_full_minus_s_screen".to_string(),
        convention: None,
        r: Some(d.r),
        residual: Some(d.difference.clone()),
        expectation: if d.expected.is_some() {
            "value"
        } else {
            "audit"
        },
        expected: d.expected.clone(),
        status: d.status,
        detail: Some(format!(
            "S_r full = {}, S_r screen = {}",
            d.s_full, d.s_screen
        )),
    }
}
