//! Induced objects of a fixture: second fundamental forms, connection forms
//! and shape operators, plus the residuals of their compatibility relations.

use serde::Serialize;
use thiserror::Error;

use super::fixture::{ConnectionKind, FrameFixture};
use crate::matrix::Matrix;
use crate::newton::Operator;
use crate::scalar::Scalar;
use crate::symfun::Spectrum;

/// Compatibility relations checked on every fixture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FixtureCheck {
    /// Components of `∇̄_X Y` outside the frame decomposition, and the
    /// `W`-component of `∇̄_X W`.
    GaussDecomposition,
    /// `B(X, E) = 0` and `D(X, E) = -φ(X)`.
    RadicalSecondForms,
    /// `g(A_E* X, Y) = B(X, Y) - b g(X, Y)`.
    ScreenShapeOperator,
    /// `g(A_E* X, Y) = g(X, A_E* Y)` on the screen.
    ScreenShapeSymmetry,
    /// `g(A_W X, Y) = D(X, Y) - e g(X, Y) + φ(X) λ(Y)`.
    CoScreenShapeOperator,
    /// `g(A_N X, PY) = C(X, PY) - a g(X, PY) - λ(X) η(PY)`.
    TransversalShapeOperator,
    /// `ḡ(A_N X, N) = -a λ(X)` and `ḡ(A_W X, N) = ρ(X) - e λ(X)`.
    TransversalPairing,
    /// `δ(X) = τ(X) - b λ(X)`.
    RadicalConnectionForm,
    /// `(∇_X g)(Y, Z) = B(X,Y)λ(Z) + B(X,Z)λ(Y) - η(Y)g(X,Z) - η(Z)g(X,Y)`.
    InducedNonMetricity,
    /// `∇̄_X Y - ∇̄_Y X - [X, Y] = η(Y)X - η(X)Y` on tangent pairs.
    AmbientTorsion,
}

impl FixtureCheck {
    pub const ALL: [FixtureCheck; 10] = [
        FixtureCheck::GaussDecomposition,
        FixtureCheck::RadicalSecondForms,
        FixtureCheck::ScreenShapeOperator,
        FixtureCheck::ScreenShapeSymmetry,
        FixtureCheck::CoScreenShapeOperator,
        FixtureCheck::TransversalShapeOperator,
        FixtureCheck::TransversalPairing,
        FixtureCheck::RadicalConnectionForm,
        FixtureCheck::InducedNonMetricity,
        FixtureCheck::AmbientTorsion,
    ];

    pub fn key(self) -> &'static str {
        match self {
            FixtureCheck::GaussDecomposition => "gauss_decomposition",
            FixtureCheck::RadicalSecondForms => "radical_second_forms",
            FixtureCheck::ScreenShapeOperator => "screen_shape_operator",
            FixtureCheck::ScreenShapeSymmetry => "screen_shape_symmetry",
            FixtureCheck::CoScreenShapeOperator => "co_screen_shape_operator",
            FixtureCheck::TransversalShapeOperator => "transversal_shape_operator",
            FixtureCheck::TransversalPairing => "transversal_pairing",
            FixtureCheck::RadicalConnectionForm => "radical_connection_form",
            FixtureCheck::InducedNonMetricity => "induced_non_metricity",
            FixtureCheck::AmbientTorsion => "ambient_torsion",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CheckStatus<S> {
    Passed { max_residual: S },
    Failed { max_residual: S, worst_at: String },
    Skipped { reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult<S> {
    pub check: FixtureCheck,
    pub status: CheckStatus<S>,
}

impl<S> CheckResult<S> {
    pub fn failed(&self) -> bool {
        matches!(self.status, CheckStatus::Failed { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("fixture {fixture:?} is inconsistent with the frame decomposition: {}", .failures.join("; "))]
    Inconsistent {
        fixture: String,
        failures: Vec<String>,
    },
}

/// Everything read off a fixture. Bilinear forms are indexed by tangent
/// frame positions, covectors by tangent positions, operators act on the
/// tangent frame `E, Z_1..Z_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedGeometry<S> {
    pub fixture_name: String,
    pub labels: Vec<String>,
    /// Tangent block of the Gram matrix (degenerate along `E`).
    pub induced_metric: Matrix<S>,
    pub b: Matrix<S>,
    /// `C(X, PY)`; the `E` column is zero.
    pub c: Matrix<S>,
    pub d: Matrix<S>,
    pub tau: Vec<S>,
    pub rho: Vec<S>,
    pub phi_form: Vec<S>,
    pub delta: Vec<S>,
    pub lambda: Vec<S>,
    pub eta: Vec<S>,
    /// `a = η(N)`, `b = η(E)`, `e = ε η(W)`.
    pub xi_a: S,
    pub xi_b: S,
    pub xi_e: S,
    /// Tangent part of `ξ`, or `None` when `ξ` has a transversal component.
    pub xi_tangent: Option<Vec<S>>,
    pub a_estar: Operator<S>,
    pub a_n: Operator<S>,
    pub a_w: Operator<S>,
    pub checks: Vec<CheckResult<S>>,
}

impl<S: Scalar> InducedGeometry<S> {
    pub fn n(&self) -> usize {
        self.labels.len() - 1
    }

    pub fn failed_checks(&self) -> Vec<&CheckResult<S>> {
        self.checks.iter().filter(|c| c.failed()).collect()
    }

    /// Spectrum of `A_E*` (radical slot first) when the operator is diagonal
    /// in the frame and self-adjoint; eigen-based operations need this.
    pub fn kstar_spectrum(&self, tol: f64) -> Option<Spectrum<S>> {
        let m = self.a_estar.entries();
        let scale = m.max_abs().max(1.0);
        let dim = m.rows();
        let off_diagonal_zero =
            (0..dim).all(|i| (0..dim).all(|j| i == j || m[(i, j)].is_negligible(scale, tol)));
        if !off_diagonal_zero || !self.a_estar.is_self_adjoint(tol) {
            return None;
        }
        let mut values = m.diag();
        values[0] = S::zero();
        Spectrum::new(values, Some(0)).ok()
    }
}

struct Worst<S> {
    value: S,
    at: Option<String>,
}

impl<S: Scalar> Worst<S> {
    fn new() -> Self {
        Self {
            value: S::zero(),
            at: None,
        }
    }

    fn record(&mut self, residual: S, at: impl FnOnce() -> String) {
        let r = residual.abs();
        if r > self.value || (self.at.is_none() && !r.is_zero()) {
            self.value = r;
            self.at = Some(at());
        }
    }

    fn finish(self, check: FixtureCheck, scale: f64, tol: f64) -> CheckResult<S> {
        let status = if self.value.is_negligible(scale, tol) {
            CheckStatus::Passed {
                max_residual: self.value,
            }
        } else {
            CheckStatus::Failed {
                max_residual: self.value,
                worst_at: self.at.unwrap_or_default(),
            }
        };
        CheckResult { check, status }
    }
}

fn dot<S: Scalar>(u: &[S], v: &[S]) -> S {
    u.iter()
        .zip(v)
        .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
}

/// Reads off the induced geometry and evaluates every compatibility check.
/// Strict fixtures with a failed check are rejected; otherwise failures are
/// reported in [`InducedGeometry::checks`].
pub fn derive_geometry<S: Scalar>(
    f: &FrameFixture<S>,
    tol: f64,
) -> Result<InducedGeometry<S>, GeometryError> {
    let geom = induced_geometry(f, tol);
    if f.strict {
        let failures: Vec<String> = geom
            .checks
            .iter()
            .filter_map(|c| match &c.status {
                CheckStatus::Failed {
                    max_residual,
                    worst_at,
                } => Some(format!(
                    "{} (residual {max_residual} at {worst_at})",
                    c.check.key()
                )),
                _ => None,
            })
            .collect();
        if !failures.is_empty() {
            return Err(GeometryError::Inconsistent {
                fixture: f.name.clone(),
                failures,
            });
        }
    }
    Ok(geom)
}

/// [`derive_geometry`] without the strictness gate.
pub fn induced_geometry<S: Scalar>(f: &FrameFixture<S>, tol: f64) -> InducedGeometry<S> {
    let n = f.n();
    let t = n + 1;
    let dim = f.dim();
    let (ei, ni, wi) = (f.e(), f.n_index(), f.w_index());
    let gamma = &f.connection;
    let g = &f.gram;
    let l = &f.labels;
    let nm = if f.kind == ConnectionKind::SemiSymmetricNonMetric {
        S::one()
    } else {
        S::zero()
    };

    let gm = Matrix::from_fn(t, t, |i, j| g[(i, j)].clone());
    let b = Matrix::from_fn(t, t, |x, y| gamma[x][y][ni].clone());
    let d = Matrix::from_fn(t, t, |x, y| gamma[x][y][wi].clone());
    let c = Matrix::from_fn(t, t, |x, y| {
        if y == ei {
            S::zero()
        } else {
            gamma[x][y][ei].clone()
        }
    });
    let col = |x: usize, y: usize, keep: &dyn Fn(usize) -> bool| -> Vec<S> {
        (0..t)
            .map(|k| {
                if keep(k) {
                    -gamma[x][y][k].clone()
                } else {
                    S::zero()
                }
            })
            .collect()
    };
    let mut a_estar = Matrix::zeros(t, t);
    let mut a_n = Matrix::zeros(t, t);
    let mut a_w = Matrix::zeros(t, t);
    for x in 0..t {
        a_estar.set_column(x, &col(x, ei, &|k| k != ei));
        a_n.set_column(x, &col(x, ni, &|_| true));
        a_w.set_column(x, &col(x, wi, &|_| true));
    }
    let tau: Vec<S> = (0..t).map(|x| gamma[x][ni][ni].clone()).collect();
    let rho: Vec<S> = (0..t).map(|x| gamma[x][ni][wi].clone()).collect();
    let phi_form: Vec<S> = (0..t).map(|x| gamma[x][wi][ni].clone()).collect();
    let delta: Vec<S> = (0..t).map(|x| -gamma[x][ei][ei].clone()).collect();
    let lambda: Vec<S> = (0..t).map(|x| g[(x, ni)].clone()).collect();
    let eta_all = g.mul_vec(&f.xi);
    let eta: Vec<S> = eta_all[..t].to_vec();
    let eps = g[(wi, wi)].clone();
    let xi_a = eta_all[ni].clone();
    let xi_b = eta_all[ei].clone();
    let xi_e = eps * eta_all[wi].clone();
    let xi_tangent = (ni..dim)
        .all(|k| f.xi[k].is_zero())
        .then(|| f.xi[..t].to_vec());

    let scale = gamma
        .iter()
        .flatten()
        .flatten()
        .chain(g.iter())
        .chain(f.xi.iter())
        .map(|v| v.abs().to_f64())
        .fold(1.0, f64::max);
    let mut checks = Vec::new();

    // Gauss decomposition: no ambient-only components; ∇̄_X W has no W part.
    let mut w = Worst::new();
    for x in 0..t {
        for y in 0..dim {
            for k in wi + 1..dim {
                w.record(gamma[x][y][k].clone(), || {
                    format!("X={}, Y={}, component {}", l[x], l[y], l[k])
                });
            }
        }
        w.record(gamma[x][wi][wi].clone(), || {
            format!("X={}, Y={}, component {}", l[x], l[wi], l[wi])
        });
    }
    checks.push(w.finish(FixtureCheck::GaussDecomposition, scale, tol));

    let mut w = Worst::new();
    for x in 0..t {
        w.record(b[(x, ei)].clone(), || format!("B({}, {})", l[x], l[ei]));
        w.record(d[(x, ei)].clone() + phi_form[x].clone(), || {
            format!("D({0}, {1}) + φ({0})", l[x], l[ei])
        });
    }
    checks.push(w.finish(FixtureCheck::RadicalSecondForms, scale, tol));

    let ga = gm.matmul(&a_estar);
    let mut w = Worst::new();
    for x in 0..t {
        for y in 0..t {
            let lhs = ga[(y, x)].clone();
            let rhs = b[(x, y)].clone() - nm.clone() * xi_b.clone() * gm[(x, y)].clone();
            w.record(lhs - rhs, || format!("X={}, Y={}", l[x], l[y]));
        }
    }
    checks.push(w.finish(FixtureCheck::ScreenShapeOperator, scale, tol));

    let mut w = Worst::new();
    for x in 1..t {
        for y in 1..t {
            w.record(ga[(y, x)].clone() - ga[(x, y)].clone(), || {
                format!("X={}, Y={}", l[x], l[y])
            });
        }
    }
    checks.push(w.finish(FixtureCheck::ScreenShapeSymmetry, scale, tol));

    let gw = gm.matmul(&a_w);
    let mut w = Worst::new();
    for x in 0..t {
        for y in 0..t {
            let rhs = d[(x, y)].clone() - nm.clone() * xi_e.clone() * gm[(x, y)].clone()
                + phi_form[x].clone() * lambda[y].clone();
            w.record(gw[(y, x)].clone() - rhs, || {
                format!("X={}, Y={}", l[x], l[y])
            });
        }
    }
    checks.push(w.finish(FixtureCheck::CoScreenShapeOperator, scale, tol));

    let gn = gm.matmul(&a_n);
    let mut w = Worst::new();
    for x in 0..t {
        for y in 1..t {
            let rhs = c[(x, y)].clone()
                - nm.clone()
                    * (xi_a.clone() * gm[(x, y)].clone() + lambda[x].clone() * eta[y].clone());
            w.record(gn[(y, x)].clone() - rhs, || {
                format!("X={}, PY={}", l[x], l[y])
            });
        }
    }
    checks.push(w.finish(FixtureCheck::TransversalShapeOperator, scale, tol));

    // ḡ(V, N) for tangent V is the E-coefficient of V.
    let mut w = Worst::new();
    for x in 0..t {
        let an = a_n[(ei, x)].clone() + nm.clone() * xi_a.clone() * lambda[x].clone();
        w.record(an, || format!("g(A_N {}, N)", l[x]));
        let aw =
            a_w[(ei, x)].clone() - rho[x].clone() + nm.clone() * xi_e.clone() * lambda[x].clone();
        w.record(aw, || format!("g(A_W {}, N)", l[x]));
    }
    checks.push(w.finish(FixtureCheck::TransversalPairing, scale, tol));

    let mut w = Worst::new();
    for x in 0..t {
        let r = delta[x].clone() - tau[x].clone() + nm.clone() * xi_b.clone() * lambda[x].clone();
        w.record(r, || format!("X={}", l[x]));
    }
    checks.push(w.finish(FixtureCheck::RadicalConnectionForm, scale, tol));

    match &f.metric_derivative {
        None => checks.push(CheckResult {
            check: FixtureCheck::InducedNonMetricity,
            status: CheckStatus::Skipped {
                reason: "fixture supplies no metric derivatives".into(),
            },
        }),
        Some(md) => {
            let mut w = Worst::new();
            for x in 0..t {
                for y in 0..t {
                    for z in 0..t {
                        let nabla_y: Vec<S> = gamma[x][y][..t].to_vec();
                        let nabla_z: Vec<S> = gamma[x][z][..t].to_vec();
                        let lhs = md[x][(y, z)].clone()
                            - dot(&gm.mul_vec(&nabla_y), &unit(t, z))
                            - dot(&gm.mul_vec(&nabla_z), &unit(t, y));
                        let rhs = b[(x, y)].clone() * lambda[z].clone()
                            + b[(x, z)].clone() * lambda[y].clone()
                            - nm.clone()
                                * (eta[y].clone() * gm[(x, z)].clone()
                                    + eta[z].clone() * gm[(x, y)].clone());
                        w.record(lhs - rhs, || format!("X={}, Y={}, Z={}", l[x], l[y], l[z]));
                    }
                }
            }
            checks.push(w.finish(FixtureCheck::InducedNonMetricity, scale, tol));
        }
    }

    match &f.bracket {
        None => checks.push(CheckResult {
            check: FixtureCheck::AmbientTorsion,
            status: CheckStatus::Skipped {
                reason: "fixture supplies no brackets".into(),
            },
        }),
        Some(br) => {
            let mut w = Worst::new();
            for x in 0..t {
                for y in 0..t {
                    for k in 0..dim {
                        let mut torsion =
                            gamma[x][y][k].clone() - gamma[y][x][k].clone() - br[x][y][k].clone();
                        if k == x {
                            torsion = torsion - nm.clone() * eta[y].clone();
                        }
                        if k == y {
                            torsion = torsion + nm.clone() * eta[x].clone();
                        }
                        w.record(torsion, || {
                            format!("X={}, Y={}, component {}", l[x], l[y], l[k])
                        });
                    }
                }
            }
            checks.push(w.finish(FixtureCheck::AmbientTorsion, scale, tol));
        }
    }

    let labels = f.tangent_labels();
    let op = |m: Matrix<S>| {
        Operator::new(m, gm.clone())
            .expect("tangent Gram block is square and symmetric")
            .with_radical_slot(0)
            .with_labels(labels.clone())
    };
    InducedGeometry {
        fixture_name: f.name.clone(),
        labels: labels.clone(),
        induced_metric: gm.clone(),
        b,
        c,
        d,
        tau,
        rho,
        phi_form,
        delta,
        lambda,
        eta,
        xi_a,
        xi_b,
        xi_e,
        xi_tangent,
        a_estar: op(a_estar),
        a_n: op(a_n),
        a_w: op(a_w),
        checks,
    }
}

fn unit<S: Scalar>(len: usize, k: usize) -> Vec<S> {
    let mut v = vec![S::zero(); len];
    v[k] = S::one();
    v
}
