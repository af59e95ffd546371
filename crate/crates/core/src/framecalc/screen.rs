//! Change of screen distribution and the induced change of `A_E*` and its
//! Newton transformations.

use thiserror::Error;

use super::fixture::{FixtureError, FrameFixture};
use super::geometry::induced_geometry;
use crate::matrix::Matrix;
use crate::newton::NewtonFamily;
use crate::scalar::{sign, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScreenChangeError {
    #[error("expected {expected} screen coefficients, got {found}")]
    CoefficientCount { expected: usize, found: usize },
    #[error("screen basis change must be {expected}x{expected}, got {rows}x{cols}")]
    BasisShape {
        expected: usize,
        rows: usize,
        cols: usize,
    },
    #[error("new screen vectors are linearly dependent")]
    Degenerate,
    #[error("transformed fixture is invalid: {0}")]
    Fixture(#[from] FixtureError),
}

/// A screen change applied to a fixture.
#[derive(Debug, Clone, PartialEq)]
pub struct ScreenChange<S> {
    pub fixture: FrameFixture<S>,
    /// Columns are the new frame vectors in old frame coordinates.
    pub transform: Matrix<S>,
    /// Characteristic vector field `W = Σ c_i Z_i`, old frame coordinates.
    pub characteristic: Vec<S>,
    /// `N - N'`, old frame coordinates (tangent).
    pub transversal_shift: Vec<S>,
}

/// New screen `Z'_i = Σ_j M_ij (Z_j - ω(Z_j) E)` and transversal
/// `N' = N - ½ g(W, W) E + W`, where `ω = g(·, W)` and `M` defaults to the
/// identity. The connection, brackets and metric derivatives are carried
/// to the new frame; coefficients `c` and `M` are taken constant.
pub fn screen_change<S: Scalar>(
    f: &FrameFixture<S>,
    c: &[S],
    basis: Option<&Matrix<S>>,
    tol: f64,
) -> Result<ScreenChange<S>, ScreenChangeError> {
    let n = f.n();
    let t = n + 1;
    let dim = f.dim();
    let ni = f.n_index();
    if c.len() != n {
        return Err(ScreenChangeError::CoefficientCount {
            expected: n,
            found: c.len(),
        });
    }
    let m = match basis {
        Some(m) if m.rows() != n || m.cols() != n => {
            return Err(ScreenChangeError::BasisShape {
                expected: n,
                rows: m.rows(),
                cols: m.cols(),
            })
        }
        Some(m) => m.clone(),
        None => Matrix::identity(n),
    };
    let g = &f.gram;
    let mut wc = vec![S::zero(); dim];
    for j in 0..n {
        wc[1 + j] = c[j].clone();
    }
    let omega = g.mul_vec(&wc);
    let gww = f.pair(&wc, &wc);
    let half = S::from_ratio(1, 2);

    let mut p = Matrix::identity(dim);
    for b in 0..n {
        let mut e_coef = S::zero();
        for j in 0..n {
            p[(1 + j, 1 + b)] = m[(b, j)].clone();
            e_coef = e_coef - m[(b, j)].clone() * omega[1 + j].clone();
        }
        p[(0, 1 + b)] = e_coef;
    }
    p[(0, ni)] = -(half.clone() * gww.clone());
    for j in 0..n {
        p[(1 + j, ni)] = c[j].clone();
    }
    let p_inv = p.inverse().map_err(|_| ScreenChangeError::Degenerate)?;

    // dp[i] = e_i(P) for tangent i; only E-coefficients vary, through the metric.
    let dp: Vec<Matrix<S>> = (0..t)
        .map(|i| {
            let mut d = Matrix::zeros(dim, dim);
            if let Some(md) = &f.metric_derivative {
                let dg = &md[i];
                let d_omega = dg.mul_vec(&wc);
                for b in 0..n {
                    let mut v = S::zero();
                    for j in 0..n {
                        v = v - m[(b, j)].clone() * d_omega[1 + j].clone();
                    }
                    d[(0, 1 + b)] = v;
                }
                let d_gww = wc
                    .iter()
                    .zip(&d_omega)
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
                d[(0, ni)] = -(half.clone() * d_gww);
            }
            d
        })
        .collect();

    // ∇̄_{e'_a} e'_b = Σ_i P_ia (Σ_j P_jb ∇̄_{e_i} e_j + e_i(P_jb) e_j).
    let mut connection = vec![vec![vec![S::zero(); dim]; dim]; t];
    for a in 0..t {
        for b in 0..dim {
            let mut v = vec![S::zero(); dim];
            for i in 0..t {
                let pia = p[(i, a)].clone();
                if pia.is_zero() {
                    continue;
                }
                for j in 0..dim {
                    let pjb = p[(j, b)].clone();
                    if !pjb.is_zero() {
                        for k in 0..dim {
                            v[k] = v[k].clone()
                                + pia.clone() * pjb.clone() * f.connection[i][j][k].clone();
                        }
                    }
                    v[j] = v[j].clone() + pia.clone() * dp[i][(j, b)].clone();
                }
            }
            connection[a][b] = p_inv.mul_vec(&v);
        }
    }

    // e'_a(P_jb) = Σ_i P_ia e_i(P_jb).
    let along = |a: usize| -> Matrix<S> {
        let mut acc = Matrix::zeros(dim, dim);
        for (i, d) in dp.iter().enumerate() {
            if !p[(i, a)].is_zero() {
                acc = &acc + &d.scale(&p[(i, a)]);
            }
        }
        acc
    };

    let bracket = f.bracket.as_ref().map(|br| {
        let mut out = vec![vec![vec![S::zero(); dim]; t]; t];
        for a in 0..t {
            let da = along(a);
            for b in 0..t {
                let db = along(b);
                let mut v = vec![S::zero(); dim];
                for i in 0..t {
                    for j in 0..t {
                        let w = p[(i, a)].clone() * p[(j, b)].clone();
                        if w.is_zero() {
                            continue;
                        }
                        for k in 0..dim {
                            v[k] = v[k].clone() + w.clone() * br[i][j][k].clone();
                        }
                    }
                }
                for j in 0..dim {
                    v[j] = v[j].clone() + da[(j, b)].clone() - db[(j, a)].clone();
                }
                out[a][b] = p_inv.mul_vec(&v);
            }
        }
        out
    });

    let p_t = p.transpose();
    let metric_derivative = f.metric_derivative.as_ref().map(|md| {
        (0..t)
            .map(|a| {
                let da = along(a);
                let mut dg = Matrix::zeros(dim, dim);
                for (i, mi) in md.iter().enumerate() {
                    if !p[(i, a)].is_zero() {
                        dg = &dg + &mi.scale(&p[(i, a)]);
                    }
                }
                let term1 = da.transpose().matmul(g).matmul(&p);
                let term2 = p_t.matmul(g).matmul(&da);
                let term3 = p_t.matmul(&dg).matmul(&p);
                &(&term1 + &term2) + &term3
            })
            .collect()
    });

    let mut fixture = f.clone();
    fixture.gram = p_t.matmul(g).matmul(&p);
    fixture.connection = connection;
    fixture.xi = p_inv.mul_vec(&f.xi);
    fixture.bracket = bracket;
    fixture.metric_derivative = metric_derivative;
    fixture.validate(tol)?;

    let mut shift = vec![S::zero(); dim];
    shift[0] = half * gww;
    for j in 0..n {
        shift[1 + j] = -c[j].clone();
    }
    Ok(ScreenChange {
        fixture,
        transform: p,
        characteristic: wc,
        transversal_shift: shift,
    })
}

/// One order of the Newton-transformation comparison, all in old tangent
/// coordinates:
/// `T_r' - T_r = ΔΘ_r I + A (T_{r-1}' - T_{r-1}) + B(T_{r-1}' ·, N - N') E`.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonStep<S> {
    pub r: usize,
    pub before: Matrix<S>,
    pub after: Matrix<S>,
    /// `(-1)^r (S_r' - S_r)`.
    pub delta_theta: S,
    pub shape_term: Matrix<S>,
    pub correction_term: Matrix<S>,
    /// Largest entry of `T_r' - T_r` minus the three terms.
    pub residual: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScreenChangeReport<S> {
    pub coefficients: Vec<S>,
    pub labels: Vec<String>,
    pub change: ScreenChange<S>,
    pub a_estar_before: Matrix<S>,
    /// `A_E*'` recomputed from the transformed fixture, in old coordinates.
    pub a_estar_after: Matrix<S>,
    /// `A_E* X + B(X, N - N') E`.
    pub a_estar_predicted: Matrix<S>,
    pub uniqueness_residual: S,
    pub steps: Vec<NewtonStep<S>>,
    pub notes: Vec<String>,
}

impl<S: Scalar> ScreenChangeReport<S> {
    pub fn max_step_residual(&self) -> S {
        self.steps.iter().fold(S::zero(), |acc, s| {
            let r = s.residual.abs();
            if r > acc {
                r
            } else {
                acc
            }
        })
    }
}

/// Applies the change, recomputes `A_E*'` from the new fixture and compares
/// both `A_E*'` and every `T_r'` with their predicted decompositions.
pub fn screen_change_report<S: Scalar>(
    f: &FrameFixture<S>,
    c: &[S],
    tol: f64,
) -> Result<ScreenChangeReport<S>, ScreenChangeError> {
    let change = screen_change(f, c, None, tol)?;
    let t = f.tangent_dim();
    let before = induced_geometry(f, tol);
    let after = induced_geometry(&change.fixture, tol);
    let keep: Vec<usize> = (0..t).collect();
    let q = change.transform.principal_submatrix(&keep);
    let q_inv = q.inverse().map_err(|_| ScreenChangeError::Degenerate)?;
    let to_old = |m: &Matrix<S>| q.matmul(m).matmul(&q_inv);

    let a = before.a_estar.entries().clone();
    let a_after_new = after.a_estar.entries().clone();
    let a_after = to_old(&a_after_new);
    let shift = &change.transversal_shift;
    let mut k = Matrix::zeros(t, t);
    for x in 0..t {
        let mut beta = S::zero();
        for y in 0..t {
            beta = beta + before.b[(x, y)].clone() * shift[y].clone();
        }
        k[(0, x)] = beta;
    }
    let predicted = &a + &k;
    let uniqueness_residual = (&a_after - &predicted).max_abs_scalar();

    let fam = NewtonFamily::from_matrix(&a);
    let fam_new = NewtonFamily::from_matrix(&a_after_new);
    let after_t: Vec<Matrix<S>> = (0..=t).map(|r| to_old(&fam_new.transform(r))).collect();
    let steps = (0..=t)
        .map(|r| {
            let before_r = fam.transform(r);
            let after_r = after_t[r].clone();
            if r == 0 {
                let zero = Matrix::zeros(t, t);
                return NewtonStep {
                    r,
                    residual: (&after_r - &before_r).max_abs_scalar(),
                    before: before_r,
                    after: after_r,
                    delta_theta: S::zero(),
                    shape_term: zero.clone(),
                    correction_term: zero,
                };
            }
            let delta_theta = sign::<S>(r) * (fam_new.curvature(r) - fam.curvature(r));
            let prev_diff = &after_t[r - 1] - &fam.transform(r - 1);
            let shape_term = a.matmul(&prev_diff);
            let correction_term = k.matmul(&after_t[r - 1]);
            let rest = &(&(&after_r - &before_r)
                - &Matrix::scalar_identity(t, delta_theta.clone()))
                - &shape_term;
            let residual = (&rest - &correction_term).max_abs_scalar();
            NewtonStep {
                r,
                before: before_r,
                after: after_r,
                delta_theta,
                shape_term,
                correction_term,
                residual,
            }
        })
        .collect();

    let mut notes = Vec::new();
    if f.metric_derivative.is_none() && c.iter().any(|v| !v.is_zero()) {
        notes.push(
            "fixture supplies no metric derivatives; derivatives of the new frame coefficients are taken as zero"
                .to_string(),
        );
    }
    if !before.xi_b.is_zero() {
        notes.push("b is nonzero; the uniqueness relation omits the b g(X, W) E term".to_string());
    }
    Ok(ScreenChangeReport {
        coefficients: c.to_vec(),
        labels: f.tangent_labels(),
        change,
        a_estar_before: a,
        a_estar_after: a_after,
        a_estar_predicted: predicted,
        uniqueness_residual,
        steps,
        notes,
    })
}
