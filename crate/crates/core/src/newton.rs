//! Newton transformations of a shape operator, their trace identities and
//! the umbilicity/maximality classification.

use thiserror::Error;

use crate::matrix::{Matrix, MatrixError};
use crate::scalar::{lift_exact, sign, Scalar};
use crate::symfun::{elementary_from_power_sums, sigma_deleted_of};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NewtonError {
    #[error("operator is not self-adjoint: g(A e_{j}, e_{i}) = {lhs} but g(e_{j}, A e_{i}) = {rhs} for (i, j) = ({i}, {j})")]
    NotSelfAdjoint {
        i: usize,
        j: usize,
        lhs: String,
        rhs: String,
    },
    #[error("order {r} exceeds operator dimension {dim}")]
    OrderOutOfRange { r: usize, dim: usize },
    #[error("operator and metric shapes disagree: {0}")]
    Shape(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// A square matrix in a frame, together with the frame's Gram matrix.
///
/// The Gram matrix may be degenerate (the radical direction pairs to zero
/// with every tangent vector) and need not be diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator<S> {
    entries: Matrix<S>,
    gram: Matrix<S>,
    radical_slot: Option<usize>,
    labels: Option<Vec<String>>,
}

impl<S: Scalar> Operator<S> {
    pub fn new(entries: Matrix<S>, gram: Matrix<S>) -> Result<Self, NewtonError> {
        if !entries.is_square() {
            return Err(NewtonError::Shape("operator matrix is not square".into()));
        }
        if gram.rows() != entries.rows() || gram.cols() != entries.cols() {
            return Err(NewtonError::Shape(format!(
                "operator is {0}x{0} but metric is {1}x{2}",
                entries.rows(),
                gram.rows(),
                gram.cols()
            )));
        }
        if gram != gram.transpose() {
            return Err(NewtonError::Shape("metric matrix is not symmetric".into()));
        }
        Ok(Self {
            entries,
            gram,
            radical_slot: None,
            labels: None,
        })
    }

    /// Operator whose frame metric is the diagonal `signature` (entries
    /// `±1`, or `0` for a radical direction).
    pub fn with_signature(entries: Matrix<S>, signature: &[i64]) -> Result<Self, NewtonError> {
        let diag: Vec<S> = signature.iter().map(|&s| S::from_i64(s)).collect();
        Self::new(entries, Matrix::diagonal(&diag))
    }

    pub fn with_radical_slot(mut self, slot: usize) -> Self {
        assert!(slot < self.dim(), "radical slot out of range");
        self.radical_slot = Some(slot);
        self
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.dim(), "one label per frame vector");
        self.labels = Some(labels);
        self
    }

    pub fn entries(&self) -> &Matrix<S> {
        &self.entries
    }

    pub fn gram(&self) -> &Matrix<S> {
        &self.gram
    }

    pub fn radical_slot(&self) -> Option<usize> {
        self.radical_slot
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    /// Frame indices other than the radical slot.
    pub fn screen_indices(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| Some(i) != self.radical_slot)
            .collect()
    }

    /// Restriction to the screen directions (principal submatrix without the
    /// radical slot). Returns a clone when there is no radical slot.
    pub fn screen_restriction(&self) -> Self {
        let keep = self.screen_indices();
        Self {
            entries: self.entries.principal_submatrix(&keep),
            gram: self.gram.principal_submatrix(&keep),
            radical_slot: None,
            labels: self
                .labels
                .as_ref()
                .map(|l| keep.iter().map(|&i| l[i].clone()).collect()),
        }
    }

    /// Same frame and metric, different matrix.
    pub fn with_entries(&self, entries: Matrix<S>) -> Self {
        assert_eq!(entries.rows(), self.dim());
        Self {
            entries,
            gram: self.gram.clone(),
            radical_slot: self.radical_slot,
            labels: self.labels.clone(),
        }
    }

    /// First pair `(i, j)` with `g(A e_j, e_i) != g(e_j, A e_i)`, if any.
    pub fn self_adjoint_violation(&self, tol: f64) -> Option<(usize, usize, S, S)> {
        let ga = self.gram.matmul(&self.entries);
        let n = self.dim();
        for i in 0..n {
            for j in i + 1..n {
                if !ga[(i, j)].approx_eq(&ga[(j, i)], tol) {
                    return Some((i, j, ga[(i, j)].clone(), ga[(j, i)].clone()));
                }
            }
        }
        None
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.self_adjoint_violation(tol).is_none()
    }

    pub fn check_self_adjoint(&self, tol: f64) -> Result<(), NewtonError> {
        match self.self_adjoint_violation(tol) {
            None => Ok(()),
            Some((i, j, lhs, rhs)) => Err(NewtonError::NotSelfAdjoint {
                i,
                j,
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            }),
        }
    }
}

/// `[S_0, ..., S_m]` of an `m×m` matrix, from the traces of its powers.
/// Float matrices are evaluated exactly and rounded once.
pub fn curvatures<S: Scalar>(a: &Matrix<S>) -> Vec<S> {
    let entries: Vec<S> = a.iter().cloned().collect();
    lift_exact(
        &entries,
        |q| {
            let exact = Matrix::from_fn(a.rows(), a.cols(), |i, j| q[i * a.cols() + j].clone());
            curvatures_direct(&exact)
        },
        || curvatures_direct(a),
    )
}

fn curvatures_direct<S: Scalar>(a: &Matrix<S>) -> Vec<S> {
    let m = a.rows();
    let mut p = Vec::with_capacity(m);
    let mut pow = a.clone();
    for k in 0..m {
        if k > 0 {
            pow = pow.matmul(a);
        }
        p.push(pow.trace());
    }
    elementary_from_power_sums(&p)
}

/// `Σ_{α=0}^{r} (-1)^α S_α A^{r-α}` using precomputed curvatures.
pub fn newton_direct_matrix<S: Scalar>(a: &Matrix<S>, curv: &[S], r: usize) -> Matrix<S> {
    let powers = a.powers(r);
    let m = a.rows();
    let mut t = Matrix::zeros(m, m);
    for alpha in 0..=r {
        let coeff = sign::<S>(alpha) * curv_at(curv, alpha);
        if coeff.is_zero() {
            continue;
        }
        t = &t + &powers[r - alpha].scale(&coeff);
    }
    t
}

/// `T_0 = I`, `T_r = (-1)^r S_r I + A T_{r-1}`; returns `[T_0, ..., T_r]`.
pub fn newton_recursive_matrices<S: Scalar>(a: &Matrix<S>, curv: &[S], r: usize) -> Vec<Matrix<S>> {
    let m = a.rows();
    let mut out = Vec::with_capacity(r + 1);
    out.push(Matrix::identity(m));
    for k in 1..=r {
        let base = Matrix::scalar_identity(m, sign::<S>(k) * curv_at(curv, k));
        let next = &base + &a.matmul(&out[k - 1]);
        out.push(next);
    }
    out
}

fn curv_at<S: Scalar>(curv: &[S], k: usize) -> S {
    curv.get(k).cloned().unwrap_or_else(S::zero)
}

fn check_order<S: Scalar>(a: &Operator<S>, r: usize) -> Result<(), NewtonError> {
    if r > a.dim() {
        return Err(NewtonError::OrderOutOfRange { r, dim: a.dim() });
    }
    Ok(())
}

/// `T_r` from the closed-form sum over powers of `A`.
pub fn newton_direct<S: Scalar>(
    a: &Operator<S>,
    r: usize,
    tol: f64,
) -> Result<Operator<S>, NewtonError> {
    a.check_self_adjoint(tol)?;
    check_order(a, r)?;
    let curv = curvatures(a.entries());
    Ok(a.with_entries(newton_direct_matrix(a.entries(), &curv, r)))
}

/// `T_r` from the inductive formula.
pub fn newton_recursive<S: Scalar>(
    a: &Operator<S>,
    r: usize,
    tol: f64,
) -> Result<Operator<S>, NewtonError> {
    a.check_self_adjoint(tol)?;
    check_order(a, r)?;
    let curv = curvatures(a.entries());
    let mut all = newton_recursive_matrices(a.entries(), &curv, r);
    Ok(a.with_entries(all.pop().expect("at least T_0")))
}

/// All Newton transformations `T_0, ..., T_m` of one operator.
#[derive(Debug, Clone)]
pub struct NewtonFamily<S> {
    pub source: Matrix<S>,
    pub curvatures: Vec<S>,
    pub transforms: Vec<Matrix<S>>,
}

impl<S: Scalar> NewtonFamily<S> {
    /// Builds the family without a self-adjointness check.
    pub fn from_matrix(a: &Matrix<S>) -> Self {
        let curvatures = curvatures(a);
        let transforms = newton_recursive_matrices(a, &curvatures, a.rows());
        Self {
            source: a.clone(),
            curvatures,
            transforms,
        }
    }

    pub fn build(a: &Operator<S>, tol: f64) -> Result<Self, NewtonError> {
        a.check_self_adjoint(tol)?;
        Ok(Self::from_matrix(a.entries()))
    }

    pub fn dim(&self) -> usize {
        self.source.rows()
    }

    /// `T_r`, or the zero matrix past the dimension.
    pub fn transform(&self, r: usize) -> Matrix<S> {
        self.transforms
            .get(r)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.dim(), self.dim()))
    }

    pub fn curvature(&self, r: usize) -> S {
        curv_at(&self.curvatures, r)
    }
}

/// The three algebraic trace identities satisfied by every `T_r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TraceIdentity {
    /// `tr T_r = (-1)^r (m - r) S_r`.
    TraceNewton,
    /// `tr(A T_{r-1}) = (-1)^{r-1} r S_r`.
    TraceShapeNewton,
    /// `tr(A² T_{r-1}) = (-1)^r (-S_1 S_r + (r+1) S_{r+1})`.
    TraceShapeSquaredNewton,
}

#[derive(Debug, Clone)]
pub struct TraceRow<S> {
    pub r: usize,
    pub identity: TraceIdentity,
    pub lhs: S,
    pub rhs: S,
    pub residual: S,
}

/// Residuals of the three trace identities for `r = 1..=m` (the first identity
/// also at `r = 0`). Does not check self-adjointness.
pub fn trace_identities_matrix<S: Scalar>(a: &Matrix<S>) -> Vec<TraceRow<S>> {
    let fam = NewtonFamily::from_matrix(a);
    let m = fam.dim();
    let a2 = a.matmul(a);
    let mut rows = Vec::new();
    let mk = |r, identity, lhs: S, rhs: S| TraceRow {
        r,
        identity,
        residual: lhs.clone() - rhs.clone(),
        lhs,
        rhs,
    };
    for r in 0..=m {
        let lhs = fam.transform(r).trace();
        let rhs = sign::<S>(r) * S::from_i64((m - r) as i64) * fam.curvature(r);
        rows.push(mk(r, TraceIdentity::TraceNewton, lhs, rhs));
        if r == 0 {
            continue;
        }
        let t_prev = fam.transform(r - 1);
        let lhs = a.matmul(&t_prev).trace();
        let rhs = sign::<S>(r - 1) * S::from_i64(r as i64) * fam.curvature(r);
        rows.push(mk(r, TraceIdentity::TraceShapeNewton, lhs, rhs));
        let lhs = a2.matmul(&t_prev).trace();
        let rhs = sign::<S>(r)
            * (S::from_i64((r + 1) as i64) * fam.curvature(r + 1)
                - fam.curvature(1) * fam.curvature(r));
        rows.push(mk(r, TraceIdentity::TraceShapeSquaredNewton, lhs, rhs));
    }
    rows
}

pub fn trace_identities<S: Scalar>(
    a: &Operator<S>,
    tol: f64,
) -> Result<Vec<TraceRow<S>>, NewtonError> {
    a.check_self_adjoint(tol)?;
    Ok(trace_identities_matrix(a.entries()))
}

/// `T_r v - (-1)^r S_r^{β} v` for an eigenvector `v` of `A` whose eigenvalue
/// sits at index `beta` of `spectrum`.
pub fn eigen_action_residual<S: Scalar>(
    t_r: &Matrix<S>,
    r: usize,
    spectrum: &[S],
    beta: usize,
    v: &[S],
) -> Vec<S> {
    let factor = sign::<S>(r) * sigma_deleted_of(spectrum, r, beta);
    t_r.mul_vec(v)
        .into_iter()
        .zip(v)
        .map(|(tv, vi)| tv - factor.clone() * vi.clone())
        .collect()
}

/// Derivative at node 0 of the interpolating polynomial through the nodes
/// `t + k h`, `k = -p..=p`, as weights on those nodes (ordered by `k`).
pub fn stencil_weights<S: Scalar>(h: &S, p: usize) -> Vec<S> {
    let ks: Vec<i64> = (-(p as i64)..=p as i64).collect();
    let x = |k: i64| S::from_i64(k) * h.clone();
    ks.iter()
        .map(|&k| {
            if k == 0 {
                ks.iter()
                    .filter(|&&j| j != 0)
                    .fold(S::zero(), |acc, &j| acc + S::one() / (S::zero() - x(j)))
            } else {
                let num = ks
                    .iter()
                    .filter(|&&j| j != 0 && j != k)
                    .fold(S::one(), |acc, &j| acc * (S::zero() - x(j)));
                let den = ks
                    .iter()
                    .filter(|&&j| j != k)
                    .fold(S::one(), |acc, &j| acc * (x(k) - x(j)));
                num / den
            }
        })
        .collect()
}

/// Both sides of `tr(T_{r-1} A'(t)) = (-1)^{r-1} d/dt S_r(A(t))` at one step.
#[derive(Debug, Clone)]
pub struct DerivativeSides<S> {
    pub lhs: S,
    pub rhs: S,
}

impl<S: Scalar> DerivativeSides<S> {
    pub fn residual(&self) -> S {
        self.lhs.clone() - self.rhs.clone()
    }
}

/// Evaluates both sides with a `(2p+1)`-point stencil of step `h` around `t`.
pub fn derivative_sides<S: Scalar>(
    family: &dyn Fn(&S) -> Matrix<S>,
    t: &S,
    r: usize,
    h: &S,
    p: usize,
) -> DerivativeSides<S> {
    assert!(r >= 1, "order must be at least 1");
    let weights = stencil_weights(h, p);
    let a_t = family(t);
    let m = a_t.rows();
    let mut a_dot = Matrix::zeros(m, m);
    let mut s_dot = S::zero();
    for (idx, w) in weights.iter().enumerate() {
        let k = idx as i64 - p as i64;
        let node = t.clone() + S::from_i64(k) * h.clone();
        let a_node = if k == 0 { a_t.clone() } else { family(&node) };
        s_dot = s_dot + w.clone() * curv_at(&curvatures(&a_node), r);
        a_dot = &a_dot + &a_node.scale(w);
    }
    let fam = NewtonFamily::from_matrix(&a_t);
    DerivativeSides {
        lhs: fam.transform(r - 1).matmul(&a_dot).trace(),
        rhs: sign::<S>(r - 1) * s_dot,
    }
}

/// Float check with central differences at `h = 1e-4 max(1, |t|)` and `h/2`.
#[derive(Debug, Clone)]
pub struct FloatDerivativeCheck {
    pub residual_h: f64,
    pub residual_half_h: f64,
    /// Residual of the Richardson-extrapolated sides `(4 D(h/2) - D(h)) / 3`.
    pub residual_richardson: f64,
    pub h: f64,
}

pub fn derivative_identity_float(
    family: &dyn Fn(&f64) -> Matrix<f64>,
    t: f64,
    r: usize,
) -> FloatDerivativeCheck {
    let h = 1e-4 * t.abs().max(1.0);
    let coarse = derivative_sides(family, &t, r, &h, 1);
    let fine = derivative_sides(family, &t, r, &(h / 2.0), 1);
    let extrap = |c: f64, f: f64| (4.0 * f - c) / 3.0;
    FloatDerivativeCheck {
        residual_h: coarse.residual().abs(),
        residual_half_h: fine.residual().abs(),
        residual_richardson: (extrap(coarse.lhs, fine.lhs) - extrap(coarse.rhs, fine.rhs)).abs(),
        h,
    }
}

/// Exact check for polynomial families whose entries have degree at most
/// `entry_degree` in `t`. The stencil is wide enough to differentiate
/// `S_r(A(t))` (degree `r * entry_degree`) exactly, so the residual is zero
/// at every step `h` when the identity holds.
pub fn derivative_identity_exact<S: Scalar>(
    family: &dyn Fn(&S) -> Matrix<S>,
    t: &S,
    r: usize,
    entry_degree: usize,
    h: &S,
) -> S {
    let p = (r * entry_degree).div_ceil(2).max(1);
    derivative_sides(family, t, r, h, p).residual()
}

/// Per-order classification flags, indexed by `r - 1` for `r = 1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub r_maximal: Vec<bool>,
    /// `None` when the operator is not self-adjoint (the test relies on
    /// diagonalizability).
    pub r_umbilical: Option<Vec<bool>>,
}

/// `r`-maximal iff `S_r = 0`; `r`-umbilical iff `T_r` acts as a scalar on the
/// screen directions, which for a diagonalizable operator means all deleted
/// functions `S_r^{i}` over screen indices coincide. Orders run over
/// `1..=n`, where `n` is the number of screen directions.
pub fn classify<S: Scalar>(a: &Operator<S>, tol: f64) -> Classification {
    let fam = NewtonFamily::from_matrix(a.entries());
    let screen = a.screen_indices();
    let n = screen.len();
    let scale = fam
        .curvatures
        .iter()
        .map(|c| c.abs().to_f64())
        .fold(1.0, f64::max);
    let r_maximal = (1..=n)
        .map(|r| fam.curvature(r).is_negligible(scale, tol))
        .collect();
    let r_umbilical = a.is_self_adjoint(tol).then(|| {
        (1..=n)
            .map(|r| {
                let block = fam.transform(r).principal_submatrix(&screen);
                let lead = block.diag().first().cloned().unwrap_or_else(S::zero);
                let target = Matrix::scalar_identity(n, lead);
                block.approx_eq(&target, tol)
            })
            .collect()
    });
    Classification {
        r_maximal,
        r_umbilical,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    fn example_operator() -> Operator<Rational> {
        let d: Vec<Rational> = [0, 1, 1, 1, 0, 0, 0].iter().map(|&x| q(x)).collect();
        Operator::with_signature(Matrix::diagonal(&d), &[0, 1, 1, 1, 1, 1, 1])
            .unwrap()
            .with_radical_slot(0)
    }

    #[test]
    fn first_newton_transform_of_example() {
        let a = example_operator();
        let t1 = newton_direct(&a, 1, 0.0).unwrap();
        let expected: Vec<Rational> = [-3, -2, -2, -2, -3, -3, -3].iter().map(|&x| q(x)).collect();
        assert_eq!(t1.entries(), &Matrix::diagonal(&expected));
        assert_eq!(t1.entries().trace(), q(-18));
        for r in 0..=7 {
            assert_eq!(
                newton_direct(&a, r, 0.0).unwrap(),
                newton_recursive(&a, r, 0.0).unwrap()
            );
        }
    }

    #[test]
    fn classification_of_example() {
        let c = classify(&example_operator(), 0.0);
        assert_eq!(c.r_maximal, vec![false, false, false, true, true, true]);
        let umb = c.r_umbilical.unwrap();
        assert_eq!(umb.len(), 6);
    }

    #[test]
    fn scalar_operator_is_umbilical() {
        let a = Operator::with_signature(Matrix::scalar_identity(4, q(5)), &[1, -1, 1, 1]).unwrap();
        let c = classify(&a, 0.0);
        assert!(c.r_umbilical.unwrap().iter().all(|&u| u));
    }

    #[test]
    fn non_self_adjoint_is_rejected_with_pair() {
        let m = Matrix::from_rows(vec![vec![q(0), q(1)], vec![q(0), q(0)]]).unwrap();
        let a = Operator::with_signature(m, &[1, 1]).unwrap();
        match newton_direct(&a, 1, 0.0) {
            Err(NewtonError::NotSelfAdjoint { i: 0, j: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn stencil_weights_are_central_difference() {
        let w = stencil_weights(&Rational::from_ratio(1, 10), 1);
        assert_eq!(w, vec![q(-5), q(0), q(5)]);
    }
}
