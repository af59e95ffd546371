//! Relations between the two shape operators of a screen almost conformal
//! submanifold, `A_N = φ A_E* - a I`, under either spectrum convention.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::Matrix;
use crate::newton::{NewtonError, NewtonFamily, Operator};
use crate::scalar::{binomial, sign, Scalar};
use crate::symfun::{sigma_of, Spectrum};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SacError {
    #[error("conformal factor φ must be nonzero")]
    ZeroPhi,
    #[error("the spectrum or operator has no radical slot")]
    MissingRadical,
    #[error("the screen has no directions")]
    EmptyScreen,
    #[error("order {r} outside 1..={n}")]
    OrderOutOfRange { r: usize, n: usize },
    #[error(transparent)]
    Newton(#[from] NewtonError),
}

/// Whether the radical direction is counted when forming curvatures of `A_N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SpectrumConvention {
    /// Tangent space including the radical direction (`n + 1` eigenvalues,
    /// the radical one being `-a` for `A_N`).
    #[serde(rename = "full")]
    Full,
    /// Screen directions only (`n` eigenvalues).
    #[serde(rename = "screen")]
    ScreenOnly,
}

impl SpectrumConvention {
    pub const ALL: [SpectrumConvention; 2] =
        [SpectrumConvention::Full, SpectrumConvention::ScreenOnly];

    pub fn name(self) -> &'static str {
        match self {
            SpectrumConvention::Full => "full",
            SpectrumConvention::ScreenOnly => "screen",
        }
    }
}

impl std::fmt::Display for SpectrumConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// The conformal pair `(φ, a)` with the active spectrum convention.
#[derive(Debug, Clone, PartialEq)]
pub struct SacParams<S> {
    phi: S,
    a: S,
    convention: SpectrumConvention,
}

impl<S: Scalar> SacParams<S> {
    pub fn new(phi: S, a: S, convention: SpectrumConvention) -> Result<Self, SacError> {
        if phi.is_zero() {
            return Err(SacError::ZeroPhi);
        }
        Ok(Self { phi, a, convention })
    }

    pub fn phi(&self) -> &S {
        &self.phi
    }

    pub fn a(&self) -> &S {
        &self.a
    }

    pub fn convention(&self) -> SpectrumConvention {
        self.convention
    }

    pub fn with_convention(&self, convention: SpectrumConvention) -> Self {
        Self {
            convention,
            ..self.clone()
        }
    }
}

/// Eigenvalues of `A_N` from those of `A_E*`: the radical slot maps to `-a`
/// (kept only under [`SpectrumConvention::Full`]) and every other `κ` to
/// `φ κ - a`. The result has no radical slot.
pub fn transform_spectrum<S: Scalar>(
    kstar: &Spectrum<S>,
    p: &SacParams<S>,
) -> Result<Spectrum<S>, SacError> {
    let slot = kstar.radical_slot().ok_or(SacError::MissingRadical)?;
    let values: Vec<S> = kstar
        .values()
        .iter()
        .enumerate()
        .filter_map(|(i, k)| {
            if i == slot {
                (p.convention == SpectrumConvention::Full).then(|| -p.a.clone())
            } else {
                Some(p.phi.clone() * k.clone() - p.a.clone())
            }
        })
        .collect();
    Spectrum::plain(values).map_err(|_| SacError::EmptyScreen)
}

fn screen_dim<S: Scalar>(kstar: &Spectrum<S>) -> Result<usize, SacError> {
    kstar.radical_slot().ok_or(SacError::MissingRadical)?;
    Ok(kstar.len() - 1)
}

/// Residual of `S_1 = φ S_1* - a n` under the active convention.
pub fn s1_relation<S: Scalar>(kstar: &Spectrum<S>, p: &SacParams<S>) -> Result<S, SacError> {
    let n = screen_dim(kstar)?;
    let s1 = sigma_of(transform_spectrum(kstar, p)?.values(), 1);
    let s1_star = sigma_of(kstar.values(), 1);
    Ok(s1 - (p.phi.clone() * s1_star - p.a.clone() * S::from_i64(n as i64)))
}

/// `S_r(A_N) - φ^r S_r*` from the spectrum, under the active convention.
pub fn j_operational<S: Scalar>(
    kstar: &Spectrum<S>,
    r: usize,
    p: &SacParams<S>,
) -> Result<S, SacError> {
    let s_r = sigma_of(transform_spectrum(kstar, p)?.values(), r);
    Ok(s_r - p.phi.powi(r as u32) * sigma_of(kstar.values(), r))
}

/// Closed form for `J_r*`, summing over `r`-subsets of the screen indices:
/// `C(n,r)(-a)^r + Σ_subsets Σ_{j=1}^{r-1} (-1)^{r+j} e_j(κ_sel) a^{r-j} φ^j`.
pub fn j_closed<S: Scalar>(kstar: &Spectrum<S>, r: usize, p: &SacParams<S>) -> Result<S, SacError> {
    let n = screen_dim(kstar)?;
    if r == 0 || r > n {
        return Err(SacError::OrderOutOfRange { r, n });
    }
    let screen = kstar.screen_values();
    let mut total = binomial::<S>(n, r) * sign::<S>(r) * p.a.powi(r as u32);
    for_each_subset(n, r, &mut |subset| {
        let selected: Vec<S> = subset.iter().map(|&i| screen[i].clone()).collect();
        for j in 1..r {
            let term = sigma_of(&selected, j) * p.a.powi((r - j) as u32) * p.phi.powi(j as u32);
            total = total.clone() + sign::<S>(r + j) * term;
        }
    });
    Ok(total)
}

fn for_each_subset(n: usize, r: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == r {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < r - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, r, cur, f);
            cur.pop();
        }
    }
    rec(0, n, r, &mut Vec::with_capacity(r), f);
}

/// How `𝒩_r*` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NRoute {
    /// `T_r(A_N) - φ^r T_r*`.
    Operational,
    /// The binomial closed form in powers of `φ A_E*` and `a I`.
    Closed,
    /// The recurrence started from `𝒩_1* = a n I`.
    Recursive,
}

/// Newton data of `A_E*` and `A_N` on one convention's domain.
#[derive(Debug, Clone)]
pub struct ConventionData<S> {
    pub convention: SpectrumConvention,
    /// Number of screen directions.
    pub n: usize,
    pub phi: S,
    pub a: S,
    pub a_estar: NewtonFamily<S>,
    pub a_n: NewtonFamily<S>,
}

impl<S: Scalar> ConventionData<S> {
    /// Restricts `A_E*` to the convention's domain and forms
    /// `A_N = φ A_E* - a I` there.
    pub fn new(a_estar: &Operator<S>, p: &SacParams<S>) -> Result<Self, SacError> {
        if a_estar.radical_slot().is_none() {
            return Err(SacError::MissingRadical);
        }
        let n = a_estar.dim() - 1;
        let domain = match p.convention {
            SpectrumConvention::Full => a_estar.entries().clone(),
            SpectrumConvention::ScreenOnly => a_estar.screen_restriction().entries().clone(),
        };
        let a_n = a_n_matrix(&domain, p.phi(), p.a());
        Ok(Self {
            convention: p.convention,
            n,
            phi: p.phi.clone(),
            a: p.a.clone(),
            a_estar: NewtonFamily::from_matrix(&domain),
            a_n: NewtonFamily::from_matrix(&a_n),
        })
    }

    pub fn domain_dim(&self) -> usize {
        self.a_estar.dim()
    }

    pub fn s_star(&self, r: usize) -> S {
        self.a_estar.curvature(r)
    }

    pub fn s(&self, r: usize) -> S {
        self.a_n.curvature(r)
    }

    /// `J_r* = S_r - φ^r S_r*` on this domain (zero for `r = 0`).
    pub fn j(&self, r: usize) -> S {
        self.s(r) - self.phi.powi(r as u32) * self.s_star(r)
    }

    pub fn t_star(&self, r: usize) -> Matrix<S> {
        self.a_estar.transform(r)
    }

    pub fn t(&self, r: usize) -> Matrix<S> {
        self.a_n.transform(r)
    }

    /// `𝒩_r*` by the requested route; `𝒩_0* = 0`.
    pub fn n_star(&self, r: usize, route: NRoute) -> Matrix<S> {
        match route {
            NRoute::Operational => self.n_operational(r),
            NRoute::Closed => self.n_closed(r),
            NRoute::Recursive => self.n_recursive(r),
        }
    }

    fn n_operational(&self, r: usize) -> Matrix<S> {
        &self.t(r) - &self.t_star(r).scale(&self.phi.powi(r as u32))
    }

    fn n_closed(&self, r: usize) -> Matrix<S> {
        let m = self.domain_dim();
        let a = &self.a_estar.source;
        let phi_a = a.scale(&self.phi);
        let phi_a_pow = phi_a.powers(r);
        let a_n_pow = a_n_matrix(a, &self.phi, &self.a).powers(r);
        let binomial_tail = |len: usize, from: usize| {
            let mut acc = Matrix::zeros(m, m);
            for k in from..=len {
                let coeff = sign::<S>(k) * binomial::<S>(len, k) * self.a.powi(k as u32);
                acc = &acc + &phi_a_pow[len - k].scale(&coeff);
            }
            acc
        };
        let mut out = binomial_tail(r, 1);
        for alpha in 1..=r {
            let sgn = sign::<S>(alpha);
            let j_term = a_n_pow[r - alpha].scale(&(sgn.clone() * self.j(alpha)));
            let s_coeff = sgn * self.phi.powi(alpha as u32) * self.s_star(alpha);
            let s_term = binomial_tail(r - alpha, 1).scale(&s_coeff);
            out = &(&out + &j_term) + &s_term;
        }
        out
    }

    fn n_recursive(&self, r: usize) -> Matrix<S> {
        let m = self.domain_dim();
        if r == 0 {
            return Matrix::zeros(m, m);
        }
        let a = &self.a_estar.source;
        let mut cur = Matrix::scalar_identity(m, self.a.clone() * S::from_i64(self.n as i64));
        for k in 2..=r {
            let base = Matrix::scalar_identity(m, sign::<S>(k) * self.j(k));
            let t_prev = self
                .t_star(k - 1)
                .scale(&(self.a.clone() * self.phi.powi((k - 1) as u32)));
            let shifted = a.matmul(&cur).scale(&self.phi);
            cur = &(&(&base - &t_prev) - &cur.scale(&self.a)) + &shifted;
        }
        cur
    }
}

/// `φ A - a I`.
pub fn a_n_matrix<S: Scalar>(a_estar: &Matrix<S>, phi: &S, a: &S) -> Matrix<S> {
    &a_estar.scale(phi) - &Matrix::scalar_identity(a_estar.rows(), a.clone())
}

/// `𝒩_r*` of `A_E*` under `p` by the given route.
pub fn n_star<S: Scalar>(
    a_estar: &Operator<S>,
    r: usize,
    p: &SacParams<S>,
    route: NRoute,
    tol: f64,
) -> Result<Matrix<S>, SacError> {
    a_estar.check_self_adjoint(tol)?;
    if r == 0 {
        return Err(SacError::OrderOutOfRange {
            r,
            n: a_estar.dim(),
        });
    }
    Ok(ConventionData::new(a_estar, p)?.n_star(r, route))
}

/// Identities relating `A_N` to `A_E*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SacIdentity {
    /// `S_1 = φ S_1* - a n`.
    S1Relation,
    /// Closed-form `J_r*` against `S_r - φ^r S_r*`.
    JClosedForm,
    /// Closed-form `𝒩_r*` against `T_r - φ^r T_r*`.
    CorrectionClosedForm,
    /// Recurrence for `𝒩_r*` (base `a n I`) against `T_r - φ^r T_r*`.
    CorrectionRecurrence,
    /// `tr T_r = φ^r tr T_r* + (-1)^r (n+1-r) J_r*`.
    TraceNewtonSplit,
    /// `tr(A_N T_{r-1}) = φ^r tr(A_E* T*_{r-1}) + (-1)^{r-1} r J_r*`.
    TraceShapeSplit,
    /// `tr(A_N² T_{r-1}) = φ^{r+1} tr(A_E*² T*_{r-1}) + (-1)^r {φ S_1* J_r*
    /// - a n φ^r S_r* - a n J_r* + (r+1) J_{r+1}*}`.
    TraceShapeSquaredSplit,
    /// `tr 𝒩_r* = (-1)^r (n+1-r) J_r*`.
    CorrectionTrace,
    /// `tr(A_E* 𝒩_{r-1}*) = (-1)^{r-1} φ^{-1} {r J_r* + a(n+2-r)(φ^{r-1}
    /// S_{r-1}* + J_{r-1}*)}` for `r >= 2`.
    CorrectionShapeTrace,
    /// `tr(A_E*² 𝒩_{r-1}*) = φ^{-1} tr(A_E* 𝒩_r*) - a φ^{-1} tr(A_E*
    /// 𝒩_{r-1}*) + a φ^{r-2} tr(A_E* T*_{r-1}) + φ^{-1} (-1)^{r-1} J_r* S_1*`
    /// for `r >= 2`.
    CorrectionShapeSquaredTrace,
}

impl SacIdentity {
    /// Stable identifier used in reports.
    pub fn key(self) -> &'static str {
        match self {
            SacIdentity::S1Relation => "s1_relation",
            SacIdentity::JClosedForm => "j_closed_form",
            SacIdentity::CorrectionClosedForm => "correction_closed_form",
            SacIdentity::CorrectionRecurrence => "correction_recurrence",
            SacIdentity::TraceNewtonSplit => "trace_newton_split",
            SacIdentity::TraceShapeSplit => "trace_shape_split",
            SacIdentity::TraceShapeSquaredSplit => "trace_shape_squared_split",
            SacIdentity::CorrectionTrace => "correction_trace",
            SacIdentity::CorrectionShapeTrace => "correction_shape_trace",
            SacIdentity::CorrectionShapeSquaredTrace => "correction_shape_squared_trace",
        }
    }

    /// What the residual is known to be, given the convention and whether
    /// `a = 0` (in which case every correction term vanishes).
    pub fn expectation<S: Scalar>(self, convention: SpectrumConvention, a: &S) -> Expectation<S> {
        use SacIdentity::*;
        use SpectrumConvention::*;
        if a.is_zero() {
            return Expectation::Zero;
        }
        match (self, convention) {
            (S1Relation, ScreenOnly) => Expectation::Zero,
            (S1Relation, Full) => Expectation::Value(-a.clone()),
            (JClosedForm, ScreenOnly) => Expectation::Zero,
            (CorrectionClosedForm, _) => Expectation::Zero,
            (CorrectionRecurrence, Full) => Expectation::Zero,
            (TraceNewtonSplit, Full) => Expectation::Zero,
            (TraceShapeSplit, _) => Expectation::Zero,
            (CorrectionTrace, Full) => Expectation::Zero,
            (CorrectionShapeTrace, Full) => Expectation::Zero,
            _ => Expectation::Audit,
        }
    }
}

/// The known value of a residual.
#[derive(Debug, Clone, PartialEq)]
pub enum Expectation<S> {
    Zero,
    /// A documented nonzero value.
    Value(S),
    /// No claim; the residual is reported for inspection.
    Audit,
}

impl<S: Scalar> Expectation<S> {
    /// `Some(true/false)` for checked expectations, `None` for audits.
    pub fn check(&self, residual: &S, scale: f64, tol: f64) -> Option<bool> {
        match self {
            Expectation::Zero => Some(residual.is_negligible(scale, tol)),
            Expectation::Value(v) => Some((residual.clone() - v.clone()).is_negligible(scale, tol)),
            Expectation::Audit => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Expectation::Zero => "zero",
            Expectation::Value(_) => "value",
            Expectation::Audit => "audit",
        }
    }
}

/// One identity evaluated at one order under one convention.
#[derive(Debug, Clone)]
pub struct SacRow<S> {
    pub identity: SacIdentity,
    pub convention: SpectrumConvention,
    pub r: usize,
    /// For operator identities the largest absolute entry of the difference.
    pub residual: S,
    pub expectation: Expectation<S>,
    /// Magnitude used for relative float comparisons.
    pub scale: f64,
}

impl<S: Scalar> SacRow<S> {
    pub fn holds(&self, tol: f64) -> Option<bool> {
        self.expectation.check(&self.residual, self.scale, tol)
    }
}

/// Per-order curvature data under one convention.
#[derive(Debug, Clone)]
pub struct SacRecord<S> {
    pub r: usize,
    pub s_star: S,
    pub s: S,
    pub j_operational: S,
    /// `None` when the closed form is undefined (no diagonal spectrum given).
    pub j_closed: Option<S>,
    pub trace_correction: S,
}

#[derive(Debug, Clone)]
pub struct SacReport<S> {
    pub convention: SpectrumConvention,
    pub records: Vec<SacRecord<S>>,
    pub rows: Vec<SacRow<S>>,
}

fn entry_scale<S: Scalar>(ms: &[&Matrix<S>]) -> f64 {
    ms.iter().map(|m| m.max_abs()).fold(1.0, f64::max)
}

fn scalar_scale<S: Scalar>(xs: &[&S]) -> f64 {
    xs.iter().map(|x| x.abs().to_f64()).fold(1.0, f64::max)
}

/// Evaluates every relation for orders `1..=n` under `p`'s convention.
///
/// `kstar` supplies the screen eigenvalues for the closed-form `J_r*`; when it
/// is `None` those rows are omitted. No self-adjointness check is made so
/// that non-diagonalizable fixtures can still be audited.
pub fn sac_report<S: Scalar>(
    a_estar: &Operator<S>,
    kstar: Option<&Spectrum<S>>,
    p: &SacParams<S>,
) -> Result<SacReport<S>, SacError> {
    let data = ConventionData::new(a_estar, p)?;
    let conv = p.convention;
    let n = data.n;
    let phi = &data.phi;
    let a = &data.a;
    let a_mat = data.a_estar.source.clone();
    let a2 = a_mat.matmul(&a_mat);
    let a_n = data.a_n.source.clone();
    let a_n2 = a_n.matmul(&a_n);
    let n_op: Vec<Matrix<S>> = (0..=n + 1)
        .map(|r| data.n_star(r, NRoute::Operational))
        .collect();
    let mut rows = Vec::new();
    let mut records = Vec::new();
    let mut push = |identity: SacIdentity, r: usize, residual: S, scale: f64| {
        rows.push(SacRow {
            identity,
            convention: conv,
            r,
            expectation: identity.expectation(conv, a),
            residual,
            scale,
        });
    };
    if let Some(k) = kstar {
        let res = s1_relation(k, p)?;
        push(
            SacIdentity::S1Relation,
            1,
            res,
            scalar_scale(&[phi, a]) * (n as f64 + 1.0),
        );
    }
    for r in 1..=n {
        let rs = S::from_i64(r as i64);
        let j = data.j(r);
        let j_closed = match kstar {
            Some(k) => Some(j_closed(k, r, p)?),
            None => None,
        };
        if let Some(jc) = &j_closed {
            push(
                SacIdentity::JClosedForm,
                r,
                jc.clone() - j.clone(),
                scalar_scale(&[jc, &j]),
            );
        }
        let closed = data.n_star(r, NRoute::Closed);
        push(
            SacIdentity::CorrectionClosedForm,
            r,
            (&closed - &n_op[r]).max_abs_scalar(),
            entry_scale(&[&closed, &n_op[r]]),
        );
        let rec = data.n_star(r, NRoute::Recursive);
        push(
            SacIdentity::CorrectionRecurrence,
            r,
            (&rec - &n_op[r]).max_abs_scalar(),
            entry_scale(&[&rec, &n_op[r]]),
        );

        let phir = phi.powi(r as u32);
        let t_prev = data.t(r - 1);
        let ts_prev = data.t_star(r - 1);
        let n_plus_1_minus_r = S::from_i64(n as i64 + 1 - r as i64);

        let lhs = data.t(r).trace();
        let rhs = phir.clone() * data.t_star(r).trace()
            + sign::<S>(r) * n_plus_1_minus_r.clone() * j.clone();
        push(
            SacIdentity::TraceNewtonSplit,
            r,
            lhs.clone() - rhs.clone(),
            scalar_scale(&[&lhs, &rhs]),
        );

        let lhs = a_n.matmul(&t_prev).trace();
        let rhs = phir.clone() * a_mat.matmul(&ts_prev).trace()
            + sign::<S>(r - 1) * rs.clone() * j.clone();
        push(
            SacIdentity::TraceShapeSplit,
            r,
            lhs.clone() - rhs.clone(),
            scalar_scale(&[&lhs, &rhs]),
        );

        let an = a.clone() * S::from_i64(n as i64);
        let lhs = a_n2.matmul(&t_prev).trace();
        let bracket = phi.clone() * data.s_star(1) * j.clone()
            - an.clone() * phir.clone() * data.s_star(r)
            - an * j.clone()
            + S::from_i64((r + 1) as i64) * data.j(r + 1);
        let rhs = phi.powi(r as u32 + 1) * a2.matmul(&ts_prev).trace() + sign::<S>(r) * bracket;
        push(
            SacIdentity::TraceShapeSquaredSplit,
            r,
            lhs.clone() - rhs.clone(),
            scalar_scale(&[&lhs, &rhs]),
        );

        let lhs = n_op[r].trace();
        let rhs = sign::<S>(r) * n_plus_1_minus_r * j.clone();
        push(
            SacIdentity::CorrectionTrace,
            r,
            lhs.clone() - rhs.clone(),
            scalar_scale(&[&lhs, &rhs]),
        );

        if r >= 2 {
            let phi_inv = S::one() / phi.clone();
            let lhs = a_mat.matmul(&n_op[r - 1]).trace();
            let inner = rs.clone() * j.clone()
                + a.clone()
                    * S::from_i64(n as i64 + 2 - r as i64)
                    * (phi.powi(r as u32 - 1) * data.s_star(r - 1) + data.j(r - 1));
            let rhs = sign::<S>(r - 1) * phi_inv.clone() * inner;
            push(
                SacIdentity::CorrectionShapeTrace,
                r,
                lhs.clone() - rhs.clone(),
                scalar_scale(&[&lhs, &rhs]),
            );

            let lhs = a2.matmul(&n_op[r - 1]).trace();
            let rhs = phi_inv.clone() * a_mat.matmul(&n_op[r]).trace()
                - a.clone() * phi_inv.clone() * a_mat.matmul(&n_op[r - 1]).trace()
                + a.clone() * phi.powi(r as u32 - 2) * a_mat.matmul(&ts_prev).trace()
                + phi_inv * sign::<S>(r - 1) * j.clone() * data.s_star(1);
            push(
                SacIdentity::CorrectionShapeSquaredTrace,
                r,
                lhs.clone() - rhs.clone(),
                scalar_scale(&[&lhs, &rhs]),
            );
        }

        records.push(SacRecord {
            r,
            s_star: data.s_star(r),
            s: data.s(r),
            j_operational: j,
            j_closed,
            trace_correction: n_op[r].trace(),
        });
    }
    Ok(SacReport {
        convention: conv,
        records,
        rows,
    })
}

/// `S_r(Full) - S_r(ScreenOnly)` and the matching `J_r*` difference.
#[derive(Debug, Clone)]
pub struct ConventionDiscrepancy<S> {
    pub r: usize,
    pub s_full: S,
    pub s_screen: S,
    pub difference: S,
}

/// Cross-convention curvature differences for `r = 1..=n`. At `r = 1` the
/// difference is exactly `-a`.
pub fn convention_discrepancy<S: Scalar>(
    a_estar: &Operator<S>,
    phi: &S,
    a: &S,
) -> Result<Vec<ConventionDiscrepancy<S>>, SacError> {
    let full = ConventionData::new(
        a_estar,
        &SacParams::new(phi.clone(), a.clone(), SpectrumConvention::Full)?,
    )?;
    let screen = ConventionData::new(
        a_estar,
        &SacParams::new(phi.clone(), a.clone(), SpectrumConvention::ScreenOnly)?,
    )?;
    Ok((1..=full.n)
        .map(|r| {
            let s_full = full.s(r);
            let s_screen = screen.s(r);
            ConventionDiscrepancy {
                r,
                difference: s_full.clone() - s_screen.clone(),
                s_full,
                s_screen,
            }
        })
        .collect())
}
