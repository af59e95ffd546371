//! Scalar evaluators for the divergence-based theorems. Directional
//! derivatives along `E` and all traces are caller-supplied.

use thiserror::Error;

use crate::matrix::Matrix;
use crate::newton::NewtonFamily;
use crate::sacrel::{ConventionData, NRoute};
use crate::scalar::{sign, Scalar};
use crate::symfun::{sigma_of, squared_deleted_sum};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdentityError {
    #[error("this relation assumes ξ lies in the screen (a = 0), got a = {0}")]
    XiNotInScreen(String),
    #[error("this relation needs the screen spectrum")]
    MissingSpectrum,
    #[error("order must be at least 1")]
    OrderZero,
}

/// Pointwise data for one order `r`. Traces refer to order `r - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremInputs<S> {
    pub r: usize,
    /// Number of screen directions.
    pub n: usize,
    pub a: S,
    pub phi: S,
    /// Constant curvature of the leaf.
    pub c: S,
    pub tau_e: S,
    /// `E(S_r*)`.
    pub e_s_rstar: S,
    /// `E(φ^r)`.
    pub e_phi_r: S,
    /// `E(J_r*)`.
    pub e_j_rstar: S,
    /// `tr T*_{r-1}`.
    pub tr_t: S,
    /// `tr 𝒩*_{r-1}`.
    pub tr_n: S,
    /// `tr(A_E* T*_{r-1})`.
    pub tr_a_t: S,
    /// `tr(A_E* 𝒩*_{r-1})`.
    pub tr_a_n: S,
    /// `tr(A_E*² T*_{r-1})`.
    pub tr_a2_t: S,
    /// `tr(A_E*² 𝒩*_{r-1})`.
    pub tr_a2_n: S,
    pub s1_star: S,
    pub sr_star: S,
    pub jr_star: S,
    /// Screen eigenvalues `κ_1*, ..., κ_n*` when known.
    pub kstar: Option<Vec<S>>,
}

impl<S: Scalar> TheoremInputs<S> {
    /// All-zero inputs at order `r` with `φ = 1`.
    pub fn zero(r: usize, n: usize) -> Self {
        let z = S::zero;
        Self {
            r,
            n,
            a: z(),
            phi: S::one(),
            c: z(),
            tau_e: z(),
            e_s_rstar: z(),
            e_phi_r: z(),
            e_j_rstar: z(),
            tr_t: z(),
            tr_n: z(),
            tr_a_t: z(),
            tr_a_n: z(),
            tr_a2_t: z(),
            tr_a2_n: z(),
            s1_star: z(),
            sr_star: z(),
            jr_star: z(),
            kstar: None,
        }
    }

    /// Fills every trace and curvature from one convention's Newton data;
    /// derivatives, `τ(E)` and `c` start at zero.
    pub fn from_convention(data: &ConventionData<S>, r: usize) -> Result<Self, IdentityError> {
        if r == 0 {
            return Err(IdentityError::OrderZero);
        }
        let a_mat = &data.a_estar.source;
        let a2 = a_mat.matmul(a_mat);
        let t_prev = data.t_star(r - 1);
        let n_prev = data.n_star(r - 1, NRoute::Operational);
        let mut inp = Self::zero(r, data.n);
        inp.a = data.a.clone();
        inp.phi = data.phi.clone();
        inp.tr_t = t_prev.trace();
        inp.tr_n = n_prev.trace();
        inp.tr_a_t = a_mat.matmul(&t_prev).trace();
        inp.tr_a_n = a_mat.matmul(&n_prev).trace();
        inp.tr_a2_t = a2.matmul(&t_prev).trace();
        inp.tr_a2_n = a2.matmul(&n_prev).trace();
        inp.s1_star = data.s_star(1);
        inp.sr_star = data.s_star(r);
        inp.jr_star = data.j(r);
        Ok(inp)
    }

    pub fn with_spectrum(mut self, kstar: Vec<S>) -> Self {
        self.kstar = Some(kstar);
        self
    }

    fn phi_r(&self) -> S {
        self.phi.powi(self.r as u32)
    }

    /// `E(φ^r S_r*)` by the product rule.
    fn e_phi_r_s(&self) -> S {
        self.phi_r() * self.e_s_rstar.clone() + self.e_phi_r.clone() * self.sr_star.clone()
    }

    /// Residuals of the spectrum-derived trace identities for the supplied
    /// `A_E*` traces; empty when no spectrum is given.
    pub fn consistency(&self) -> Vec<(&'static str, S)> {
        let Some(k) = &self.kstar else {
            return Vec::new();
        };
        let mut full = vec![S::zero()];
        full.extend(k.iter().cloned());
        let s = |j: usize| sigma_of(&full, j);
        let r = self.r;
        let m = self.n + 1;
        let rs = S::from_i64(r as i64);
        vec![
            (
                "trace_newton",
                self.tr_t.clone() - sign::<S>(r - 1) * S::from_i64((m + 1 - r) as i64) * s(r - 1),
            ),
            (
                "trace_shape_newton",
                self.tr_a_t.clone() - sign::<S>(r - 1) * rs * s(r),
            ),
            (
                "trace_shape_squared_newton",
                self.tr_a2_t.clone()
                    - sign::<S>(r) * (S::from_i64((r + 1) as i64) * s(r + 1) - s(1) * s(r)),
            ),
            ("s1_star", self.s1_star.clone() - s(1)),
            ("sr_star", self.sr_star.clone() - s(r)),
        ]
    }
}

/// Left side minus right side of the constant-curvature leaf relation
/// `(-1)^r (φ^r E(S_r*) + E(φ^r) S_r* + E(J_r*)) = -φ^r tr(A²T) - φ tr(A²𝒩)
/// - φ^r τ(E) tr(AT) + a tr(A𝒩) + A' tr T + B' tr 𝒩` with
/// `A' = a τ(E) - c φ^{r-1}` and `B' = (a - φ) τ(E) - a - c`.
pub fn theo1_residual<S: Scalar>(inp: &TheoremInputs<S>) -> Result<S, IdentityError> {
    if inp.r == 0 {
        return Err(IdentityError::OrderZero);
    }
    let phi_r = inp.phi_r();
    let lhs = sign::<S>(inp.r) * (inp.e_phi_r_s() + inp.e_j_rstar.clone());
    let a_prime =
        inp.a.clone() * inp.tau_e.clone() - inp.c.clone() * inp.phi.powi(inp.r as u32 - 1);
    let b_prime =
        (inp.a.clone() - inp.phi.clone()) * inp.tau_e.clone() - inp.a.clone() - inp.c.clone();
    let rhs = S::zero()
        - phi_r.clone() * inp.tr_a2_t.clone()
        - inp.phi.clone() * inp.tr_a2_n.clone()
        - phi_r * inp.tau_e.clone() * inp.tr_a_t.clone()
        + inp.a.clone() * inp.tr_a_n.clone()
        + a_prime * inp.tr_t.clone()
        + b_prime * inp.tr_n.clone();
    Ok(lhs - rhs)
}

/// Residual of the flatness criterion for `a = 0`:
/// `φ^r E(S_r*) + E(φ^r) S_r* - (-1)^{r-1} φ^r (tr(A²T) + τ(E) tr(AT))`.
pub fn cooo_residual<S: Scalar>(inp: &TheoremInputs<S>) -> Result<S, IdentityError> {
    if inp.r == 0 {
        return Err(IdentityError::OrderZero);
    }
    if !inp.a.is_zero() {
        return Err(IdentityError::XiNotInScreen(inp.a.to_string()));
    }
    let bracket = inp.tr_a2_t.clone() + inp.tau_e.clone() * inp.tr_a_t.clone();
    Ok(inp.e_phi_r_s() - sign::<S>(inp.r - 1) * inp.phi_r() * bracket)
}

/// Residual of `E(φ^r S_r*) = r φ^r S_r* τ(E) + φ^r Σ_i κ_i*² S_{r-1}^{*i}`,
/// the sum running over screen indices with index `i` deleted.
pub fn duu_residual<S: Scalar>(inp: &TheoremInputs<S>) -> Result<S, IdentityError> {
    if inp.r == 0 {
        return Err(IdentityError::OrderZero);
    }
    if !inp.a.is_zero() {
        return Err(IdentityError::XiNotInScreen(inp.a.to_string()));
    }
    let k = inp.kstar.as_ref().ok_or(IdentityError::MissingSpectrum)?;
    let phi_r = inp.phi_r();
    let rs = S::from_i64(inp.r as i64);
    Ok(inp.e_phi_r_s()
        - rs * phi_r.clone() * inp.sr_star.clone() * inp.tau_e.clone()
        - phi_r * squared_deleted_sum(k, inp.r))
}

/// `(-1)^r (A_1 S_r* + A_2 J_r* + φ^r E(S_r*) + E(J_r*))` with
/// `A_1 = φ^r τ(E) + E(φ^r) - φ^r S_1*` and `A_2 = τ(E) - S_1*`.
pub fn the2_divergence<S: Scalar>(inp: &TheoremInputs<S>) -> Result<S, IdentityError> {
    if inp.r == 0 {
        return Err(IdentityError::OrderZero);
    }
    let phi_r = inp.phi_r();
    let a1 = phi_r.clone() * inp.tau_e.clone() + inp.e_phi_r.clone()
        - phi_r.clone() * inp.s1_star.clone();
    let a2 = inp.tau_e.clone() - inp.s1_star.clone();
    Ok(sign::<S>(inp.r)
        * (a1 * inp.sr_star.clone()
            + a2 * inp.jr_star.clone()
            + phi_r * inp.e_s_rstar.clone()
            + inp.e_j_rstar.clone()))
}

/// `Σ_i κ_i² S_{r-1}^{i} - (S_1 S_r - (r+1) S_{r+1})` over `values`.
pub fn bridge_residual<S: Scalar>(values: &[S], r: usize) -> S {
    squared_deleted_sum(values, r)
        - (sigma_of(values, 1) * sigma_of(values, r)
            - S::from_i64((r + 1) as i64) * sigma_of(values, r + 1))
}

/// `Σ_i κ_i² S_{r-1}^{i} - (-1)^{r-1} tr(A² T_{r-1})` where `A` is the
/// diagonal matrix of `values`, linking the deleted-sum form to traces.
pub fn bridge_trace_residual<S: Scalar>(values: &[S], r: usize) -> S {
    let a = Matrix::diagonal(values);
    let fam = NewtonFamily::from_matrix(&a);
    let tr = a.matmul(&a).matmul(&fam.transform(r - 1)).trace();
    squared_deleted_sum(values, r) - sign::<S>(r - 1) * tr
}
