//! Detection of the screen almost conformal relation between `A_N` and `A_E*`.

use serde::Serialize;

use super::geometry::InducedGeometry;
use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SacForm {
    /// `A_N = φ A_E* + λ ⊗ ξ`.
    LambdaXi,
    /// `A_N = φ A_E* - a I`.
    MinusAI,
}

impl SacForm {
    pub fn name(self) -> &'static str {
        match self {
            SacForm::LambdaXi => "lambda_xi",
            SacForm::MinusAI => "minus_ai",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SacDetection<S> {
    pub phi: S,
    pub a: S,
    pub form: SacForm,
}

/// Least-squares `φ` and the full residual matrix for one form.
#[derive(Debug, Clone, PartialEq)]
pub struct FormFit<S> {
    pub form: SacForm,
    pub phi: S,
    pub residual: Matrix<S>,
}

impl<S: Scalar> FormFit<S> {
    pub fn holds(&self, tol: f64, scale: f64) -> bool {
        !self.phi.is_zero() && self.residual.iter().all(|v| v.is_negligible(scale, tol))
    }
}

/// `φ` minimizing the misfit of `target ≈ φ A_E*` over the screen columns;
/// `None` when `A_E*` vanishes there.
fn fit_phi<S: Scalar>(target: &Matrix<S>, a: &Matrix<S>) -> Option<S> {
    let (mut num, mut den) = (S::zero(), S::zero());
    for j in 1..a.cols() {
        for i in 0..a.rows() {
            num = num + target[(i, j)].clone() * a[(i, j)].clone();
            den = den + a[(i, j)].clone() * a[(i, j)].clone();
        }
    }
    (!den.is_zero()).then(|| num / den)
}

/// Fits of both forms; a form is absent when `A_E*` vanishes on the screen
/// or, for the `λ ⊗ ξ` form, when `ξ` is not tangent.
pub fn sac_fits<S: Scalar>(geom: &InducedGeometry<S>) -> Vec<FormFit<S>> {
    let a = geom.a_estar.entries();
    let a_n = geom.a_n.entries();
    let dim = a.rows();
    let a_coef = geom.xi_a.clone();
    let mut fits = Vec::new();

    let shifted = &a_n.clone() + &Matrix::scalar_identity(dim, a_coef.clone());
    if let Some(phi) = fit_phi(&shifted, a) {
        let residual = &shifted - &a.scale(&phi);
        fits.push(FormFit {
            form: SacForm::MinusAI,
            phi,
            residual,
        });
    }
    if let Some(xi) = &geom.xi_tangent {
        if let Some(phi) = fit_phi(a_n, a) {
            let lambda_xi =
                Matrix::from_fn(dim, dim, |i, j| xi[i].clone() * geom.lambda[j].clone());
            let residual = &(a_n - &a.scale(&phi)) - &lambda_xi;
            fits.push(FormFit {
                form: SacForm::LambdaXi,
                phi,
                residual,
            });
        }
    }
    fits
}

/// `φ` and `a` when `A_N` and `A_E*` satisfy one of the two forms; the
/// `-aI` form is tried first.
pub fn detect_sac<S: Scalar>(geom: &InducedGeometry<S>, tol: f64) -> Option<SacDetection<S>> {
    let scale = geom
        .a_n
        .entries()
        .max_abs()
        .max(geom.a_estar.entries().max_abs())
        .max(1.0);
    sac_fits(geom)
        .into_iter()
        .find(|f| f.holds(tol, scale))
        .map(|f| SacDetection {
            phi: f.phi,
            a: geom.xi_a.clone(),
            form: f.form,
        })
}
