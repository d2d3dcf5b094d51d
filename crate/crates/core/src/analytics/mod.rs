//! Analytical success probabilities.
//!
//! Every factor that has an `α = 4` closed form can also be evaluated by
//! nested quadrature, selected with [`Method`]. The two routes are kept
//! independent so that each checks the other.

mod harvest;
mod links;
mod schemes;

pub use harvest::{
    characteristic_k, harvest_levy_closed_form, laplace_k, laplace_k_exponent, p_h_gil_pelaez,
};
pub use links::{
    chi_bstd, delta_decode, dual_path_checks, omega1, psi3, psi31_bound, psi4_far_field, xi,
    DualPathEntry, DualPathReport,
};
pub use schemes::{
    analyze, p_succ_bcc, p_succ_bsir, p_succ_bstd, p_succ_direct,
    AnalyticBreakdown, BREAKDOWN_COLUMNS,
};

use thiserror::Error;

use crate::quadrature::{Quadrature, QuadratureError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticsError {
    #[error("path-loss exponent {0} must exceed 2")]
    AlphaTooSmall(f64),
    #[error("closed form only exists for alpha = 4 (got {0})")]
    ClosedFormUnavailable(f64),
    #[error("{what}: {source}")]
    Quadrature {
        what: &'static str,
        #[source]
        source: QuadratureError,
    },
    #[error("scheme {0} has no analytical model")]
    NoModel(&'static str),
    #[error("direct-link expression requested but direct_link is off")]
    DirectLinkOff,
}

impl AnalyticsError {
    pub(crate) fn quad(what: &'static str) -> impl FnOnce(QuadratureError) -> Self {
        move |source| Self::Quadrature { what, source }
    }
}

/// How a factor with both a closed form and an integral form is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Closed form when `α = 4`, otherwise quadrature with the inner
    /// interference integral in its Γ-function form.
    #[default]
    Auto,
    /// The `α = 4` closed form; an error for any other exponent.
    ClosedForm,
    /// Nested quadrature throughout, including the inner interference integral.
    Quadrature,
}

/// How the inner `∫₀^∞ x/(1 + x^α/β) dx` is computed inside outer integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Inner {
    Identity,
    Numeric,
}

pub(crate) enum Resolved {
    Closed,
    Outer(Inner),
}

pub(crate) fn resolve<T: Scalar>(method: Method, alpha: T) -> Result<Resolved, AnalyticsError> {
    let four = alpha == T::lit(4.0);
    Ok(match method {
        Method::Auto if four => Resolved::Closed,
        Method::Auto => Resolved::Outer(Inner::Identity),
        Method::ClosedForm if four => Resolved::Closed,
        Method::ClosedForm => return Err(AnalyticsError::ClosedFormUnavailable(alpha.as_f64())),
        Method::Quadrature => Resolved::Outer(Inner::Numeric),
    })
}

/// `Γ(1 + 2/α)·Γ(1 − 2/α) = (2π/α) / sin(2π/α)`; equals `π/2` at `α = 4`.
pub fn gamma_product<T: Scalar>(alpha: T) -> Result<T, AnalyticsError> {
    let two = T::lit(2.0);
    if !(alpha > two) {
        return Err(AnalyticsError::AlphaTooSmall(alpha.as_f64()));
    }
    let z = T::PI() * two / alpha;
    Ok(z / z.sin())
}

/// `∫₀^∞ x / (1 + x^α/β) dx = (π/α)·β^(2/α) / sin(2π/α)`.
pub fn interference_integral<T: Scalar>(beta: T, alpha: T) -> Result<T, AnalyticsError> {
    let two = T::lit(2.0);
    if !(alpha > two) {
        return Err(AnalyticsError::AlphaTooSmall(alpha.as_f64()));
    }
    if beta <= T::zero() {
        return Ok(T::zero());
    }
    Ok(T::PI() / alpha * beta.powf(two / alpha) / (two * T::PI() / alpha).sin())
}

/// The same integral evaluated numerically, on the scale `x ~ β^(1/α)`.
pub fn interference_integral_quadrature<T: Scalar>(
    beta: T,
    alpha: T,
    quad: &Quadrature<T>,
) -> Result<T, AnalyticsError> {
    if !(alpha > T::lit(2.0)) {
        return Err(AnalyticsError::AlphaTooSmall(alpha.as_f64()));
    }
    if beta <= T::zero() {
        return Ok(T::zero());
    }
    let scale = beta.powf(alpha.recip());
    quad.integrate_semi_infinite(|x| x / (T::one() + x.powf(alpha) / beta), scale)
        .map(|e| e.value)
        .map_err(AnalyticsError::quad("interference integral"))
}

pub(crate) fn inner_integral<T: Scalar>(
    inner: Inner,
    beta: T,
    alpha: T,
    quad: &Quadrature<T>,
) -> Result<T, AnalyticsError> {
    match inner {
        Inner::Identity => interference_integral(beta, alpha),
        Inner::Numeric => interference_integral_quadrature(beta, alpha, quad),
    }
}

/// Probability that no PR of density `lambda_p` lies within `r_gz`.
pub fn guard_zone_prob<T: Scalar>(lambda_p: T, r_gz: T) -> T {
    (-T::PI() * lambda_p * r_gz * r_gz).exp()
}
