//! Per-link decoding factors: hop-1 all-fail probabilities, far-field SD
//! links, the typical-relay decode probability and the BSTD term `χ`.

use std::cell::Cell;

use super::{guard_zone_prob, inner_integral, resolve, AnalyticsError, Inner, Method, Resolved};
use crate::quadrature::Quadrature;
use crate::scalar::Scalar;
use crate::units::ValidatedConfig;

/// `κ = (π²/2)·λ_p·√(γ_th·P_t/P_st)`: at `α = 4`,
/// `exp(−2π λ_p J(γ_th P_t l⁴/P_st)) = exp(−κ l²)`.
fn kappa<T: Scalar>(cfg: &ValidatedConfig<T>) -> T {
    T::PI() * T::PI() / T::lit(2.0)
        * cfg.lambda_p
        * (cfg.gamma_th_lin * cfg.p_t_mw / cfg.p_st_mw).sqrt()
}

/// `∫₀^R exp(−κ l²) l dl`, stable as `κ → 0`.
fn gaussian_disc_moment<T: Scalar>(kappa: T, r: T) -> T {
    let x = kappa * r * r;
    if x <= T::zero() {
        return r * r / T::lit(2.0);
    }
    -(-x).exp_m1() / (T::lit(2.0) * kappa)
}

/// Probability that a relay at distance `l` from a transmitter of power
/// `P_st` sees SIR ≥ γ_th against the PT field:
/// `exp(−2π λ_p J(γ_th P_t l^α / P_st))`.
fn hop_success<T: Scalar>(
    l: T,
    cfg: &ValidatedConfig<T>,
    inner: Inner,
    quad: &Quadrature<T>,
) -> Result<T, AnalyticsError> {
    if cfg.lambda_p <= T::zero() {
        return Ok(T::one());
    }
    let beta = cfg.gamma_th_lin * cfg.p_t_mw * l.powf(cfg.alpha) / cfg.p_st_mw;
    let j = inner_integral(inner, beta, cfg.alpha, quad)?;
    Ok((-T::lit(2.0) * T::PI() * cfg.lambda_p * j).exp())
}

/// Runs an outer quadrature whose integrand may itself fail.
fn integrate_fallible<T: Scalar, F>(
    quad: &Quadrature<T>,
    what: &'static str,
    a: T,
    b: T,
    mut f: F,
) -> Result<T, AnalyticsError>
where
    F: FnMut(T) -> Result<T, AnalyticsError>,
{
    let failure: Cell<Option<AnalyticsError>> = Cell::new(None);
    let est = quad.integrate(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                let prev = failure.take();
                failure.set(prev.or(Some(e)));
                T::zero()
            }
        },
        a,
        b,
    );
    if let Some(e) = failure.take() {
        return Err(e);
    }
    est.map(|e| e.value).map_err(AnalyticsError::quad(what))
}

/// `∫₀^R exp(−2π λ_p J(β(l))) l dl`, the hop-1 mean-measure kernel shared
/// by `Ψ31`, `Ω1` and `Δ`.
fn hop1_moment<T: Scalar>(
    cfg: &ValidatedConfig<T>,
    quad: &Quadrature<T>,
    method: Method,
    what: &'static str,
) -> Result<T, AnalyticsError> {
    match resolve(method, cfg.alpha)? {
        Resolved::Closed => Ok(gaussian_disc_moment(kappa(cfg), cfg.r_disc)),
        Resolved::Outer(inner) => integrate_fallible(quad, what, T::zero(), cfg.r_disc, |l| {
            Ok(hop_success(l, cfg, inner, quad)? * l)
        }),
    }
}

/// Bound on the probability that every relay in the disc fails hop 1 under
/// the channel-power ranking:
/// `exp(−2π λ_sr ∫₀^R exp(−2π λ_p J(β(l))) l dl)`.
pub fn psi31_bound<T: Scalar>(
    cfg: &ValidatedConfig<T>,
    quad: &Quadrature<T>,
    method: Method,
) -> Result<T, AnalyticsError> {
    let m = hop1_moment(cfg, quad, method, "psi31 outer integral")?;
    Ok((-T::lit(2.0) * T::PI() * cfg.lambda_sr * m).exp())
}

/// Hop-1 success probability of the channel-power ranked relay, `1 − Ψ31`.
pub fn psi3<T: Scalar>(
    cfg: &ValidatedConfig<T>,
    quad: &Quadrature<T>,
    method: Method,
) -> Result<T, AnalyticsError> {
    Ok(T::one() - psi31_bound(cfg, quad, method)?)
}

/// Probability that no relay decodes hop 1 under SIR ranking. The relay
/// transmit power in the SIR is the single secondary power `P_st`, so this
/// coincides numerically with [`psi31_bound`]; it is evaluated separately so
/// that the two remain distinct entries in breakdowns and checks.
pub fn omega1<T: Scalar>(
    cfg: &ValidatedConfig<T>,
    quad: &Quadrature<T>,
    method: Method,
) -> Result<T, AnalyticsError> {
    let m = hop1_moment(cfg, quad, method, "omega1 outer integral")?;
    Ok((-T::lit(2.0) * T::PI() * cfg.lambda_sr * m).exp())
}

/// Probability that a relay placed uniformly in the disc decodes hop 1 and
/// that ST's guard zone is clear: `∫₀^R exp(−2π λ_p J(β(r)))·2r/R² dr · g`.
pub fn delta_decode<T: Scalar>(
    cfg: &ValidatedConfig<T>,
    quad: &Quadrature<T>,
    method: Method,
) -> Result<T, AnalyticsError> {
    let m = hop1_moment(cfg, quad, method, "delta outer integral")?;
    let r2 = cfg.r_disc * cfg.r_disc;
    Ok(T::lit(2.0) * m / r2 * guard_zone_prob(cfg.lambda_p, cfg.r_gz))
}

/// SIR ≥ γ_th probability for a link of length `d_sd` and transmit power
/// `tx_power_mw`: `exp(−2π λ_p J(γ_th P_t d_sd^α / tx_power))`.
pub fn psi4_far_field<T: Scalar>(
    cfg: &ValidatedConfig<T>,
    tx_power_mw: T,
    quad: &Quadrature<T>,
    method: Method,
) -> Result<T, AnalyticsError> {
    if cfg.lambda_p <= T::zero() {
        return Ok(T::one());
    }
    let ratio = cfg.gamma_th_lin * cfg.p_t_mw / tx_power_mw;
    match resolve(method, cfg.alpha)? {
        Resolved::Closed => {
            let d2 = cfg.d_sd * cfg.d_sd;
            Ok((-T::PI() * T::PI() / T::lit(2.0) * cfg.lambda_p * (ratio * d2 * d2).sqrt()).exp())
        }
        Resolved::Outer(inner) => {
            let beta = ratio * cfg.d_sd.powf(cfg.alpha);
            let j = inner_integral(inner, beta, cfg.alpha, quad)?;
            Ok((-T::lit(2.0) * T::PI() * cfg.lambda_p * j).exp())
        }
    }
}

/// Hop-2 success probability for a relay at polar position `(r, θ)` around
/// ST, with SD at `(d_sd, 0)`.
pub fn xi<T: Scalar>(
    r: T,
    theta: T,
    cfg: &ValidatedConfig<T>,
    quad: &Quadrature<T>,
    method: Method,
) -> Result<T, AnalyticsError> {
    let f2 = r * r + cfg.d_sd * cfg.d_sd - T::lit(2.0) * r * cfg.d_sd * theta.cos();
    let f2 = f2.max(T::zero());
    match resolve(method, cfg.alpha)? {
        Resolved::Closed => Ok((-kappa(cfg) * f2).exp()),
        Resolved::Outer(inner) => hop_success(f2.sqrt(), cfg, inner, quad),
    }
}

/// Probability that no relay in the decode set reaches SD:
/// `exp(−λ_sr Δ ∫₀^{2π} ∫₀^R ξ(r, θ) r dr dθ)`.
pub fn chi_bstd<T: Scalar>(
    cfg: &ValidatedConfig<T>,
    quad: &Quadrature<T>,
    method: Method,
) -> Result<T, AnalyticsError> {
    if cfg.lambda_sr <= T::zero() {
        return Ok(T::one());
    }
    let delta = delta_decode(cfg, quad, method)?;
    let area = integrate_fallible(quad, "chi angular integral", T::zero(), T::TAU(), |theta| {
        integrate_fallible(quad, "chi radial integral", T::zero(), cfg.r_disc, |r| {
            Ok(xi(r, theta, cfg, quad, method)? * r)
        })
    })?;
    Ok((-cfg.lambda_sr * delta * area).exp())
}

/// One closed-form vs quadrature comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPathEntry<T> {
    pub name: String,
    pub closed_form: T,
    pub quadrature: T,
}

impl<T: Scalar> DualPathEntry<T> {
    pub fn rel_err(&self) -> T {
        let scale = self.closed_form.abs().max(T::min_positive_value());
        (self.quadrature - self.closed_form).abs() / scale
    }
}

/// Results of the `α = 4` closed-form vs quadrature self-checks.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DualPathReport<T> {
    pub entries: Vec<DualPathEntry<T>>,
}

impl<T: Scalar> DualPathReport<T> {
    pub fn max_rel_err(&self) -> T {
        self.entries
            .iter()
            .map(DualPathEntry::rel_err)
            .fold(T::zero(), T::max)
    }

    pub fn failures(&self, tol: T) -> impl Iterator<Item = &DualPathEntry<T>> {
        self.entries.iter().filter(move |e| !(e.rel_err() <= tol))
    }
}

/// Evaluates every factor with an `α = 4` closed form both ways.
pub fn dual_path_checks<T: Scalar>(
    cfg: &ValidatedConfig<T>,
    quad: &Quadrature<T>,
) -> Result<DualPathReport<T>, AnalyticsError> {
    if cfg.alpha != T::lit(4.0) {
        return Err(AnalyticsError::ClosedFormUnavailable(cfg.alpha.as_f64()));
    }
    let mut report = DualPathReport::default();
    let mut push = |name: String, c: T, q: T| {
        report.entries.push(DualPathEntry {
            name,
            closed_form: c,
            quadrature: q,
        })
    };
    let both = |f: &dyn Fn(Method) -> Result<T, AnalyticsError>| -> Result<(T, T), AnalyticsError> {
        Ok((f(Method::ClosedForm)?, f(Method::Quadrature)?))
    };

    let (c, q) = both(&|m| psi31_bound(cfg, quad, m))?;
    push("psi31".into(), c, q);
    let (c, q) = both(&|m| omega1(cfg, quad, m))?;
    push("omega1".into(), c, q);
    let (c, q) = both(&|m| delta_decode(cfg, quad, m))?;
    push("delta".into(), c, q);
    let (c, q) = both(&|m| psi4_far_field(cfg, cfg.p_st_mw, quad, m))?;
    push("psi4".into(), c, q);
    let r = cfg.r_disc;
    for (fr, theta) in [(0.5, 0.0), (1.0, 1.0), (0.25, 3.0)] {
        let rr = r * T::lit(fr);
        let th = T::lit(theta);
        let (c, q) = both(&|m| xi(rr, th, cfg, quad, m))?;
        push(format!("xi(r={},theta={})", rr, th), c, q);
    }
    Ok(report)
}
