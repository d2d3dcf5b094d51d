//! Distribution of the normalized harvest `K = k1 + k2` and the probability
//! that it clears the transmit threshold.

use num_complex::Complex;

use super::{gamma_product, AnalyticsError};
use crate::quadrature::{GaussLegendre, Quadrature, QuadratureError};
use crate::scalar::Scalar;
use crate::units::ValidatedConfig;

/// Upper bound on half-period panels in the Gil-Pelaez integral.
const MAX_PANELS: usize = 4_000_000;

/// `C` in `L_K(s) = exp(−C·s^(2/α))`:
/// `λ_p π Γ(1+2/α) Γ(1−2/α) [((1−a)/2)^(2/α) + a^(2/α)]`.
pub fn laplace_k_exponent<T: Scalar>(cfg: &ValidatedConfig<T>) -> Result<T, AnalyticsError> {
    let delta = T::lit(2.0) / cfg.alpha;
    let slots = ((T::one() - cfg.a) / T::lit(2.0)).powf(delta) + cfg.a.powf(delta);
    Ok(cfg.lambda_p * T::PI() * gamma_product(cfg.alpha)? * slots)
}

/// Laplace transform of `K` at `s ≥ 0`.
pub fn laplace_k<T: Scalar>(s: T, cfg: &ValidatedConfig<T>) -> Result<T, AnalyticsError> {
    if s <= T::zero() {
        return Ok(T::one());
    }
    let c = laplace_k_exponent(cfg)?;
    Ok((-c * s.powf(T::lit(2.0) / cfg.alpha)).exp())
}

/// `E[e^{jwK}] = L_K(−jw)` on the principal branch, for `w ≥ 0`.
pub fn characteristic_k<T: Scalar>(w: T, cfg: &ValidatedConfig<T>) -> Result<Complex<T>, AnalyticsError> {
    let c = laplace_k_exponent(cfg)?;
    Ok(characteristic(c, T::lit(2.0) / cfg.alpha, w))
}

fn characteristic<T: Scalar>(c: T, delta: T, w: T) -> Complex<T> {
    // (−jw)^δ = w^δ · e^{−jπδ/2}
    let arg = -T::FRAC_PI_2() * delta;
    let z = Complex::from_polar(w.powf(delta), arg);
    (-z * c).exp()
}

/// `Pr(K ≥ σ)` by Gil-Pelaez inversion:
/// `1/2 + (1/π) ∫₀^∞ Im[e^{−jwσ} E[e^{jwK}]] / w dw`.
///
/// The range is cut at `W` where `|E[e^{jwK}]|` falls below the spec's
/// oscillatory cutoff and split into half-periods `π/σ`; the first panel uses
/// `w ∝ t^(α/2)` to absorb the `w^(2/α − 1)` behaviour at the origin. Panels
/// are bisected until the total moves by less than the relative tolerance.
pub fn p_h_gil_pelaez<T: Scalar>(
    cfg: &ValidatedConfig<T>,
    quad: &Quadrature<T>,
) -> Result<T, AnalyticsError> {
    let sigma = cfg.harvest_threshold_k();
    if cfg.lambda_p <= T::zero() {
        // K = 0 almost surely.
        return Ok(if sigma <= T::zero() { T::one() } else { T::zero() });
    }
    if sigma <= T::zero() {
        return Ok(T::one());
    }
    let c = laplace_k_exponent(cfg)?;
    let delta = T::lit(2.0) / cfg.alpha;
    let decay = c * (T::FRAC_PI_2() * delta).cos();
    let cutoff = quad.spec().osc_cutoff;
    let w_max = ((-cutoff.ln()) / decay).powf(delta.recip());
    let half_period = T::PI() / sigma;

    let panels_f = (w_max / half_period).ceil().max(T::one());
    let panels = panels_f.to_usize().unwrap_or(usize::MAX);
    if panels > MAX_PANELS {
        return Err(AnalyticsError::Quadrature {
            what: "Gil-Pelaez inversion",
            source: QuadratureError::NotConverged {
                value: f64::NAN,
                error: f64::INFINITY,
                panels,
            },
        });
    }
    let first_end = half_period.min(w_max);

    let integrand = |w: T| -> T {
        let phi = characteristic(c, delta, w);
        let rot = Complex::from_polar(T::one(), -w * sigma);
        (rot * phi).im / w
    };
    // First panel in t ∈ [0, 1] with w = first_end · t^q.
    let q = cfg.alpha / T::lit(2.0);
    let first = |t: T| -> T {
        let w = first_end * t.powf(q);
        let jac = first_end * q * t.powf(q - T::one());
        integrand(w) * jac
    };

    let rule: &GaussLegendre<T> = quad.rule();
    let estimate = |split: usize| -> T {
        let sf = T::from_usize(split).unwrap();
        let mut acc = T::zero();
        for k in 0..split {
            let kf = T::from_usize(k).unwrap();
            acc = acc + rule.apply(first, kf / sf, (kf + T::one()) / sf);
        }
        let mut lo = first_end;
        for p in 1..panels {
            let hi = (half_period * T::from_usize(p + 1).unwrap()).min(w_max);
            if hi <= lo {
                break;
            }
            let step = (hi - lo) / sf;
            for k in 0..split {
                let a = lo + step * T::from_usize(k).unwrap();
                acc = acc + rule.apply(integrand, a, a + step);
            }
            lo = hi;
        }
        acc
    };

    let tol = quad.spec().rel_tol;
    let mut split = 1usize;
    let mut prev = estimate(split);
    let mut change = T::infinity();
    for _ in 0..quad.spec().max_doublings.min(8) {
        split *= 2;
        let cur = estimate(split);
        change = (cur - prev).abs();
        prev = cur;
        // The integral lies in [−π/2, π/2]; measure change against that scale.
        if change <= tol * cur.abs().max(T::one()) {
            let p = T::lit(0.5) + cur / T::PI();
            return Ok(p.max(T::zero()).min(T::one()));
        }
    }
    Err(AnalyticsError::Quadrature {
        what: "Gil-Pelaez inversion",
        source: QuadratureError::NotConverged {
            value: (T::lit(0.5) + prev / T::PI()).as_f64(),
            error: (change / T::PI()).as_f64(),
            panels: panels * split,
        },
    })
}

/// At `α = 4`, `L_K(s) = e^{−c√s}` is the Laplace transform of a Lévy law
/// with `Pr(K ≥ σ) = erf(c / (2√σ))`.
pub fn harvest_levy_closed_form<T: Scalar>(cfg: &ValidatedConfig<T>) -> Result<T, AnalyticsError> {
    if cfg.alpha != T::lit(4.0) {
        return Err(AnalyticsError::ClosedFormUnavailable(cfg.alpha.as_f64()));
    }
    let sigma = cfg.harvest_threshold_k();
    if sigma <= T::zero() {
        return Ok(if cfg.lambda_p > T::zero() { T::one() } else { T::zero() });
    }
    let c = laplace_k_exponent(cfg)?;
    Ok(T::lit(libm::erf((c / (T::lit(2.0) * sigma.sqrt())).as_f64())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::SystemConfig;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn cfg_with(f: impl FnOnce(&mut SystemConfig<f64>)) -> ValidatedConfig<f64> {
        let mut c = SystemConfig::baseline();
        f(&mut c);
        c.validate().unwrap()
    }

    #[test]
    fn laplace_examples() {
        let base = cfg_with(|_| {});
        assert_eq!(laplace_k(0.0, &base).unwrap(), 1.0);
        let empty = cfg_with(|c| c.lambda_p = 0.0);
        assert_eq!(laplace_k(5.0, &empty).unwrap(), 1.0);
        // α = 4: Γ(1.5)Γ(0.5) = π/2.
        let expect = (-0.01 * PI * PI / 2.0 * (0.25_f64.sqrt() + 0.5_f64.sqrt())).exp();
        assert_relative_eq!(laplace_k(1.0, &base).unwrap(), expect, max_relative = 1e-14);
    }

    #[test]
    fn characteristic_at_zero_is_one() {
        let base = cfg_with(|_| {});
        let phi = characteristic_k(0.0, &base).unwrap();
        assert_relative_eq!(phi.re, 1.0);
        assert_eq!(phi.im, 0.0);
        assert!(characteristic_k(1e3, &base).unwrap().norm() < 1.0);
    }

    #[test]
    fn gil_pelaez_limits() {
        let q = Quadrature::default();
        let empty = cfg_with(|c| c.lambda_p = 0.0);
        assert_eq!(p_h_gil_pelaez(&empty, &q).unwrap(), 0.0);
        let tiny = cfg_with(|c| {
            c.p_st_dbm = -200.0;
            c.trunc_eps = 1e30;
        });
        assert_relative_eq!(p_h_gil_pelaez(&tiny, &q).unwrap(), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn gil_pelaez_matches_levy_at_baseline() {
        let q = Quadrature::default();
        let base = cfg_with(|_| {});
        let gp = p_h_gil_pelaez(&base, &q).unwrap();
        let levy = harvest_levy_closed_form(&base).unwrap();
        assert!((gp - levy).abs() < 1e-6, "{gp} vs {levy}");
        // c = λ_p π²/2 (√0.25 + √0.5); σ = 0.25 P_st/(0.8 P_t).
        let c = 0.01 * PI * PI / 2.0 * (0.5 + 0.5_f64.sqrt());
        let sigma = 0.25 * base.p_st_mw / (0.8 * base.p_t_mw);
        assert_relative_eq!(levy, libm::erf(c / (2.0 * sigma.sqrt())), max_relative = 1e-14);
    }

    #[test]
    fn literal_threshold_is_scaled_by_a() {
        let e = cfg_with(|_| {});
        let l = cfg_with(|c| c.harvest_threshold = crate::units::HarvestThreshold::Literal);
        assert_relative_eq!(l.harvest_threshold_k(), e.harvest_threshold_k() / 0.5);
        let q = Quadrature::default();
        assert!(p_h_gil_pelaez(&l, &q).unwrap() < p_h_gil_pelaez(&e, &q).unwrap());
    }

    #[test]
    fn levy_needs_alpha_four() {
        let c = cfg_with(|c| {
            c.alpha = 3.0;
            c.trunc_eps = 1.0;
        });
        assert!(harvest_levy_closed_form(&c).is_err());
        let q = Quadrature::default();
        let p = p_h_gil_pelaez(&c, &q).unwrap();
        assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn gil_pelaez_monotone_on_grid() {
        let q = Quadrature::default();
        for lp in [1e-3, 3e-3, 1e-2, 3e-2] {
            let mut last = 2.0;
            for pst in [-8.0, -4.0, 0.0, 4.0, 8.0] {
                let p = p_h_gil_pelaez(&cfg_with(|c| { c.lambda_p = lp; c.p_st_dbm = pst; }), &q).unwrap();
                assert!(p <= last + 1e-9, "not non-increasing in p_st at lp={lp}");
                last = p;
            }
        }
        for pst in [-5.0, 0.0, 5.0] {
            let mut last = -1.0;
            for lp in [1e-3, 3e-3, 1e-2, 3e-2, 1e-1] {
                let p = p_h_gil_pelaez(&cfg_with(|c| { c.lambda_p = lp; c.p_st_dbm = pst; }), &q).unwrap();
                assert!(p >= last - 1e-9, "not non-decreasing in lambda_p at pst={pst}");
                last = p;
            }
        }
    }
}
