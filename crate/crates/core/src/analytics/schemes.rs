//! End-to-end success probabilities per relay-selection scheme.

use super::{
    chi_bstd, delta_decode, guard_zone_prob, omega1, p_h_gil_pelaez, psi31_bound, psi4_far_field,
    AnalyticsError, Method,
};
use crate::quadrature::Quadrature;
use crate::scalar::Scalar;
use crate::scheme::SchemeId;
use crate::units::ValidatedConfig;

/// Numeric columns of [`AnalyticBreakdown`], in CSV order.
pub const BREAKDOWN_COLUMNS: [&str; 23] = [
    "p_h",
    "guard_st",
    "guard_sr",
    "p_nonempty",
    "psi31",
    "psi3",
    "psi4",
    "upsilon",
    "omega1",
    "omega",
    "phi",
    "delta",
    "lambda_eff",
    "chi",
    "p_dsucc_sd",
    "pr_direct_fail",
    "p11",
    "p12",
    "p22",
    "p32",
    "p_n1_zero",
    "p_dsucc",
    "p_succ",
];

/// Every analytical factor behind one `P_succ` value. Factors that do not
/// belong to the scheme (or to the direct-link variant) are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticBreakdown<T> {
    pub scheme: SchemeId,
    pub direct_link: bool,
    pub p_h: T,
    pub guard_st: T,
    pub guard_sr: T,
    /// `Pr(N ≥ 1) = 1 − exp(−π λ_sr R²)`.
    pub p_nonempty: T,
    pub psi31: Option<T>,
    pub psi3: Option<T>,
    pub psi4: Option<T>,
    /// `Υ` (BCC) or `Υ1` (BSIR): success of both hops given `N ≥ 1`.
    pub upsilon: Option<T>,
    pub omega1: Option<T>,
    pub omega: Option<T>,
    pub phi: Option<T>,
    pub delta: Option<T>,
    /// Decode-set density `Δ·λ_sr`.
    pub lambda_eff: Option<T>,
    pub chi: Option<T>,
    pub p_dsucc_sd: Option<T>,
    pub pr_direct_fail: Option<T>,
    pub p11: Option<T>,
    pub p12: Option<T>,
    pub p22: Option<T>,
    pub p32: Option<T>,
    /// `Pr(N_1 = 0) = exp(−π λ_eff R²)` for BSTD with the direct link.
    pub p_n1_zero: Option<T>,
    /// Success probability given that ST harvested enough to transmit.
    pub p_dsucc: T,
    pub p_succ: T,
}

impl<T: Scalar> AnalyticBreakdown<T> {
    fn new(scheme: SchemeId, direct_link: bool, p_h: T, guard: T, p_nonempty: T) -> Self {
        Self {
            scheme,
            direct_link,
            p_h,
            guard_st: guard,
            guard_sr: guard,
            p_nonempty,
            psi31: None,
            psi3: None,
            psi4: None,
            upsilon: None,
            omega1: None,
            omega: None,
            phi: None,
            delta: None,
            lambda_eff: None,
            chi: None,
            p_dsucc_sd: None,
            pr_direct_fail: None,
            p11: None,
            p12: None,
            p22: None,
            p32: None,
            p_n1_zero: None,
            p_dsucc: T::zero(),
            p_succ: T::zero(),
        }
    }

    /// Values in [`BREAKDOWN_COLUMNS`] order.
    pub fn values(&self) -> [Option<T>; 23] {
        [
            Some(self.p_h),
            Some(self.guard_st),
            Some(self.guard_sr),
            Some(self.p_nonempty),
            self.psi31,
            self.psi3,
            self.psi4,
            self.upsilon,
            self.omega1,
            self.omega,
            self.phi,
            self.delta,
            self.lambda_eff,
            self.chi,
            self.p_dsucc_sd,
            self.pr_direct_fail,
            self.p11,
            self.p12,
            self.p22,
            self.p32,
            self.p_n1_zero,
            Some(self.p_dsucc),
            Some(self.p_succ),
        ]
    }

    fn finish(mut self, p_dsucc: T) -> Self {
        self.p_dsucc = p_dsucc;
        self.p_succ = self.p_h * p_dsucc;
        self
    }
}

struct Common<T> {
    p_h: T,
    guard: T,
    p_nonempty: T,
    p_empty: T,
}

fn common<T: Scalar>(
    cfg: &ValidatedConfig<T>,
    quad: &Quadrature<T>,
) -> Result<Common<T>, AnalyticsError> {
    let p_empty = (-T::PI() * cfg.lambda_sr * cfg.r_disc * cfg.r_disc).exp();
    Ok(Common {
        p_h: p_h_gil_pelaez(cfg, quad)?,
        guard: guard_zone_prob(cfg.lambda_p, cfg.r_gz),
        p_nonempty: T::one() - p_empty,
        p_empty,
    })
}

/// Divides out `Pr(N ≥ 1)`; zero when the relay disc is empty a.s.
fn conditional<T: Scalar>(joint: T, p_nonempty: T) -> T {
    if p_nonempty > T::zero() {
        joint / p_nonempty
    } else {
        T::zero()
    }
}

/// Best-composite-channel selection without the direct link.
///
/// `Υ = Ψ3·Ψ4 / Pr(N≥1)`, and
/// `P_succ = p_h·Υ·Pr(N≥1)·g_st·g_sr·(1 − exp(−π λ_sr R²))`, keeping the
/// trailing relay-nonempty factor of the composed expression.
pub fn p_succ_bcc<T: Scalar>(
    cfg: &ValidatedConfig<T>,
    quad: &Quadrature<T>,
    method: Method,
) -> Result<AnalyticBreakdown<T>, AnalyticsError> {
    let c = common(cfg, quad)?;
    let mut b = AnalyticBreakdown::new(SchemeId::Bcc, false, c.p_h, c.guard, c.p_nonempty);
    let psi31 = psi31_bound(cfg, quad, method)?;
    let psi3 = T::one() - psi31;
    let psi4 = psi4_far_field(cfg, cfg.p_st_mw, quad, method)?;
    let upsilon = conditional(psi3 * psi4, c.p_nonempty);
    b.psi31 = Some(psi31);
    b.psi3 = Some(psi3);
    b.psi4 = Some(psi4);
    b.upsilon = Some(upsilon);
    let p_dsucc = upsilon * c.p_nonempty * b.guard_st * b.guard_sr * c.p_nonempty;
    Ok(b.finish(p_dsucc))
}

/// Best-SIR selection without the direct link:
/// `Υ1 = (1 − Ω1)·φ / Pr(N≥1)`, `P_succ = p_h·Υ1·Pr(N≥1)·g_st·g_sr`.
pub fn p_succ_bsir<T: Scalar>(
    cfg: &ValidatedConfig<T>,
    quad: &Quadrature<T>,
    method: Method,
) -> Result<AnalyticBreakdown<T>, AnalyticsError> {
    let c = common(cfg, quad)?;
    let mut b = AnalyticBreakdown::new(SchemeId::Bsir, false, c.p_h, c.guard, c.p_nonempty);
    let omega1 = omega1(cfg, quad, method)?;
    let omega = T::one() - omega1;
    let phi = psi4_far_field(cfg, cfg.p_st_mw, quad, method)?;
    let upsilon = conditional(omega * phi, c.p_nonempty);
    b.omega1 = Some(omega1);
    b.omega = Some(omega);
    b.phi = Some(phi);
    b.upsilon = Some(upsilon);
    let p_dsucc = upsilon * c.p_nonempty * b.guard_st * b.guard_sr;
    Ok(b.finish(p_dsucc))
}

/// Best-SIR-toward-destination selection among hop-1 decoders, without the
/// direct link: `P_succ = p_h·(1 − χ)·g_sr`, where the decode set is the
/// relay field thinned to density `Δ·λ_sr`.
pub fn p_succ_bstd<T: Scalar>(
    cfg: &ValidatedConfig<T>,
    quad: &Quadrature<T>,
    method: Method,
) -> Result<AnalyticBreakdown<T>, AnalyticsError> {
    let c = common(cfg, quad)?;
    let mut b = AnalyticBreakdown::new(SchemeId::Bstd, false, c.p_h, c.guard, c.p_nonempty);
    let delta = delta_decode(cfg, quad, method)?;
    let chi = chi_bstd(cfg, quad, method)?;
    let p_dsucc_sd = (T::one() - chi) * b.guard_sr;
    b.delta = Some(delta);
    b.lambda_eff = Some(delta * cfg.lambda_sr);
    b.chi = Some(chi);
    b.p_dsucc_sd = Some(p_dsucc_sd);
    Ok(b.finish(p_dsucc_sd))
}

/// Selection combining of the relayed and direct ST→SD branches.
///
/// BCC and BSIR use the three-term decomposition (both branches / relay
/// failed hop 1 / empty disc). Writing `P_f` for the direct-branch failure
/// probability, `p` for the hop-1 success term and `P_0 = exp(−π λ_sr R²)`:
/// `(1 − P_f²)·p·Pr(N≥1)·exp(−2π λ_p r_gz²) + (1 − P_f)·q·Pr(N≥1)·g + (1 − P_f)·P_0·g`
/// with `q = max(0, 1 − p − P_0)`.
/// BSTD uses the decode-set thinning with `P_0' = exp(−π λ_eff R²)`:
/// `[(1 − P_0') − P_f·(χ − P_0')]·g + (1 − P_f)·P_0'·g`.
pub fn p_succ_direct<T: Scalar>(
    cfg: &ValidatedConfig<T>,
    scheme: SchemeId,
    quad: &Quadrature<T>,
    method: Method,
) -> Result<AnalyticBreakdown<T>, AnalyticsError> {
    if !cfg.direct_link {
        return Err(AnalyticsError::DirectLinkOff);
    }
    let c = common(cfg, quad)?;
    let mut b = AnalyticBreakdown::new(scheme, true, c.p_h, c.guard, c.p_nonempty);
    let one = T::one();
    let direct_ok = psi4_far_field(cfg, cfg.p_st_mw, quad, method)?;
    let pf = one - direct_ok;
    b.pr_direct_fail = Some(pf);
    let g = c.guard;
    let g_joint = guard_zone_prob(cfg.lambda_p * T::lit(2.0), cfg.r_gz);

    let three_term = |p: T| -> (T, T) {
        let q = (one - p - c.p_empty).max(T::zero());
        let sum = (one - pf * pf) * p * c.p_nonempty * g_joint
            + (one - pf) * q * c.p_nonempty * g
            + (one - pf) * c.p_empty * g;
        (q, sum)
    };

    let p_dsucc = match scheme {
        SchemeId::Bcc => {
            let psi31 = psi31_bound(cfg, quad, method)?;
            let p11 = one - psi31;
            let (p12, sum) = three_term(p11);
            b.psi31 = Some(psi31);
            b.psi3 = Some(p11);
            b.psi4 = Some(direct_ok);
            b.p11 = Some(p11);
            b.p12 = Some(p12);
            sum
        }
        SchemeId::Bsir => {
            let omega1 = omega1(cfg, quad, method)?;
            let p22 = one - omega1;
            let (p32, sum) = three_term(p22);
            b.omega1 = Some(omega1);
            b.omega = Some(p22);
            b.phi = Some(direct_ok);
            b.p22 = Some(p22);
            b.p32 = Some(p32);
            sum
        }
        SchemeId::Bstd => {
            let delta = delta_decode(cfg, quad, method)?;
            let lambda_eff = delta * cfg.lambda_sr;
            let chi = chi_bstd(cfg, quad, method)?;
            let p0 = (-T::PI() * lambda_eff * cfg.r_disc * cfg.r_disc).exp();
            b.delta = Some(delta);
            b.lambda_eff = Some(lambda_eff);
            b.chi = Some(chi);
            b.p_dsucc_sd = Some((one - chi) * g);
            b.p_n1_zero = Some(p0);
            let relayed = ((one - p0) - pf * (chi - p0)) * g;
            relayed + (one - pf) * p0 * g
        }
        SchemeId::RandomBaseline => return Err(AnalyticsError::NoModel(scheme.as_str())),
    };
    Ok(b.finish(p_dsucc))
}

/// Breakdown for `scheme` under `cfg`, dispatching on `cfg.direct_link`.
pub fn analyze<T: Scalar>(
    cfg: &ValidatedConfig<T>,
    scheme: SchemeId,
    quad: &Quadrature<T>,
    method: Method,
) -> Result<AnalyticBreakdown<T>, AnalyticsError> {
    if cfg.direct_link {
        return p_succ_direct(cfg, scheme, quad, method);
    }
    match scheme {
        SchemeId::Bcc => p_succ_bcc(cfg, quad, method),
        SchemeId::Bsir => p_succ_bsir(cfg, quad, method),
        SchemeId::Bstd => p_succ_bstd(cfg, quad, method),
        SchemeId::RandomBaseline => Err(AnalyticsError::NoModel(scheme.as_str())),
    }
}
