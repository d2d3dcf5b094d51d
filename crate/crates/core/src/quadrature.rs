//! Composite Gauss-Legendre quadrature with panel doubling.
//!
//! Finite intervals are split into 1, 2, 4, … equal panels until two
//! successive estimates agree to the requested relative tolerance. Integrals
//! over `[0, ∞)` are mapped onto `[0, 1)` with `x = s·t/(1−t)`.

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
    #[error("quadrature did not converge: estimate {value:.12e}, last change {error:.3e} after {panels} panels")]
    NotConverged { value: f64, error: f64, panels: usize },
}

/// Node count and tolerances for every numerical integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<T> {
    /// Gauss-Legendre nodes per panel.
    pub nodes: usize,
    /// Relative change between successive doublings that counts as converged.
    pub rel_tol: T,
    /// Magnitude below which an oscillatory integrand's envelope is dropped.
    pub osc_cutoff: T,
    /// Upper bound on panel doublings (finite intervals).
    pub max_doublings: u32,
}

impl<T: Scalar> Default for QuadratureSpec<T> {
    fn default() -> Self {
        Self {
            nodes: 128,
            rel_tol: T::lit(1e-9).max(T::epsilon() * T::lit(64.0)),
            osc_cutoff: T::lit(1e-12).max(T::epsilon()),
            max_doublings: 14,
        }
    }
}

impl<T: Scalar> QuadratureSpec<T> {
    pub fn validate(&self) -> Result<(), QuadratureError> {
        if self.nodes < 16 {
            return Err(QuadratureError::InvalidSpec(format!(
                "node count {} below 16",
                self.nodes
            )));
        }
        if !(self.rel_tol > T::zero()) || !(self.osc_cutoff > T::zero()) {
            return Err(QuadratureError::InvalidSpec(
                "tolerances must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes;
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: T) -> Self {
        self.rel_tol = rel_tol;
        self
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Scalar> GaussLegendre<T> {
    /// Newton iteration on `P_n`, computed in `f64` and rounded to `T`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = T::lit(-x);
            nodes[n - 1 - i] = T::lit(x);
            weights[i] = T::lit(w);
            weights[n - 1 - i] = T::lit(w);
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Single-panel rule on `[a, b]`.
    pub fn apply<F: FnMut(T) -> T>(&self, mut f: F, a: T, b: T) -> T {
        let half = (b - a) / T::lit(2.0);
        let mid = (a + b) / T::lit(2.0);
        let mut acc = T::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + *w * f(mid + half * *x);
        }
        acc * half
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// An integral estimate and the last observed change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
}

/// A quadrature rule bound to its spec. Build once, reuse everywhere.
#[derive(Debug, Clone)]
pub struct Quadrature<T> {
    spec: QuadratureSpec<T>,
    rule: GaussLegendre<T>,
}

impl<T: Scalar> Default for Quadrature<T> {
    fn default() -> Self {
        Self::new(QuadratureSpec::default()).expect("default spec is valid")
    }
}

impl<T: Scalar> Quadrature<T> {
    pub fn new(spec: QuadratureSpec<T>) -> Result<Self, QuadratureError> {
        spec.validate()?;
        Ok(Self {
            rule: GaussLegendre::new(spec.nodes),
            spec,
        })
    }

    pub fn spec(&self) -> &QuadratureSpec<T> {
        &self.spec
    }

    pub fn rule(&self) -> &GaussLegendre<T> {
        &self.rule
    }

    /// Composite rule with `panels` equal panels.
    pub fn composite<F: FnMut(T) -> T>(&self, mut f: F, a: T, b: T, panels: usize) -> T {
        let h = (b - a) / T::from_usize(panels).expect("panel count");
        let mut acc = T::zero();
        for k in 0..panels {
            let lo = a + h * T::from_usize(k).unwrap();
            let hi = if k + 1 == panels { b } else { lo + h };
            acc = acc + self.rule.apply(&mut f, lo, hi);
        }
        acc
    }

    /// Adaptive integral over a finite interval.
    pub fn integrate<F: FnMut(T) -> T>(
        &self,
        mut f: F,
        a: T,
        b: T,
    ) -> Result<Estimate<T>, QuadratureError> {
        if a == b {
            return Ok(Estimate {
                value: T::zero(),
                error: T::zero(),
            });
        }
        let mut prev = self.composite(&mut f, a, b, 1);
        let mut panels = 1usize;
        let mut change = T::infinity();
        for _ in 0..self.spec.max_doublings {
            panels *= 2;
            let cur = self.composite(&mut f, a, b, panels);
            change = (cur - prev).abs();
            if !cur.is_finite() {
                break;
            }
            if change <= self.spec.rel_tol * cur.abs() {
                return Ok(Estimate {
                    value: cur,
                    error: change,
                });
            }
            prev = cur;
        }
        Err(QuadratureError::NotConverged {
            value: prev.as_f64(),
            error: change.as_f64(),
            panels,
        })
    }

    /// `∫₀^∞ f(x) dx` via `x = scale·t/(1−t)`.
    pub fn integrate_semi_infinite<F: FnMut(T) -> T>(
        &self,
        mut f: F,
        scale: T,
    ) -> Result<Estimate<T>, QuadratureError> {
        self.integrate(
            |t| {
                let u = T::one() - t;
                let x = scale * t / u;
                let v = f(x) * scale / (u * u);
                if v.is_finite() {
                    v
                } else {
                    T::zero()
                }
            },
            T::zero(),
            T::one(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rule_is_exact_for_polynomials() {
        let gl = GaussLegendre::<f64>::new(16);
        let w: f64 = gl.weights.iter().sum();
        assert_relative_eq!(w, 2.0, max_relative = 1e-14);
        // Degree 31 is the highest exact degree for 16 nodes.
        let v = gl.apply(|x| x.powi(30) + x.powi(31), -1.0, 1.0);
        assert_relative_eq!(v, 2.0 / 31.0, max_relative = 1e-12);
        let gl = GaussLegendre::<f64>::new(128);
        assert_relative_eq!(gl.apply(|x| x * x, 0.0, 3.0), 9.0, max_relative = 1e-13);
    }

    #[test]
    fn finite_integrals() {
        let q = Quadrature::<f64>::default();
        let v = q.integrate(|x| x.sin(), 0.0, std::f64::consts::PI).unwrap();
        assert_relative_eq!(v.value, 2.0, max_relative = 1e-13);
        let v = q.integrate(|x| (-x * x).exp(), 0.0, 10.0).unwrap();
        assert_relative_eq!(v.value, std::f64::consts::PI.sqrt() / 2.0, max_relative = 1e-13);
        assert_eq!(q.integrate(|x| x, 1.0, 1.0).unwrap().value, 0.0);
    }

    #[test]
    fn semi_infinite_integrals() {
        let q = Quadrature::<f64>::default();
        let v = q.integrate_semi_infinite(|x| (-x).exp(), 1.0).unwrap();
        assert_relative_eq!(v.value, 1.0, max_relative = 1e-12);
        // ∫ x/(1+x⁴) dx = π/4.
        let v = q.integrate_semi_infinite(|x| x / (1.0 + x.powi(4)), 1.0).unwrap();
        assert_relative_eq!(v.value, std::f64::consts::FRAC_PI_4, max_relative = 1e-11);
        let v = q.integrate_semi_infinite(|x| 1.0 / (1.0 + x * x), 3.0).unwrap();
        assert_relative_eq!(v.value, std::f64::consts::FRAC_PI_2, max_relative = 1e-11);
    }

    #[test]
    fn non_convergence_is_reported() {
        let spec = QuadratureSpec::<f64>::default().with_rel_tol(1e-15);
        let q = Quadrature::new(QuadratureSpec {
            max_doublings: 2,
            ..spec
        })
        .unwrap();
        let err = q.integrate(|x| x.abs().sqrt().recip(), -1.0, 1.0).unwrap_err();
        assert!(matches!(err, QuadratureError::NotConverged { panels: 4, .. }));
    }

    #[test]
    fn spec_validation() {
        let bad = QuadratureSpec::<f64>::default().with_nodes(8);
        assert!(Quadrature::new(bad).is_err());
        let bad = QuadratureSpec::<f64>::default().with_rel_tol(0.0);
        assert!(Quadrature::new(bad).is_err());
    }

    #[test]
    fn f32_rule() {
        let q = Quadrature::<f32>::new(QuadratureSpec::default().with_nodes(32)).unwrap();
        let v = q.integrate(|x| x.exp(), 0.0, 1.0).unwrap();
        assert!((v.value - (std::f32::consts::E - 1.0)).abs() < 1e-5);
    }
}
