//! Energy-harvesting underlay relay network: stochastic-geometry simulator
//! and analytical success probabilities.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix it to `f64`.

// `!(x > 0.0)` style checks are kept so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod quadrature;
pub mod report;
pub mod scalar;
pub mod scheme;
pub mod simulator;
pub mod stochgeom;
pub mod units;

pub use analytics::{AnalyticBreakdown, AnalyticsError, Method};
pub use quadrature::{Quadrature, QuadratureError, QuadratureSpec};
pub use scalar::Scalar;
pub use scheme::SchemeId;
pub use simulator::{simulate, simulate_schemes, EstimateCI, Flag, RealizationOutcome, SimulationSummary};
pub use stochgeom::{Point, PointField, RngStream};
pub use units::{ConfigError, SystemConfig, ValidatedConfig};

pub type Config = SystemConfig<f64>;
pub type Validated = ValidatedConfig<f64>;
pub type Field = PointField<f64>;
pub type Breakdown = AnalyticBreakdown<f64>;
pub type Quad = Quadrature<f64>;
