//! Configuration, unit conversions and validation.
//!
//! Everything downstream of [`SystemConfig::validate`] works in linear units:
//! milliwatts, meters, seconds and plain ratios. Decibel quantities only
//! appear in the configuration itself and in reports.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::scalar::Scalar;

/// Errors raised by unit conversions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum UnitsError {
    #[error("non-finite input {0}")]
    NonFinite(f64),
}

/// Converts a power in dBm to milliwatts.
pub fn dbm_to_linear<T: Scalar>(x: T) -> Result<T, UnitsError> {
    db_to_linear(x)
}

/// Converts a ratio in dB to a plain ratio.
pub fn db_to_linear<T: Scalar>(x: T) -> Result<T, UnitsError> {
    if !x.is_finite() {
        return Err(UnitsError::NonFinite(x.as_f64()));
    }
    Ok(T::lit(10.0).powf(x / T::lit(10.0)))
}

/// Converts a positive ratio to dB.
pub fn linear_to_db<T: Scalar>(x: T) -> Result<T, UnitsError> {
    if !x.is_finite() || x <= T::zero() {
        return Err(UnitsError::NonFinite(x.as_f64()));
    }
    Ok(T::lit(10.0) * x.log10())
}

/// How primary-transmitter positions relate across the slots of one block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SlotPositionModel {
    /// Fresh PT positions for every slot (harvest, ST→SR, SR→SD).
    #[default]
    Independent,
    /// One PT position set per realization; only fading is redrawn.
    Static,
}

/// Which harvest threshold on `K` is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HarvestThreshold {
    /// `(1-a)/2 · P_st / (η P_t)`, the threshold implied by the energy budget.
    #[default]
    Energy,
    /// `(1-a) · P_st / (2 a η P_t)`, kept for literal reproduction.
    Literal,
}

macro_rules! keyword_enum {
    ($ty:ty { $($variant:path => $name:literal),+ $(,)? }) => {
        impl $ty {
            pub fn as_str(&self) -> &'static str {
                match self { $($variant => $name),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s.trim() {
                    $($name => Ok($variant),)+
                    other => Err(format!(
                        "unknown value `{other}` (expected one of: {})",
                        [$($name),+].join(", ")
                    )),
                }
            }
        }
    };
}

keyword_enum!(SlotPositionModel {
    SlotPositionModel::Independent => "independent",
    SlotPositionModel::Static => "static",
});

keyword_enum!(HarvestThreshold {
    HarvestThreshold::Energy => "energy",
    HarvestThreshold::Literal => "literal",
});

/// All physical and protocol parameters of the network.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig<T> {
    /// Density of PTs and of PRs (nodes / m²).
    pub lambda_p: T,
    /// Density of candidate relays inside the disc (nodes / m²).
    pub lambda_sr: T,
    /// PT transmit power, dBm.
    pub p_t_dbm: T,
    /// Secondary transmit power threshold, dBm.
    pub p_st_dbm: T,
    /// Harvesting efficiency.
    pub eta: T,
    /// Fraction of the block spent harvesting.
    pub a: T,
    /// Block duration, seconds.
    pub t_block: T,
    /// Path-loss exponent.
    pub alpha: T,
    /// Relay disc radius around ST, meters.
    pub r_disc: T,
    /// Guard-zone radius around every PR, meters.
    pub r_gz: T,
    /// SIR decoding threshold, dB.
    pub gamma_th_db: T,
    /// ST–SD separation, meters.
    pub d_sd: T,
    /// Truncation radius of the primary fields in simulation, meters.
    pub r_max: T,
    /// Optional feasibility bounds on `p_st_dbm`.
    pub p_min_dbm: Option<T>,
    pub p_max_dbm: Option<T>,
    /// Whether the ST–SD link exists.
    pub direct_link: bool,
    pub slot_position_model: SlotPositionModel,
    pub harvest_threshold: HarvestThreshold,
    /// Drop the direct branch when the relay decoded but sits in a guard zone.
    pub literal_direct_events: bool,
    /// Add the mean interference of the field beyond `r_max` to every sum.
    pub tail_compensation: bool,
    /// Admissible truncation error, as a fraction of `P_st`.
    pub trunc_eps: T,
}

/// Configuration keys, in the order used for file output and CSV columns.
pub const CONFIG_KEYS: [&str; 21] = [
    "lambda_p",
    "lambda_sr",
    "p_t_dbm",
    "p_st_dbm",
    "eta",
    "a",
    "t_block",
    "alpha",
    "r_disc",
    "r_gz",
    "gamma_th_db",
    "d_sd",
    "r_max",
    "p_min_dbm",
    "p_max_dbm",
    "direct_link",
    "slot_position_model",
    "harvest_threshold",
    "literal_direct_events",
    "tail_compensation",
    "trunc_eps",
];

/// One configuration value, for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConfigValue<T> {
    Num(T),
    OptNum(Option<T>),
    Flag(bool),
    Word(&'static str),
}

/// A single violated invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: {message}")]
    BadValue { key: String, message: String },
    #[error("invalid configuration:\n{}", format_diagnostics(.0))]
    Invalid(Vec<Diagnostic>),
}

fn format_diagnostics(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| format!("  {d}"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        other => Err(format!("expected a boolean, got `{other}`")),
    }
}

fn parse_num<T: Scalar>(s: &str) -> Result<T, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("expected a number, got `{}`", s.trim()))?;
    T::from_f64(v).ok_or_else(|| format!("{v} not representable"))
}

fn parse_opt_num<T: Scalar>(s: &str) -> Result<Option<T>, String> {
    match s.trim() {
        "" | "none" => Ok(None),
        other => parse_num(other).map(Some),
    }
}

impl<T: Scalar> Default for SystemConfig<T> {
    fn default() -> Self {
        Self::baseline()
    }
}

impl<T: Scalar> SystemConfig<T> {
    /// The reference operating point: T = 1 ms, a = 0.5, η = 0.8, α = 4,
    /// R = 1 m, SD at (2, 0), γ_th = −10 dB, P_t = 25 dBm, P_st = −2 dBm,
    /// λ_p = 0.01, λ_sr = 1, r_gz = 1 m.
    pub fn baseline() -> Self {
        Self {
            lambda_p: T::lit(0.01),
            lambda_sr: T::lit(1.0),
            p_t_dbm: T::lit(25.0),
            p_st_dbm: T::lit(-2.0),
            eta: T::lit(0.8),
            a: T::lit(0.5),
            t_block: T::lit(1e-3),
            alpha: T::lit(4.0),
            r_disc: T::lit(1.0),
            r_gz: T::lit(1.0),
            gamma_th_db: T::lit(-10.0),
            d_sd: T::lit(2.0),
            r_max: T::lit(50.0),
            p_min_dbm: None,
            p_max_dbm: None,
            direct_link: false,
            slot_position_model: SlotPositionModel::Independent,
            harvest_threshold: HarvestThreshold::Energy,
            literal_direct_events: false,
            tail_compensation: true,
            trunc_eps: T::lit(1e-2),
        }
    }

    /// Sets one field from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |message: String| ConfigError::BadValue {
            key: key.to_string(),
            message,
        };
        match key {
            "lambda_p" => self.lambda_p = parse_num(value).map_err(bad)?,
            "lambda_sr" => self.lambda_sr = parse_num(value).map_err(bad)?,
            "p_t_dbm" => self.p_t_dbm = parse_num(value).map_err(bad)?,
            "p_st_dbm" => self.p_st_dbm = parse_num(value).map_err(bad)?,
            "eta" => self.eta = parse_num(value).map_err(bad)?,
            "a" => self.a = parse_num(value).map_err(bad)?,
            "t_block" => self.t_block = parse_num(value).map_err(bad)?,
            "alpha" => self.alpha = parse_num(value).map_err(bad)?,
            "r_disc" => self.r_disc = parse_num(value).map_err(bad)?,
            "r_gz" => self.r_gz = parse_num(value).map_err(bad)?,
            "gamma_th_db" => self.gamma_th_db = parse_num(value).map_err(bad)?,
            "d_sd" => self.d_sd = parse_num(value).map_err(bad)?,
            "r_max" => self.r_max = parse_num(value).map_err(bad)?,
            "p_min_dbm" => self.p_min_dbm = parse_opt_num(value).map_err(bad)?,
            "p_max_dbm" => self.p_max_dbm = parse_opt_num(value).map_err(bad)?,
            "direct_link" => self.direct_link = parse_bool(value).map_err(bad)?,
            "slot_position_model" => self.slot_position_model = value.parse().map_err(bad)?,
            "harvest_threshold" => self.harvest_threshold = value.parse().map_err(bad)?,
            "literal_direct_events" => {
                self.literal_direct_events = parse_bool(value).map_err(bad)?
            }
            "tail_compensation" => self.tail_compensation = parse_bool(value).map_err(bad)?,
            "trunc_eps" => self.trunc_eps = parse_num(value).map_err(bad)?,
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Reads the value of one field.
    pub fn get(&self, key: &str) -> Option<ConfigValue<T>> {
        use ConfigValue::*;
        Some(match key {
            "lambda_p" => Num(self.lambda_p),
            "lambda_sr" => Num(self.lambda_sr),
            "p_t_dbm" => Num(self.p_t_dbm),
            "p_st_dbm" => Num(self.p_st_dbm),
            "eta" => Num(self.eta),
            "a" => Num(self.a),
            "t_block" => Num(self.t_block),
            "alpha" => Num(self.alpha),
            "r_disc" => Num(self.r_disc),
            "r_gz" => Num(self.r_gz),
            "gamma_th_db" => Num(self.gamma_th_db),
            "d_sd" => Num(self.d_sd),
            "r_max" => Num(self.r_max),
            "p_min_dbm" => OptNum(self.p_min_dbm),
            "p_max_dbm" => OptNum(self.p_max_dbm),
            "direct_link" => Flag(self.direct_link),
            "slot_position_model" => Word(self.slot_position_model.as_str()),
            "harvest_threshold" => Word(self.harvest_threshold.as_str()),
            "literal_direct_events" => Flag(self.literal_direct_events),
            "tail_compensation" => Flag(self.tail_compensation),
            "trunc_eps" => Num(self.trunc_eps),
            _ => return None,
        })
    }

    /// Applies `key = value` lines on top of `self`. `#` starts a comment.
    pub fn apply_kv_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: idx + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Baseline overridden by the contents of a key-value file.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut cfg = Self::baseline();
        cfg.apply_kv_text(&text)?;
        Ok(cfg)
    }

    /// Serializes to the key-value file format.
    pub fn to_kv_text(&self) -> String {
        let mut out = String::new();
        for key in CONFIG_KEYS {
            let value = match self.get(key).expect("listed key") {
                ConfigValue::Num(v) => format!("{v}"),
                ConfigValue::OptNum(Some(v)) => format!("{v}"),
                ConfigValue::OptNum(None) => "none".to_string(),
                ConfigValue::Flag(b) => b.to_string(),
                ConfigValue::Word(w) => w.to_string(),
            };
            out.push_str(&format!("{key} = {value}\n"));
        }
        out
    }

    /// Mean aggregate interference (mW) contributed by PTs beyond `r_max`.
    pub fn tail_mean_interference(&self, p_t_mw: T) -> T {
        let two = T::lit(2.0);
        two * T::PI() * self.lambda_p * p_t_mw * self.r_max.powf(two - self.alpha)
            / (self.alpha - two)
    }

    /// Standard deviation (mW) of the interference from PTs beyond `r_max`
    /// under unit-mean exponential fading.
    pub fn tail_std_interference(&self, p_t_mw: T) -> T {
        let two = T::lit(2.0);
        let var = T::lit(4.0) * T::PI() * self.lambda_p * self.r_max.powf(two - two * self.alpha)
            / (two * self.alpha - two);
        p_t_mw * var.sqrt()
    }

    /// Checks every invariant and freezes the configuration.
    pub fn validate(&self) -> Result<ValidatedConfig<T>, ConfigError> {
        let mut diags = Vec::new();
        let mut fail = |field: &'static str, message: &str| {
            diags.push(Diagnostic {
                field,
                message: message.to_string(),
            })
        };
        let zero = T::zero();
        let one = T::one();

        for key in CONFIG_KEYS {
            let finite = match self.get(key) {
                Some(ConfigValue::Num(v)) | Some(ConfigValue::OptNum(Some(v))) => v.is_finite(),
                _ => true,
            };
            if !finite {
                fail(key, "must be finite");
            }
        }
        if !(self.alpha > T::lit(2.0)) {
            fail("alpha", "alpha must exceed 2");
        }
        if !(self.a > zero && self.a < one) {
            fail("a", "a in open interval (0,1)");
        }
        if !(self.eta > zero && self.eta <= one) {
            fail("eta", "eta in half-open interval (0,1]");
        }
        if !(self.lambda_p >= zero) {
            fail("lambda_p", "lambda_p must be >= 0");
        }
        if !(self.lambda_sr >= zero) {
            fail("lambda_sr", "lambda_sr must be >= 0");
        }
        if !(self.r_disc > zero) {
            fail("r_disc", "r_disc must be > 0");
        }
        if !(self.d_sd > zero) {
            fail("d_sd", "d_sd must be > 0");
        }
        if !(self.r_gz >= zero) {
            fail("r_gz", "r_gz must be >= 0");
        }
        if !(self.t_block > zero) {
            fail("t_block", "t_block must be > 0");
        }
        if !(self.trunc_eps > zero) {
            fail("trunc_eps", "trunc_eps must be > 0");
        }
        let two = T::lit(2.0);
        if !(self.r_max >= two * self.r_disc.max(self.d_sd)) {
            fail("r_max", "r_max must be at least 2 * max(r_disc, d_sd)");
        }
        if let Some(lo) = self.p_min_dbm {
            if !(lo <= self.p_st_dbm) {
                fail("p_st_dbm", "p_st_dbm below p_min_dbm");
            }
        }
        if let Some(hi) = self.p_max_dbm {
            if !(self.p_st_dbm <= hi) {
                fail("p_st_dbm", "p_st_dbm above p_max_dbm");
            }
        }

        if !diags.is_empty() {
            return Err(ConfigError::Invalid(diags));
        }
        // Finite inputs were checked above, so the conversions cannot fail.
        let p_t_mw = dbm_to_linear(self.p_t_dbm).expect("finite");
        let p_st_mw = dbm_to_linear(self.p_st_dbm).expect("finite");
        let gamma_th_lin = db_to_linear(self.gamma_th_db).expect("finite");
        let residual = if self.tail_compensation {
            self.tail_std_interference(p_t_mw)
        } else {
            self.tail_mean_interference(p_t_mw)
        };
        if !(residual <= self.trunc_eps * p_st_mw) {
            return Err(ConfigError::Invalid(vec![Diagnostic {
                field: "r_max",
                message: format!(
                    "truncation error {:.3e} mW beyond r_max exceeds trunc_eps * p_st = {:.3e} mW",
                    residual.as_f64(),
                    (self.trunc_eps * p_st_mw).as_f64()
                ),
            }]));
        }
        Ok(ValidatedConfig {
            cfg: self.clone(),
            p_t_mw,
            p_st_mw,
            gamma_th_lin,
        })
    }
}

/// A configuration that passed [`SystemConfig::validate`], with linear-unit
/// fields pre-computed. Immutable; share freely across workers.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedConfig<T> {
    cfg: SystemConfig<T>,
    pub p_t_mw: T,
    pub p_st_mw: T,
    pub gamma_th_lin: T,
}

impl<T: Scalar> ValidatedConfig<T> {
    pub fn config(&self) -> &SystemConfig<T> {
        &self.cfg
    }

    /// Threshold `σ` on the normalized harvest `K = E_h / (η P_t T)`.
    pub fn harvest_threshold_k(&self) -> T {
        let c = &self.cfg;
        let base = (T::one() - c.a) / T::lit(2.0) * self.p_st_mw / (c.eta * self.p_t_mw);
        match c.harvest_threshold {
            HarvestThreshold::Energy => base,
            HarvestThreshold::Literal => base / c.a,
        }
    }

    /// Energy ST needs for its slot, `E_st = P_st (1-a) T / 2`, in mJ.
    pub fn required_energy_mj(&self) -> T {
        self.p_st_mw * (T::one() - self.cfg.a) * self.cfg.t_block / T::lit(2.0)
    }

    /// Interference added to truncated sums in simulation (mW of a PT field).
    pub fn tail_interference(&self) -> T {
        if self.cfg.tail_compensation {
            self.cfg.tail_mean_interference(self.p_t_mw)
        } else {
            T::zero()
        }
    }

    /// Returns a copy with one field changed, re-validated.
    pub fn with(&self, key: &str, value: &str) -> Result<Self, ConfigError> {
        let mut cfg = self.cfg.clone();
        cfg.set(key, value)?;
        cfg.validate()
    }
}

impl<T> std::ops::Deref for ValidatedConfig<T> {
    type Target = SystemConfig<T>;

    fn deref(&self) -> &Self::Target {
        &self.cfg
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn dbm_examples() {
        assert_eq!(dbm_to_linear(0.0_f64).unwrap(), 1.0);
        assert_relative_eq!(dbm_to_linear(25.0_f64).unwrap(), 316.2278, epsilon = 1e-4);
        assert_relative_eq!(dbm_to_linear(-2.0_f64).unwrap(), 0.6310, epsilon = 1e-4);
        assert!(dbm_to_linear(f64::NAN).is_err());
        assert!(dbm_to_linear(f64::INFINITY).is_err());
    }

    #[test]
    fn db_examples() {
        assert_eq!(db_to_linear(0.0_f64).unwrap(), 1.0);
        assert_relative_eq!(db_to_linear(-10.0_f64).unwrap(), 0.1, max_relative = 1e-15);
        assert_relative_eq!(db_to_linear(10.0_f64).unwrap(), 10.0, max_relative = 1e-15);
        assert!(db_to_linear(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn baseline_is_valid() {
        let v = SystemConfig::<f64>::baseline().validate().unwrap();
        assert_relative_eq!(v.p_t_mw, 316.227766, max_relative = 1e-9);
        assert_relative_eq!(v.gamma_th_lin, 0.1, max_relative = 1e-15);
        assert_relative_eq!(v.required_energy_mj(), v.p_st_mw * 0.25e-3, max_relative = 1e-15);
    }

    fn diag_fields(cfg: &SystemConfig<f64>) -> Vec<(&'static str, String)> {
        match cfg.validate() {
            Err(ConfigError::Invalid(d)) => d.into_iter().map(|d| (d.field, d.message)).collect(),
            other => panic!("expected diagnostics, got {other:?}"),
        }
    }

    #[test]
    fn alpha_two_rejected() {
        let mut cfg = SystemConfig::<f64>::baseline();
        cfg.alpha = 2.0;
        let d = diag_fields(&cfg);
        assert!(d.contains(&("alpha", "alpha must exceed 2".to_string())), "{d:?}");
    }

    #[test]
    fn degenerate_slot_rejected() {
        let mut cfg = SystemConfig::<f64>::baseline();
        cfg.a = 0.0;
        let d = diag_fields(&cfg);
        assert!(d.contains(&("a", "a in open interval (0,1)".to_string())));
    }

    #[test]
    fn one_diagnostic_per_violation() {
        let mut cfg = SystemConfig::<f64>::baseline();
        cfg.eta = 1.5;
        cfg.lambda_sr = -1.0;
        cfg.r_max = 3.0;
        let fields: Vec<_> = diag_fields(&cfg).into_iter().map(|d| d.0).collect();
        assert_eq!(fields, vec!["eta", "lambda_sr", "r_max"]);
    }

    #[test]
    fn power_bounds_checked() {
        let mut cfg = SystemConfig::<f64>::baseline();
        cfg.p_min_dbm = Some(0.0);
        cfg.p_max_dbm = Some(10.0);
        let d = diag_fields(&cfg);
        assert_eq!(d[0].0, "p_st_dbm");
        cfg.p_st_dbm = 5.0;
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn truncation_bound_enforced() {
        let mut cfg = SystemConfig::<f64>::baseline();
        cfg.tail_compensation = false;
        cfg.trunc_eps = 1e-6;
        assert_eq!(diag_fields(&cfg)[0].0, "r_max");
        cfg.tail_compensation = true;
        cfg.trunc_eps = 1e-2;
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn kv_round_trip_and_comments() {
        let mut cfg = SystemConfig::<f64>::baseline();
        cfg.apply_kv_text("# comment\nlambda_p = 0.05 # inline\n\ndirect_link = true\nslot_position_model = static\np_max_dbm = 20\n")
            .unwrap();
        assert_eq!(cfg.lambda_p, 0.05);
        assert!(cfg.direct_link);
        assert_eq!(cfg.slot_position_model, SlotPositionModel::Static);
        assert_eq!(cfg.p_max_dbm, Some(20.0));
        let mut again = SystemConfig::<f64>::baseline();
        again.apply_kv_text(&cfg.to_kv_text()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn parse_errors_name_the_problem() {
        let mut cfg = SystemConfig::<f64>::baseline();
        assert!(matches!(cfg.apply_kv_text("bogus = 1"), Err(ConfigError::UnknownKey(k)) if k == "bogus"));
        assert!(matches!(cfg.apply_kv_text("alpha 4"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(cfg.set("alpha", "four"), Err(ConfigError::BadValue { .. })));
        let err = SystemConfig::<f64>::from_file("/nonexistent/dir/cfg.txt").unwrap_err();
        assert!(err.to_string().contains("/nonexistent/dir/cfg.txt"));
    }

    #[test]
    fn f32_config_validates() {
        let v = SystemConfig::<f32>::baseline().validate().unwrap();
        assert!((v.p_st_mw - 0.630_957_3).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn db_round_trip(exp in -6.0f64..6.0) {
            let x = 10f64.powf(exp);
            let back = db_to_linear(linear_to_db(x).unwrap()).unwrap();
            prop_assert!(((back - x) / x).abs() < 1e-12);
        }

        #[test]
        fn validate_is_idempotent(lp in 0.0f64..0.1, pst in -10.0f64..10.0, alpha in 2.5f64..6.0) {
            let mut cfg = SystemConfig::<f64>::baseline();
            cfg.lambda_p = lp;
            cfg.p_st_dbm = pst;
            cfg.alpha = alpha;
            if let Ok(v) = cfg.validate() {
                prop_assert_eq!(v.config().validate().unwrap(), v);
            }
        }
    }
}
