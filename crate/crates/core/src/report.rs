//! CSV output, parameter sweeps and simulation-vs-analysis comparisons.
//!
//! Numbers are written with nine significant digits, `.` as the decimal
//! separator and `\n` line endings, so output is byte-stable for fixed inputs.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::num::NonZeroUsize;

use thiserror::Error;

use crate::analytics::{analyze, AnalyticBreakdown, AnalyticsError, Method, BREAKDOWN_COLUMNS};
use crate::quadrature::Quadrature;
use crate::scheme::SchemeId;
use crate::simulator::{simulate_schemes, EstimateCI, Flag, SimulationSummary};
use crate::units::{ConfigError, ConfigValue, SystemConfig, ValidatedConfig, CONFIG_KEYS};

/// `%.9g`-style formatting: nine significant digits, trailing zeros dropped,
/// exponent form outside `[1e-4, 1e9)`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (8 - exp).max(0) as usize;
    strip_zeros(&format!("{x:.decimals$}")).to_string()
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

fn fmt_value(v: ConfigValue<f64>) -> String {
    match v {
        ConfigValue::Num(x) => fmt_num(x),
        ConfigValue::OptNum(x) => fmt_opt(x),
        ConfigValue::Flag(b) => b.to_string(),
        ConfigValue::Word(w) => w.to_string(),
    }
}

/// Configuration columns: every key, then the derived linear values.
pub fn config_header() -> Vec<String> {
    CONFIG_KEYS
        .iter()
        .map(|k| k.to_string())
        .chain(["p_t_mw", "p_st_mw", "gamma_th_lin"].map(String::from))
        .collect()
}

pub fn config_cells(cfg: &ValidatedConfig<f64>) -> Vec<String> {
    CONFIG_KEYS
        .iter()
        .map(|k| fmt_value(cfg.get(k).expect("known key")))
        .chain([cfg.p_t_mw, cfg.p_st_mw, cfg.gamma_th_lin].map(fmt_num))
        .collect()
}

fn write_line<W: Write>(out: &mut W, cells: &[String]) -> io::Result<()> {
    out.write_all(cells.join(",").as_bytes())?;
    out.write_all(b"\n")
}

/// Header of the `simulate` CSV.
pub fn simulate_header() -> Vec<String> {
    let mut h = vec!["scheme".to_string(), "analysed".to_string()];
    h.extend(config_header());
    h.extend(["trials", "seed", "p_hat", "ci_low", "ci_high"].map(String::from));
    h.extend(Flag::ALL[1..].iter().map(|f| format!("freq_{}", f.as_str())));
    h.push("decode_set_mean".into());
    h
}

pub fn simulate_cells(cfg: &ValidatedConfig<f64>, sum: &SimulationSummary) -> Vec<String> {
    let e = sum.success();
    let mut row = vec![
        sum.scheme.as_str().to_string(),
        sum.scheme.is_analysed().to_string(),
    ];
    row.extend(config_cells(cfg));
    row.extend([
        e.trials.to_string(),
        e.seed.to_string(),
        fmt_num(e.p_hat),
        fmt_num(e.ci_low),
        fmt_num(e.ci_high),
    ]);
    row.extend(Flag::ALL[1..].iter().map(|&f| fmt_num(sum.flag(f).p_hat)));
    row.push(fmt_num(sum.decode_set_mean().0));
    row
}

pub fn write_simulate_csv<W: Write>(
    out: &mut W,
    cfg: &ValidatedConfig<f64>,
    sum: &SimulationSummary,
) -> io::Result<()> {
    write_line(out, &simulate_header())?;
    write_line(out, &simulate_cells(cfg, sum))
}

pub fn analyze_header() -> Vec<String> {
    let mut h = vec!["scheme".to_string(), "direct_link".to_string()];
    h.extend(BREAKDOWN_COLUMNS.iter().map(|c| c.to_string()));
    h
}

pub fn analyze_cells(b: &AnalyticBreakdown<f64>) -> Vec<String> {
    let mut row = vec![b.scheme.as_str().to_string(), b.direct_link.to_string()];
    row.extend(b.values().into_iter().map(fmt_opt));
    row
}

pub fn write_analyze_csv<W: Write>(out: &mut W, b: &AnalyticBreakdown<f64>) -> io::Result<()> {
    write_line(out, &analyze_header())?;
    write_line(out, &analyze_cells(b))
}

/// Values a sweep visits.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Explicit(Vec<f64>),
    Linear { from: f64, to: f64, steps: usize },
    Log { from: f64, to: f64, steps: usize },
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let spaced = |from: f64, to: f64, steps: usize, map: &dyn Fn(f64) -> f64| -> Vec<f64> {
            if steps == 1 {
                return vec![from];
            }
            (0..steps)
                .map(|i| {
                    if i + 1 == steps {
                        to
                    } else {
                        map(i as f64 / (steps - 1) as f64)
                    }
                })
                .collect()
        };
        match *self {
            Grid::Explicit(ref v) => v.clone(),
            Grid::Linear { from, to, steps } => spaced(from, to, steps, &|t| from + (to - from) * t),
            Grid::Log { from, to, steps } => {
                let (a, b) = (from.log10(), to.log10());
                spaced(from, to, steps, &|t| 10f64.powf(a + (b - a) * t))
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("sweep grid is empty")]
    EmptyGrid,
    #[error("log grid needs positive endpoints")]
    NonPositiveLog,
    #[error("`{0}` is not a numeric configuration field")]
    NotNumeric(String),
    #[error("grid point {index} ({parameter} = {value}) is invalid: {source}")]
    InvalidPoint {
        index: usize,
        parameter: String,
        value: String,
        #[source]
        source: ConfigError,
    },
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// One-parameter sweep over a base configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: String,
    pub grid: Grid,
    pub schemes: Vec<SchemeId>,
    pub trials: u64,
    pub seed: u64,
}

impl SweepSpec {
    /// Validated configurations for every grid point, failing on the first
    /// invalid one.
    pub fn configs(
        &self,
        base: &SystemConfig<f64>,
    ) -> Result<Vec<(f64, ValidatedConfig<f64>)>, SweepError> {
        if !matches!(base.get(&self.parameter), Some(ConfigValue::Num(_) | ConfigValue::OptNum(_))) {
            return Err(SweepError::NotNumeric(self.parameter.clone()));
        }
        if let Grid::Log { from, to, .. } = self.grid {
            if !(from > 0.0 && to > 0.0) {
                return Err(SweepError::NonPositiveLog);
            }
        }
        let points = self.grid.points();
        if points.is_empty() {
            return Err(SweepError::EmptyGrid);
        }
        points
            .into_iter()
            .enumerate()
            .map(|(index, v)| {
                let mut cfg = base.clone();
                let fail = |source| SweepError::InvalidPoint {
                    index,
                    parameter: self.parameter.clone(),
                    value: fmt_num(v),
                    source,
                };
                cfg.set(&self.parameter, &format!("{v:e}")).map_err(fail)?;
                Ok((v, cfg.validate().map_err(fail)?))
            })
            .collect()
    }
}

/// Simulated and analytic success at one grid point for one scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparePoint {
    pub value: f64,
    pub scheme: SchemeId,
    pub simulated: EstimateCI,
    /// `None` for the random baseline.
    pub analytic: Option<AnalyticBreakdown<f64>>,
}

impl ComparePoint {
    /// `p̂ − P_succ`.
    pub fn gap(&self) -> Option<f64> {
        self.analytic.as_ref().map(|a| self.simulated.p_hat - a.p_succ)
    }

    pub fn gap_in_ci(&self) -> Option<bool> {
        self.analytic.as_ref().map(|a| self.simulated.contains(a.p_succ))
    }
}

/// Results over a grid, ordered by grid point then scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub parameter: String,
    pub points: Vec<ComparePoint>,
}

impl CompareReport {
    pub fn run(
        spec: &SweepSpec,
        base: &SystemConfig<f64>,
        quad: &Quadrature<f64>,
        workers: Option<NonZeroUsize>,
    ) -> Result<Self, SweepError> {
        let configs = spec.configs(base)?;
        let mut points = Vec::with_capacity(configs.len() * spec.schemes.len());
        for (value, cfg) in &configs {
            let sims = simulate_schemes(cfg, &spec.schemes, spec.trials, spec.seed, workers);
            for (&scheme, sim) in spec.schemes.iter().zip(sims) {
                let simulated = sim.success();
                let analytic = if scheme.is_analysed() {
                    Some(analyze(cfg, scheme, quad, Method::Auto)?)
                } else {
                    None
                };
                points.push(ComparePoint {
                    value: *value,
                    scheme,
                    simulated,
                    analytic,
                });
            }
        }
        Ok(Self {
            parameter: spec.parameter.clone(),
            points,
        })
    }

    pub fn header(with_gap: bool) -> Vec<String> {
        let mut h: Vec<String> = [
            "parameter",
            "value",
            "scheme",
            "analysed",
            "trials",
            "seed",
            "p_hat",
            "ci_low",
            "ci_high",
            "p_succ_analytic",
        ]
        .map(String::from)
        .to_vec();
        if with_gap {
            h.extend(["gap", "gap_in_ci"].map(String::from));
        }
        h
    }

    /// Sweep table (`with_gap = false`) or comparison table.
    pub fn write_csv<W: Write>(&self, out: &mut W, with_gap: bool) -> io::Result<()> {
        write_line(out, &Self::header(with_gap))?;
        for p in &self.points {
            let e = &p.simulated;
            let mut row = vec![
                self.parameter.clone(),
                fmt_num(p.value),
                p.scheme.as_str().to_string(),
                p.scheme.is_analysed().to_string(),
                e.trials.to_string(),
                e.seed.to_string(),
                fmt_num(e.p_hat),
                fmt_num(e.ci_low),
                fmt_num(e.ci_high),
                fmt_opt(p.analytic.as_ref().map(|a| a.p_succ)),
            ];
            if with_gap {
                row.push(fmt_opt(p.gap()));
                row.push(p.gap_in_ci().map(|b| b.to_string()).unwrap_or_default());
            }
            write_line(out, &row)?;
        }
        Ok(())
    }

    /// `inside/compared` points with the analytic value in the interval,
    /// and the largest absolute gap.
    pub fn summary(&self) -> String {
        let compared: Vec<&ComparePoint> = self.points.iter().filter(|p| p.analytic.is_some()).collect();
        let inside = compared.iter().filter(|p| p.gap_in_ci() == Some(true)).count();
        let max_gap = compared
            .iter()
            .filter_map(|p| p.gap())
            .fold(0.0_f64, |m, g| m.max(g.abs()));
        let mut s = String::new();
        let _ = write!(
            s,
            "analytic inside 95% interval at {inside}/{} points; max |gap| = {}",
            compared.len(),
            fmt_num(max_gap)
        );
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_matches_printf_g() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (0.1, "0.1"),
            (1.0 / 3.0, "0.333333333"),
            (123456789.0, "123456789"),
            (1234567891.0, "1.23456789e+09"),
            (1e-5, "1e-05"),
            (1e-4, "0.0001"),
            (1.5e-6, "1.5e-06"),
            (316.227766016838, "316.227766"),
            (0.999999999999, "1"),
            (99999999.99, "100000000"),
            (f64::INFINITY, "inf"),
        ];
        for (x, s) in cases {
            assert_eq!(fmt_num(x), s, "{x}");
        }
    }

    #[test]
    fn grids() {
        assert_eq!(Grid::Linear { from: -5.0, to: 10.0, steps: 16 }.points()[5], 0.0);
        let g = Grid::Log { from: 1e-3, to: 1e-1, steps: 3 }.points();
        assert_eq!(g.len(), 3);
        assert!((g[1] - 1e-2).abs() < 1e-15);
        assert_eq!(g[2], 1e-1);
        assert_eq!(Grid::Linear { from: 2.0, to: 9.0, steps: 1 }.points(), vec![2.0]);
    }

    #[test]
    fn invalid_point_aborts_sweep() {
        let spec = SweepSpec {
            parameter: "alpha".into(),
            grid: Grid::Explicit(vec![4.0, 3.0, 2.0, 1.5]),
            schemes: vec![SchemeId::Bcc],
            trials: 10,
            seed: 1,
        };
        let mut base = SystemConfig::baseline();
        base.trunc_eps = 1e3;
        match spec.configs(&base) {
            Err(SweepError::InvalidPoint { index, .. }) => assert_eq!(index, 2),
            other => panic!("{other:?}"),
        }
        let spec = SweepSpec {
            parameter: "direct_link".into(),
            ..spec
        };
        assert!(matches!(spec.configs(&base), Err(SweepError::NotNumeric(_))));
    }

    #[test]
    fn csv_rows_line_up_with_headers() {
        let cfg = SystemConfig::baseline().validate().unwrap();
        let sum = crate::simulator::simulate(&cfg, SchemeId::RandomBaseline, 50, 2, None);
        assert_eq!(simulate_header().len(), simulate_cells(&cfg, &sum).len());
        let q = Quadrature::default();
        let b = analyze(&cfg, SchemeId::Bsir, &q, Method::Auto).unwrap();
        assert_eq!(analyze_header().len(), analyze_cells(&b).len());
        let mut buf = Vec::new();
        write_analyze_csv(&mut buf, &b).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.ends_with('\n') && !text.contains('\r'));
        assert_eq!(text.lines().count(), 2);
    }

    #[test]
    fn compare_gaps_are_exact() {
        let spec = SweepSpec {
            parameter: "lambda_sr".into(),
            grid: Grid::Explicit(vec![0.0, 1.0]),
            schemes: vec![SchemeId::Bcc, SchemeId::RandomBaseline],
            trials: 200,
            seed: 3,
        };
        let r = CompareReport::run(&spec, &SystemConfig::baseline(), &Quadrature::default(), None).unwrap();
        assert_eq!(r.points.len(), 4);
        let empty = &r.points[0];
        assert_eq!(empty.simulated.p_hat, 0.0);
        assert_eq!(empty.gap(), Some(0.0));
        assert!(r.points[1].analytic.is_none());
        for p in r.points.iter().filter(|p| p.analytic.is_some()) {
            assert_eq!(p.gap().unwrap(), p.simulated.p_hat - p.analytic.as_ref().unwrap().p_succ);
        }
        let mut buf = Vec::new();
        r.write_csv(&mut buf, true).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 5);
        assert!(r.summary().contains("/2 points"));
    }
}
