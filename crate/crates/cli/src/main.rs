use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ehrelay_core::analytics::{analyze, dual_path_checks};
use ehrelay_core::report::{self, CompareReport, Grid, SweepError, SweepSpec};
use ehrelay_core::units::ConfigError;
use ehrelay_core::{simulate, AnalyticsError, Config, Method, Quad, SchemeId, Validated};

const EXIT_CONFIG: u8 = 2;
const EXIT_QUADRATURE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "ehrelay", version, about = "Energy-harvesting relay network simulator and analytical validator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte Carlo estimate of the success probability for one scheme.
    Simulate(SimulateArgs),
    /// Analytical breakdown for one scheme.
    Analyze(AnalyzeArgs),
    /// Simulated and analytic success over a one-parameter grid.
    Sweep(SweepArgs),
    /// Signed gaps between simulation and analysis, with a summary line.
    Compare(CompareArgs),
}

macro_rules! overrides {
    ($($key:ident),* $(,)?) => {
        /// One optional `--<key> <value>` per configuration field.
        #[derive(Args, Debug, Default)]
        struct Overrides {
            $(
                #[arg(
                    long = stringify!($key),
                    value_name = "VALUE",
                    allow_hyphen_values = true,
                    help_heading = "Configuration overrides"
                )]
                $key: Option<String>,
            )*
        }

        impl Overrides {
            #[cfg(test)]
            const KEYS: &'static [&'static str] = &[$(stringify!($key)),*];

            fn apply(&self, cfg: &mut Config) -> Result<(), ConfigError> {
                $(
                    if let Some(v) = &self.$key {
                        cfg.set(stringify!($key), v)?;
                    }
                )*
                Ok(())
            }
        }
    };
}

overrides!(
    lambda_p,
    lambda_sr,
    p_t_dbm,
    p_st_dbm,
    eta,
    a,
    t_block,
    alpha,
    r_disc,
    r_gz,
    gamma_th_db,
    d_sd,
    r_max,
    p_min_dbm,
    p_max_dbm,
    direct_link,
    slot_position_model,
    harvest_threshold,
    literal_direct_events,
    tail_compensation,
    trunc_eps,
);

#[derive(Args, Debug)]
struct ConfigArgs {
    /// `key = value` file applied on top of the baseline.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

impl ConfigArgs {
    fn base(&self) -> Result<Config, ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => Config::from_file(path)?,
            None => Config::baseline(),
        };
        self.overrides.apply(&mut cfg)?;
        Ok(cfg)
    }

    fn validated(&self) -> Result<Validated, ConfigError> {
        self.base()?.validate()
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, default_value_t = 30_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads; defaults to all cores.
    #[arg(long, env = "EHRELAY_WORKERS")]
    workers: Option<NonZeroUsize>,
    /// Write CSV here instead of standard output.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    #[arg(long, default_value = "bsir")]
    scheme: SchemeId,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Auto,
    ClosedForm,
    Quadrature,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Auto => Method::Auto,
            MethodArg::ClosedForm => Method::ClosedForm,
            MethodArg::Quadrature => Method::Quadrature,
        }
    }
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    #[arg(long, default_value = "bsir")]
    scheme: SchemeId,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GridArgs {
    /// Configuration field to vary.
    #[arg(long, value_name = "KEY")]
    param: Option<String>,
    /// Explicit grid, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with_all = ["from", "to", "steps"])]
    values: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true, requires_all = ["to", "steps"])]
    from: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    to: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Space `--from..--to` logarithmically.
    #[arg(long)]
    log: bool,
}

impl GridArgs {
    fn grid(&self) -> Option<Grid> {
        if let Some(v) = &self.values {
            return Some(Grid::Explicit(v.clone()));
        }
        let (from, to, steps) = (self.from?, self.to?, self.steps?);
        Some(if self.log {
            Grid::Log { from, to, steps }
        } else {
            Grid::Linear { from, to, steps }
        })
    }
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_delimiter = ',', default_value = "bcc,bsir,bstd")]
    schemes: Vec<SchemeId>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_delimiter = ',', default_value = "bcc,bsir,bstd")]
    scheme: Vec<SchemeId>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Quadrature(String),
    Io(io::Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<AnalyticsError> for Failure {
    fn from(e: AnalyticsError) -> Self {
        match e {
            AnalyticsError::Quadrature { .. } => Failure::Quadrature(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

impl From<SweepError> for Failure {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::Analytics(a) => a.into(),
            SweepError::Io(io) => Failure::Io(io),
            other => Failure::Config(other.to_string()),
        }
    }
}

fn output(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn sweep_spec(
    grid: &GridArgs,
    schemes: &[SchemeId],
    run: &RunArgs,
    base: &Config,
) -> Result<SweepSpec, Failure> {
    let (parameter, grid) = match (&grid.param, grid.grid()) {
        (Some(p), Some(g)) => (p.clone(), g),
        (Some(_), None) => {
            return Err(Failure::Config("--param needs --values or --from/--to/--steps".into()))
        }
        (None, Some(_)) => return Err(Failure::Config("a grid needs --param".into())),
        // A single point at the configured value.
        (None, None) => ("lambda_p".to_string(), Grid::Explicit(vec![base.lambda_p])),
    };
    Ok(SweepSpec {
        parameter,
        grid,
        schemes: schemes.to_vec(),
        trials: run.trials,
        seed: run.seed,
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    let quad = Quad::default();
    match cli.command {
        Command::Simulate(args) => {
            let cfg = args.cfg.validated()?;
            let sum = simulate(&cfg, args.scheme, args.run.trials.max(1), args.run.seed, args.run.workers);
            let mut out = output(&args.run.out)?;
            report::write_simulate_csv(&mut out, &cfg, &sum)?;
            out.flush()?;
        }
        Command::Analyze(args) => {
            let cfg = args.cfg.validated()?;
            let breakdown = analyze(&cfg, args.scheme, &quad, args.method.into())?;
            if cfg.alpha == 4.0 {
                match dual_path_checks(&cfg, &quad) {
                    Ok(rep) => {
                        for e in rep.failures(1e-8) {
                            eprintln!(
                                "warning: dual-path check {}: closed form {}, quadrature {}, relative error {:.3e}",
                                e.name,
                                report::fmt_num(e.closed_form),
                                report::fmt_num(e.quadrature),
                                e.rel_err()
                            );
                        }
                    }
                    Err(e) => eprintln!("warning: dual-path checks did not complete: {e}"),
                }
            }
            let mut out = output(&args.out)?;
            report::write_analyze_csv(&mut out, &breakdown)?;
            out.flush()?;
        }
        Command::Sweep(args) => {
            let base = args.cfg.base()?;
            let spec = sweep_spec(&args.grid, &args.schemes, &args.run, &base)?;
            let rep = CompareReport::run(&spec, &base, &quad, args.run.workers)?;
            let mut out = output(&args.run.out)?;
            rep.write_csv(&mut out, false)?;
            out.flush()?;
        }
        Command::Compare(args) => {
            let base = args.cfg.base()?;
            let spec = sweep_spec(&args.grid, &args.scheme, &args.run, &base)?;
            let rep = CompareReport::run(&spec, &base, &quad, args.run.workers)?;
            let mut out = output(&args.run.out)?;
            rep.write_csv(&mut out, true)?;
            out.flush()?;
            eprintln!("{}", rep.summary());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Quadrature(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_QUADRATURE)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
