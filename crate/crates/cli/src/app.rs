//! Flag parsing and dispatch. Exit codes: 0 success, 1 input or config
//! error, 2 internal inconsistency.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lglab_core::ode_sim::Scheme;
use lglab_core::sde_sim::{NoiseCoupling, SdeScheme};
use lglab_core::{ModelParams, RawParams};

use crate::analysis::analyze;
use crate::commands;
use crate::config::{ParamSource, RunConfig, ScanOptions, ScanParam};
use crate::error::{CliError, CliResult};
use crate::output::{emit, json_bytes};

#[derive(Debug, Parser)]
#[command(name = "lglab", version, about = "Prey-predator model with prey refuge: analysis and simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Equilibria, classification, certificates; JSON report.
    Analyze {
        #[command(flatten)]
        common: CommonArgs,
        /// Hopf point and Lyapunov coefficient of each interior equilibrium.
        #[arg(long)]
        hopf: bool,
        #[command(flatten)]
        ode: OdeArgs,
    },
    /// Deterministic trajectory as CSV.
    Ode {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        ode: OdeArgs,
    },
    /// Stochastic runs; every mode needs --seed.
    Sde {
        #[command(subcommand)]
        mode: SdeMode,
    },
    /// One-parameter sweep as CSV.
    Scan {
        #[command(flatten)]
        common: CommonArgs,
        /// Parameter to vary.
        #[arg(long = "scan", value_enum)]
        name: ScanParam,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum SdeMode {
    /// One sample path as CSV.
    Path {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        sde: SdeArgs,
        /// Add the four comparison processes as extra columns.
        #[arg(long)]
        comparison: bool,
    },
    /// Moments, extinction fractions and histogram over many paths; JSON.
    Ensemble {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        sde: SdeArgs,
        /// Comma-separated checkpoint times (default: the horizon).
        #[arg(long, value_delimiter = ',')]
        checkpoints: Option<Vec<f64>>,
    },
    /// Long-run histogram with ergodicity and uniqueness diagnostics; JSON.
    Stationary {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        sde: SdeArgs,
        /// Seed of the second path (default: seed + 1).
        #[arg(long)]
        second_seed: Option<u64>,
    },
    /// First entry times into an open rectangle; JSON. --t-max is the cap.
    Hitting {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        sde: SdeArgs,
        #[arg(long, allow_negative_numbers = true)]
        x_above: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        x_below: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        y_above: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        y_below: Option<f64>,
    },
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// Start from a saved run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Dimensionless parameter file (flat object, or {"raw": {...}}).
    #[arg(long, conflicts_with = "raw")]
    pub params: Option<PathBuf>,
    /// Raw parameter file (rho1, rho2, beta, alpha1, alpha2, kappa1, kappa2, mu).
    #[arg(long)]
    pub raw: Option<PathBuf>,
    #[arg(long = "a", conflicts_with = "raw", allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long = "b", conflicts_with = "raw", allow_negative_numbers = true)]
    pub b: Option<f64>,
    #[arg(long = "k1", conflicts_with = "raw", allow_negative_numbers = true)]
    pub k1: Option<f64>,
    #[arg(long = "k2", conflicts_with = "raw", allow_negative_numbers = true)]
    pub k2: Option<f64>,
    #[arg(long = "m", conflicts_with = "raw", allow_negative_numbers = true)]
    pub m: Option<f64>,
    #[arg(long)]
    pub sigma1: Option<f64>,
    #[arg(long)]
    pub sigma2: Option<f64>,
    /// Output file; `-` (the default) is stdout.
    #[arg(long)]
    pub out: Option<String>,
    /// Print the resolved configuration as JSON and exit.
    #[arg(long)]
    pub dump_config: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OdeSchemeArg {
    Euler,
    Rk4,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SdeSchemeArg {
    Milstein,
    LogEuler,
}

#[derive(Debug, Args, Default)]
pub struct OdeArgs {
    #[arg(long, value_enum)]
    pub scheme: Option<OdeSchemeArg>,
    #[arg(long = "h")]
    pub h: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub x0: Option<f64>,
    #[arg(long)]
    pub y0: Option<f64>,
    /// Look for a limit cycle on the section y = k2 + x - m.
    #[arg(long)]
    pub detect_cycle: bool,
    /// Burn-in before section returns are recorded (default t_max / 2).
    #[arg(long)]
    pub burn_in: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct SdeArgs {
    #[arg(long, value_enum)]
    pub scheme: Option<SdeSchemeArg>,
    #[arg(long = "h")]
    pub h: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub x0: Option<f64>,
    #[arg(long)]
    pub y0: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub paths: Option<usize>,
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<f64>,
    /// Drive both equations with the predator's Gaussian sequence.
    #[arg(long)]
    pub shared_noise: bool,
}

fn read(path: &PathBuf) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn base_config(c: &CommonArgs) -> CliResult<RunConfig> {
    let mut cfg = match &c.config {
        Some(path) => RunConfig::from_json_str(&read(path)?)?,
        None => RunConfig::default(),
    };

    if let Some(path) = &c.raw {
        let text = read(path)?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("bad JSON in {}: {e}", path.display())))?;
        let inner = value.get("raw").cloned().unwrap_or(value);
        let raw: RawParams = serde_json::from_value(inner)
            .map_err(|e| CliError::Input(format!("bad raw parameters: {e}")))?;
        cfg.params = ParamSource::Raw {
            raw,
            sigma1: 0.0,
            sigma2: 0.0,
        };
    } else if let Some(path) = &c.params {
        cfg.params = ParamSource::Model(ModelParams::from_json_str(&read(path)?)?);
    }

    match &mut cfg.params {
        ParamSource::Model(p) => {
            let set = |slot: &mut f64, v: Option<f64>| {
                if let Some(v) = v {
                    *slot = v;
                }
            };
            set(&mut p.a, c.a);
            set(&mut p.b, c.b);
            set(&mut p.k1, c.k1);
            set(&mut p.k2, c.k2);
            set(&mut p.m, c.m);
            set(&mut p.sigma1, c.sigma1);
            set(&mut p.sigma2, c.sigma2);
        }
        ParamSource::Raw { sigma1, sigma2, .. } => {
            if c.a.or(c.b).or(c.k1).or(c.k2).or(c.m).is_some() {
                return Err(CliError::Input(
                    "dimensionless flags cannot modify raw parameters".to_string(),
                ));
            }
            *sigma1 = c.sigma1.unwrap_or(*sigma1);
            *sigma2 = c.sigma2.unwrap_or(*sigma2);
        }
    }
    if c.out.is_some() {
        cfg.out = c.out.clone();
    }
    Ok(cfg)
}

fn apply_ode(cfg: &mut RunConfig, a: &OdeArgs) {
    let o = &mut cfg.ode;
    if let Some(s) = a.scheme {
        o.scheme = match s {
            OdeSchemeArg::Euler => Scheme::Euler,
            OdeSchemeArg::Rk4 => Scheme::Rk4,
        };
    }
    o.h = a.h.unwrap_or(o.h);
    o.t_max = a.t_max.unwrap_or(o.t_max);
    o.init.x = a.x0.unwrap_or(o.init.x);
    o.init.y = a.y0.unwrap_or(o.init.y);
    o.detect_cycle |= a.detect_cycle;
    if a.burn_in.is_some() {
        o.burn_in = a.burn_in;
    }
}

fn apply_sde(cfg: &mut RunConfig, a: &SdeArgs) {
    let s = &mut cfg.sde;
    if let Some(v) = a.scheme {
        s.scheme = match v {
            SdeSchemeArg::Milstein => SdeScheme::Milstein,
            SdeSchemeArg::LogEuler => SdeScheme::LogEuler,
        };
    }
    s.h = a.h.unwrap_or(s.h);
    s.t_max = a.t_max.unwrap_or(s.t_max);
    s.init.x = a.x0.unwrap_or(s.init.x);
    s.init.y = a.y0.unwrap_or(s.init.y);
    if a.seed.is_some() {
        s.seed = a.seed;
    }
    s.paths = a.paths.unwrap_or(s.paths);
    s.bins = a.bins.unwrap_or(s.bins);
    if a.burn_in.is_some() {
        s.burn_in = a.burn_in;
    }
    if a.shared_noise {
        s.coupling = NoiseCoupling::Shared;
    }
}

enum Job {
    Analyze,
    Ode,
    Path,
    Ensemble,
    Stationary,
    Hitting,
    Scan,
}

fn resolve(cmd: &Command) -> CliResult<(RunConfig, Job, bool)> {
    Ok(match cmd {
        Command::Analyze { common, hopf, ode } => {
            let mut cfg = base_config(common)?;
            cfg.analyze.hopf |= *hopf;
            apply_ode(&mut cfg, ode);
            (cfg, Job::Analyze, common.dump_config)
        }
        Command::Ode { common, ode } => {
            let mut cfg = base_config(common)?;
            apply_ode(&mut cfg, ode);
            (cfg, Job::Ode, common.dump_config)
        }
        Command::Scan {
            common,
            name,
            from,
            to,
            steps,
        } => {
            let mut cfg = base_config(common)?;
            cfg.scan = Some(ScanOptions {
                name: *name,
                from: *from,
                to: *to,
                steps: *steps,
            });
            (cfg, Job::Scan, common.dump_config)
        }
        Command::Sde { mode } => match mode {
            SdeMode::Path {
                common,
                sde,
                comparison,
            } => {
                let mut cfg = base_config(common)?;
                apply_sde(&mut cfg, sde);
                cfg.sde.comparison |= *comparison;
                (cfg, Job::Path, common.dump_config)
            }
            SdeMode::Ensemble {
                common,
                sde,
                checkpoints,
            } => {
                let mut cfg = base_config(common)?;
                apply_sde(&mut cfg, sde);
                if let Some(c) = checkpoints {
                    cfg.sde.checkpoints = c.clone();
                }
                (cfg, Job::Ensemble, common.dump_config)
            }
            SdeMode::Stationary {
                common,
                sde,
                second_seed,
            } => {
                let mut cfg = base_config(common)?;
                apply_sde(&mut cfg, sde);
                if second_seed.is_some() {
                    cfg.sde.second_seed = *second_seed;
                }
                (cfg, Job::Stationary, common.dump_config)
            }
            SdeMode::Hitting {
                common,
                sde,
                x_above,
                x_below,
                y_above,
                y_below,
            } => {
                let mut cfg = base_config(common)?;
                apply_sde(&mut cfg, sde);
                let t = &mut cfg.sde.target;
                t.x_lo = x_above.or(t.x_lo);
                t.x_hi = x_below.or(t.x_hi);
                t.y_lo = y_above.or(t.y_lo);
                t.y_hi = y_below.or(t.y_hi);
                (cfg, Job::Hitting, common.dump_config)
            }
        },
    })
}

/// Runs `job` and writes its artifact; `Ok(false)` means an internal
/// inconsistency was found after the artifact was written.
fn execute(cfg: &RunConfig, job: Job) -> CliResult<bool> {
    let out = cfg.out.as_deref();
    let (bytes, consistent) = match job {
        Job::Analyze => {
            let r = analyze(cfg)?;
            let ok = r.consistency.ok();
            (json_bytes(&r), ok)
        }
        Job::Ode => (commands::ode(cfg)?, true),
        Job::Path => (commands::sde_path(cfg)?, true),
        Job::Ensemble => (commands::sde_ensemble(cfg)?, true),
        Job::Stationary => (commands::sde_stationary(cfg)?, true),
        Job::Hitting => (commands::sde_hitting(cfg)?, true),
        Job::Scan => (commands::scan(cfg)?, true),
    };
    emit(out, &bytes)?;
    Ok(consistent)
}

fn configure_threads() -> CliResult<()> {
    if let Ok(v) = std::env::var("LG_LAB_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| CliError::Input(format!("LG_LAB_THREADS must be a positive integer, got {v:?}")))?;
        // a second call in the same process finds the pool already built
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = configure_threads().and_then(|()| {
        let (cfg, job, dump) = resolve(&cli.command)?;
        if dump {
            emit(None, format!("{}\n", cfg.to_json_string()).as_bytes())?;
            return Ok(true);
        }
        execute(&cfg, job)
    });
    match result {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("error: internal inconsistency: equilibrium count or index sum does not match");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
