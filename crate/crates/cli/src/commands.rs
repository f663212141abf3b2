//! Subcommand bodies. Each returns the artifact bytes; the caller writes them.

use lglab_core::equilibria::{find_interior_equilibria, hopf_point};
use lglab_core::ode_sim::{detect_limit_cycle, integrate, write_csv};
use lglab_core::qualitative::stochastic_label;
use lglab_core::sde_sim::{
    comparison_bundle_with, ensemble, hitting_time, simulate_path_coupled, stationary_histogram,
    EnsembleConfig, EnsembleStats, HittingStats, NoisePath, Quadrature, StationaryConfig,
    StationaryReport,
};
use lglab_core::{Error, ModelParams};
use serde::{Deserialize, Serialize};

use crate::config::{RunConfig, ScanOptions};
use crate::error::{CliError, CliResult};
use crate::output::{json_bytes, push_row};
use crate::SCHEMA_VERSION;

/// CSV `t,x,y`; with cycle detection a final `# cycle_report {...}` line
/// carries the report as compact JSON.
pub fn ode(cfg: &RunConfig) -> CliResult<Vec<u8>> {
    let p = cfg.params.resolve()?;
    let o = &cfg.ode;
    let traj = integrate(&p, o.init, o.scheme, o.h, o.t_max)?;
    let mut out = Vec::new();
    write_csv(&traj, &mut out)?;
    if o.detect_cycle {
        let line = match detect_limit_cycle(&p, o.init, o.h, o.burn_in(), o.t_max) {
            Ok(r) => serde_json::to_string(&r).expect("cycle report serializes"),
            Err(e @ Error::Inconclusive { .. }) => {
                serde_json::json!({ "inconclusive": e.to_string() }).to_string()
            }
            Err(e) => return Err(e.into()),
        };
        out.extend_from_slice(format!("# cycle_report {line}\n").as_bytes());
    }
    Ok(out)
}

/// CSV `t,x,y`, plus `x_upper,y_upper,x_lower,y_lower` with comparison on.
pub fn sde_path(cfg: &RunConfig) -> CliResult<Vec<u8>> {
    let p = cfg.params.resolve()?;
    let s = &cfg.sde;
    let seed = s.seed()?;
    let n = lglab_core::ode_sim::step_count(s.h, s.t_max);
    let noise = NoisePath::generate(seed, s.h, n);
    let mut buf = String::new();
    if s.comparison {
        if s.coupling != lglab_core::sde_sim::NoiseCoupling::Independent {
            return Err(CliError::Input(
                "comparison columns need independent noise".to_string(),
            ));
        }
        let b = comparison_bundle_with(&p, s.init, &noise, s.t_max, s.scheme, Quadrature::LeftPoint)?;
        buf.push_str("t,x,y,x_upper,y_upper,x_lower,y_lower\n");
        for k in 0..b.times.len() {
            push_row(
                &mut buf,
                &[
                    b.times[k],
                    b.system[k].x,
                    b.system[k].y,
                    b.x_upper[k],
                    b.y_upper[k],
                    b.x_lower[k],
                    b.y_lower[k],
                ],
            );
        }
    } else {
        let path = simulate_path_coupled(&p, s.init, s.scheme, s.coupling, &noise, s.t_max)?;
        buf.push_str("t,x,y\n");
        for (t, st) in path.times.iter().zip(&path.states) {
            push_row(&mut buf, &[*t, st.x, st.y]);
        }
    }
    Ok(buf.into_bytes())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub schema_version: String,
    pub params: ModelParams,
    pub regime: String,
    pub config: EnsembleConfig,
    #[serde(flatten)]
    pub stats: EnsembleStats,
}

pub fn sde_ensemble(cfg: &RunConfig) -> CliResult<Vec<u8>> {
    let p = cfg.params.resolve()?;
    let s = &cfg.sde;
    let seed = s.seed()?;
    let ec = EnsembleConfig {
        scheme: s.scheme,
        coupling: s.coupling,
        h: s.h,
        t_max: s.t_max,
        checkpoints: s.checkpoints(),
        burn_in: s.burn_in(),
        bins: s.bins,
    };
    let stats = ensemble(&p, s.init, &ec, s.paths, seed)?;
    Ok(json_bytes(&EnsembleReport {
        schema_version: SCHEMA_VERSION.to_string(),
        params: p,
        regime: stochastic_label(&p).as_str().to_string(),
        config: ec,
        stats,
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryOutput {
    pub schema_version: String,
    pub params: ModelParams,
    pub config: StationaryConfig,
    #[serde(flatten)]
    pub report: StationaryReport,
}

pub fn sde_stationary(cfg: &RunConfig) -> CliResult<Vec<u8>> {
    let p = cfg.params.resolve()?;
    let s = &cfg.sde;
    let seed = s.seed()?;
    if s.coupling != lglab_core::sde_sim::NoiseCoupling::Independent {
        return Err(CliError::Input(
            "stationary runs use independent noise only".to_string(),
        ));
    }
    let sc = StationaryConfig {
        scheme: s.scheme,
        h: s.h,
        burn_in: s.burn_in(),
        t_max: s.t_max,
        bins: s.bins,
        seed,
        second_seed: s.second_seed.unwrap_or(seed.wrapping_add(1)),
    };
    let report = stationary_histogram(&p, s.init, &sc)?;
    if let Some(w) = &report.warning {
        eprintln!("warning: {w}");
    }
    Ok(json_bytes(&StationaryOutput {
        schema_version: SCHEMA_VERSION.to_string(),
        params: p,
        config: sc,
        report,
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantile {
    pub q: f64,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittingReport {
    pub schema_version: String,
    pub params: ModelParams,
    pub t_cap: f64,
    pub seed0: u64,
    pub quantiles: Vec<Quantile>,
    #[serde(flatten)]
    pub stats: HittingStats,
}

/// Empirical quantile by the nearest-rank rule on sorted data.
fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    let rank = (q * sorted.len() as f64).ceil().max(1.0) as usize;
    sorted[rank.min(sorted.len()) - 1]
}

pub fn sde_hitting(cfg: &RunConfig) -> CliResult<Vec<u8>> {
    let p = cfg.params.resolve()?;
    let s = &cfg.sde;
    let seed = s.seed()?;
    let stats = hitting_time(&p, s.scheme, s.init, s.target.to_target(), s.paths, seed, s.h, s.t_max)?;
    let mut sorted = stats.times.clone();
    sorted.sort_by(f64::total_cmp);
    let quantiles = [0.1, 0.25, 0.5, 0.75, 0.9]
        .iter()
        .map(|&q| Quantile {
            q,
            t: nearest_rank(&sorted, q),
        })
        .collect();
    Ok(json_bytes(&HittingReport {
        schema_version: SCHEMA_VERSION.to_string(),
        params: p,
        t_cap: s.t_max,
        seed0: seed,
        quantiles,
        stats,
    }))
}

/// Equally spaced grid from `from` to `to`, returned ascending.
pub fn scan_grid(o: &ScanOptions) -> CliResult<Vec<f64>> {
    if !(o.from.is_finite() && o.to.is_finite() && o.from != o.to) || o.steps < 2 {
        return Err(CliError::Input(format!(
            "scan needs a finite range with from != to and at least 2 steps, got {} .. {} in {} steps",
            o.from, o.to, o.steps
        )));
    }
    let (lo, hi) = if o.from < o.to { (o.from, o.to) } else { (o.to, o.from) };
    let last = (o.steps - 1) as f64;
    Ok((0..o.steps)
        .map(|i| if i == o.steps - 1 { hi } else { lo + (hi - lo) * i as f64 / last })
        .collect())
}

/// One row per interior equilibrium and grid value; a grid value without
/// interior equilibria gets one row with empty equilibrium columns.
pub fn scan(cfg: &RunConfig) -> CliResult<Vec<u8>> {
    let o = cfg
        .scan
        .ok_or_else(|| CliError::Input("scan needs --scan, --from, --to and --steps".into()))?;
    let base = cfg.params.resolve()?;
    let grid = scan_grid(&o)?;
    let mut buf = format!("{},n,eq,x,y,s,p,taxonomy,b0,lambda,regime\n", o.name.name());
    for (i, &v) in grid.iter().enumerate() {
        let mut p = base;
        o.name.set(&mut p, v);
        p.validate().map_err(|e| {
            CliError::Input(format!("grid point {i} ({} = {v}): {e}", o.name.name()))
        })?;
        let eqs = find_interior_equilibria(&p)?;
        let regime = stochastic_label(&p).as_str();
        if eqs.is_empty() {
            buf.push_str(&format!("{v:.16e},0,,,,,,,,,{regime}\n"));
        }
        for (k, e) in eqs.iter().enumerate() {
            let (b0, lambda) = match hopf_point(&p, e) {
                Ok(h) => (format!("{:.16e}", h.b0), format!("{:.16e}", h.lambda)),
                Err(Error::NoHopf { b0, .. }) => (format!("{b0:.16e}"), String::new()),
                Err(err) => return Err(err.into()),
            };
            buf.push_str(&format!(
                "{v:.16e},{},{k},{:.16e},{:.16e},{:.16e},{:.16e},{:?},{b0},{lambda},{regime}\n",
                eqs.len(),
                e.x,
                e.y,
                e.s,
                e.p_det,
                e.taxonomy,
            ));
        }
    }
    Ok(buf.into_bytes())
}
