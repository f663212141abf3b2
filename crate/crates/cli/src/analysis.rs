use lglab_core::equilibria::{
    count_interior_equilibria, find_interior_equilibria, hopf_point, index_sum_check,
    trivial_equilibria, CountReport, Equilibrium, HopfData, IndexReport,
};
use lglab_core::ode_sim::{detect_limit_cycle, CycleReport};
use lglab_core::qualitative::{
    cycles_excluded, global_stability_condition, invariant_region, no_cycle_conditions,
    persistence_report, stochastic_regime, PersistenceReport, RegimeCertificate, Region,
};
use lglab_core::{Error, ModelParams, RawParams};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::SCHEMA_VERSION;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopfEntry {
    pub x: f64,
    pub y: f64,
    pub result: Option<HopfData>,
    /// Why no Hopf point exists, when `result` is empty.
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CycleOutcome {
    Report(Box<CycleReport>),
    Inconclusive { inconclusive: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Consistency {
    /// Located roots agree with the predicted count.
    pub count_matches_roots: bool,
    /// `None` when a non-hyperbolic equilibrium makes the index sum moot.
    pub index_sum_matches: Option<bool>,
}

impl Consistency {
    pub fn ok(&self) -> bool {
        self.count_matches_roots && self.index_sum_matches != Some(false)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Qualitative {
    pub invariant_region: Region,
    pub persistence: PersistenceReport,
    pub global_stability: RegimeCertificate,
    pub no_cycle: Vec<RegimeCertificate>,
    pub cycles_excluded: bool,
    pub stochastic_regime: RegimeCertificate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: String,
    pub params: ModelParams,
    pub raw_params: Option<RawParams>,
    pub trivial_equilibria: Vec<Equilibrium>,
    pub count: CountReport,
    /// Interior equilibria, ascending in x.
    pub equilibria: Vec<Equilibrium>,
    pub index_sum: Option<IndexReport>,
    pub index_sum_skipped: Option<String>,
    pub qualitative: Qualitative,
    pub hopf: Option<Vec<HopfEntry>>,
    pub cycle: Option<CycleOutcome>,
    pub consistency: Consistency,
}

pub fn analyze(cfg: &RunConfig) -> CliResult<AnalysisReport> {
    let p = cfg.params.resolve()?;
    let count = count_interior_equilibria(&p);
    let interior = find_interior_equilibria(&p)?;

    let (index_sum, index_sum_skipped) = match index_sum_check(&p, &interior) {
        Ok(r) => (Some(r), None),
        Err(e @ Error::NonHyperbolicPresent { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };

    let hopf = cfg.analyze.hopf.then(|| {
        interior
            .iter()
            .map(|e| {
                let (result, reason) = match hopf_point(&p, e) {
                    Ok(h) => (Some(h), None),
                    Err(err) => (None, Some(err.to_string())),
                };
                HopfEntry {
                    x: e.x,
                    y: e.y,
                    result,
                    reason,
                }
            })
            .collect()
    });

    let cycle = if cfg.ode.detect_cycle {
        let o = &cfg.ode;
        Some(match detect_limit_cycle(&p, o.init, o.h, o.burn_in(), o.t_max) {
            Ok(r) => CycleOutcome::Report(Box::new(r)),
            Err(e @ Error::Inconclusive { .. }) => CycleOutcome::Inconclusive {
                inconclusive: e.to_string(),
            },
            Err(e) => return Err(e.into()),
        })
    } else {
        None
    };

    let no_cycle = no_cycle_conditions(&p);
    let consistency = Consistency {
        count_matches_roots: count.n_predicted == interior.len(),
        index_sum_matches: index_sum.as_ref().map(|r| r.pass),
    };

    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION.to_string(),
        params: p,
        raw_params: cfg.params.raw(),
        trivial_equilibria: trivial_equilibria(&p),
        count,
        equilibria: interior,
        index_sum,
        index_sum_skipped,
        qualitative: Qualitative {
            invariant_region: invariant_region(&p),
            persistence: persistence_report(&p),
            global_stability: global_stability_condition(&p),
            cycles_excluded: cycles_excluded(&no_cycle),
            no_cycle,
            stochastic_regime: stochastic_regime(&p),
        },
        hopf,
        cycle,
        consistency,
    })
}
