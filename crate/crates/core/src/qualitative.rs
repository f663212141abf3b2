//! Certificates for the qualitative results: attracting region, persistence,
//! global stability, absence or presence of limit cycles, and the stochastic
//! regime. Every certificate is a pure function of the parameters.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::equilibria::{count_interior_equilibria, find_interior_equilibria};
use crate::model::{ModelParams, State};

/// The rectangle `[m, 1] x [k2, L)` with `L = 1 + k2 - m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl Region {
    /// Membership with `tol` slack on every side.
    pub fn contains(&self, s: State, tol: f64) -> bool {
        s.x >= self.x_lo - tol
            && s.x <= self.x_hi + tol
            && s.y >= self.y_lo - tol
            && s.y <= self.y_hi + tol
    }
}

pub fn invariant_region(p: &ModelParams) -> Region {
    Region {
        x_lo: p.m,
        x_hi: 1.0,
        y_lo: p.k2,
        y_hi: p.l_bound(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PersistenceRegime {
    UniformlyPersistent,
    WeaklyPersistent,
    PreyExtinction,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PersistenceBranch {
    RefugePositive,
    /// `m = 0`, `a L < k1`.
    WeakPredation,
    /// `m = 0`, `a k2 < k1 <= a L`.
    IntermediatePredation,
    /// `m = 0`, `k1 = a k2`.
    Borderline,
    /// `m = 0`, `k1 < a k2`.
    StrongPredation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersistenceReport {
    pub regime: PersistenceRegime,
    pub liminf_x_bound: Option<f64>,
    pub limsup_x_bound: Option<f64>,
    pub branch: PersistenceBranch,
}

pub fn persistence_report(p: &ModelParams) -> PersistenceReport {
    use PersistenceRegime::*;
    let report = |regime, liminf, limsup, branch| PersistenceReport {
        regime,
        liminf_x_bound: liminf,
        limsup_x_bound: limsup,
        branch,
    };
    if p.m > 0.0 {
        return report(UniformlyPersistent, None, None, PersistenceBranch::RefugePositive);
    }
    let al = p.a * p.l_bound();
    let ak2 = p.a * p.k2;
    let c = 1.0 - p.k1 - p.a;
    if al < p.k1 {
        let lower = (p.k1 - al) / p.k1;
        report(UniformlyPersistent, Some(lower), None, PersistenceBranch::WeakPredation)
    } else if ak2 < p.k1 {
        let root = 0.5 * (c + (c * c + 4.0 * (p.k1 - ak2)).sqrt());
        let upper = (p.k1 / p.a - p.k2).min(root);
        report(WeaklyPersistent, None, Some(upper), PersistenceBranch::IntermediatePredation)
    } else if ak2 == p.k1 {
        if c > 0.0 {
            report(WeaklyPersistent, None, Some(c), PersistenceBranch::Borderline)
        } else {
            report(PreyExtinction, None, None, PersistenceBranch::Borderline)
        }
    } else {
        report(PreyExtinction, None, None, PersistenceBranch::StrongPredation)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeCertificate {
    pub holds: bool,
    pub clause: String,
    pub witness: BTreeMap<String, f64>,
}

impl RegimeCertificate {
    fn new(holds: bool, clause: &str, witness: &[(&str, f64)]) -> Self {
        Self {
            holds,
            clause: clause.to_string(),
            witness: witness.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

/// `2m + k1 >= 1` and (`m > 0` or `4 a k2 <= (1 - k1 - a)^2 + 4 k1`).
///
/// For `m = 0` the second inequality is `Delta_Q >= 0`; it does not by itself
/// give an interior equilibrium (that also needs `a k2 < k1`), so the witness
/// carries the interior count as well.
pub fn global_stability_condition(p: &ModelParams) -> RegimeCertificate {
    let margin_refuge = 2.0 * p.m + p.k1 - 1.0;
    let c = 1.0 - p.k1 - p.a;
    let margin_discriminant = c * c + 4.0 * p.k1 - 4.0 * p.a * p.k2;
    let holds = margin_refuge >= 0.0 && (p.m > 0.0 || margin_discriminant >= 0.0);
    RegimeCertificate::new(
        holds,
        "global_stability",
        &[
            ("two_m_plus_k1_minus_1", margin_refuge),
            ("discriminant_margin", margin_discriminant),
            ("interior_count", count_interior_equilibria(p).n_predicted as f64),
        ],
    )
}

pub const CLAUSE_CYCLE_EXISTS: &str = "limit_cycle_exists";

/// Each sufficient condition for the absence of limit cycles, then the
/// existence clause ([`CLAUSE_CYCLE_EXISTS`]) whose `holds` means a cycle
/// exists.
pub fn no_cycle_conditions(p: &ModelParams) -> Vec<RegimeCertificate> {
    let n = count_interior_equilibria(p).n_predicted;
    let m0 = p.m == 0.0;
    let mut out = Vec::with_capacity(5);

    out.push(RegimeCertificate::new(
        m0 && (n == 0 || n == 2),
        "index_zero_or_two_equilibria",
        &[("m", p.m), ("n", n as f64)],
    ));

    out.push(RegimeCertificate::new(
        m0 && p.b + p.k1 >= 1.0,
        "b_plus_k1",
        &[("b_plus_k1_minus_1", p.b + p.k1 - 1.0)],
    ));

    let dulac_k2 = p.k2 - (1.0 - p.m);
    let dulac_k1 = p.k1 - (1.0 + p.m);
    let dulac_mix = p.a * p.k2 + p.k1 - (2.0 + 1.0 / 12.0);
    out.push(RegimeCertificate::new(
        p.m > 0.0 && dulac_k2 > 0.0 && (dulac_k1 > 0.0 || dulac_mix > 0.0),
        "dulac",
        &[
            ("k2_minus_1_plus_m", dulac_k2),
            ("k1_minus_1_minus_m", dulac_k1),
            ("ak2_plus_k1_minus_25_12", dulac_mix),
        ],
    ));

    let global = global_stability_condition(p);
    out.push(RegimeCertificate {
        clause: "global_stability".to_string(),
        ..global
    });

    let (s, det) = match find_interior_equilibria(p) {
        Ok(eqs) if eqs.len() == 1 => (eqs[0].s, eqs[0].p_det),
        _ => (f64::NAN, f64::NAN),
    };
    out.push(RegimeCertificate::new(
        m0 && n == 1 && s < 0.0 && det > 0.0,
        CLAUSE_CYCLE_EXISTS,
        &[("n", n as f64), ("s", s), ("p", det)],
    ));
    out
}

/// Whether any certificate in [`no_cycle_conditions`] excludes limit cycles.
pub fn cycles_excluded(certs: &[RegimeCertificate]) -> bool {
    certs
        .iter()
        .any(|c| c.holds && c.clause != CLAUSE_CYCLE_EXISTS)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StochasticRegime {
    FullExtinction,
    PreyExtinctionPredatorStationary,
    Stationary,
    Deterministic,
    Undetermined,
}

impl StochasticRegime {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::FullExtinction => "FullExtinction",
            Self::PreyExtinctionPredatorStationary => "PreyExtinctionPredatorStationary",
            Self::Stationary => "Stationary",
            Self::Deterministic => "Deterministic",
            Self::Undetermined => "Undetermined",
        }
    }
}

pub fn stochastic_label(p: &ModelParams) -> StochasticRegime {
    use StochasticRegime::*;
    let s1 = p.sigma1 * p.sigma1;
    let s2 = p.sigma2 * p.sigma2;
    let two_b = 2.0 * p.b;
    if p.sigma1 == 0.0 && p.sigma2 == 0.0 {
        Deterministic
    } else if s1 >= 2.0 && s2 >= two_b {
        FullExtinction
    } else if s1 >= 2.0 && s2 > 0.0 && s2 < two_b {
        PreyExtinctionPredatorStationary
    } else if s1 > 0.0 && s1 < 2.0 && s2 > 0.0 && s2 < two_b && p.m > 0.0 {
        Stationary
    } else {
        Undetermined
    }
}

/// The clause is the regime label; `holds` is false only when no result applies.
pub fn stochastic_regime(p: &ModelParams) -> RegimeCertificate {
    let label = stochastic_label(p);
    RegimeCertificate::new(
        label != StochasticRegime::Undetermined,
        label.as_str(),
        &[
            ("sigma1_sq_minus_2", p.sigma1 * p.sigma1 - 2.0),
            ("sigma2_sq_minus_2b", p.sigma2 * p.sigma2 - 2.0 * p.b),
            ("m", p.m),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: f64, b: f64, k1: f64, k2: f64, m: f64) -> ModelParams {
        ModelParams::new(a, b, k1, k2, m).unwrap()
    }

    #[test]
    fn region_by_substitution() {
        let r = invariant_region(&params(1.0, 1.0, 1.0, 1.0, 0.0));
        assert_eq!((r.x_lo, r.x_hi, r.y_lo, r.y_hi), (0.0, 1.0, 1.0, 2.0));
        let r = invariant_region(&params(0.5, 0.1, 0.08, 0.2, 0.0025));
        assert!((r.y_hi - 1.1975).abs() < 1e-15);
        let r = invariant_region(&params(1.0, 1.0, 1.0, 0.5, 0.5));
        assert_eq!((r.x_lo, r.y_lo, r.y_hi), (0.5, 0.5, 1.0));
    }

    #[test]
    fn persistence_clauses() {
        let r = persistence_report(&params(0.5, 0.1, 1.0, 0.2, 0.0));
        assert_eq!(r.regime, PersistenceRegime::UniformlyPersistent);
        assert!((r.liminf_x_bound.unwrap() - 0.4).abs() < 1e-15);

        let r = persistence_report(&params(1.0, 0.1, 0.2, 0.5, 0.0));
        assert_eq!(r.regime, PersistenceRegime::PreyExtinction);

        let r = persistence_report(&params(1.0, 0.1, 0.2, 0.5, 0.3));
        assert_eq!(r.regime, PersistenceRegime::UniformlyPersistent);

        // a k2 = 0.1 < k1 = 0.3 <= a L = 0.6
        let r = persistence_report(&params(0.5, 0.1, 0.3, 0.2, 0.0));
        assert_eq!(r.branch, PersistenceBranch::IntermediatePredation);
        let c: f64 = 1.0 - 0.3 - 0.5;
        let root = 0.5 * (c + (c * c + 4.0 * 0.2).sqrt());
        assert!((r.limsup_x_bound.unwrap() - root.min(0.3 / 0.5 - 0.2)).abs() < 1e-15);

        let r = persistence_report(&params(0.5, 0.1, 0.2, 0.4, 0.0));
        assert_eq!(r.branch, PersistenceBranch::Borderline);
        assert!((r.limsup_x_bound.unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn global_stability_examples() {
        assert!(global_stability_condition(&params(1.0, 0.1, 0.2, 1.0, 0.5)).holds);
        assert!(global_stability_condition(&params(1.0, 0.1, 1.0, 0.5, 0.0)).holds);
        assert!(!global_stability_condition(&params(0.5, 0.1, 0.08, 0.2, 0.0025)).holds);
    }

    #[test]
    fn refuge_free_certificate_without_interior_point() {
        // Delta_Q > 0 but a k2 > k1: the certificate's inequalities hold while
        // the only attractor is on the predator axis.
        let p = params(1.0, 0.1, 1.0, 1.2, 0.0);
        let c = global_stability_condition(&p);
        assert!(c.holds);
        assert_eq!(c.witness["interior_count"], 0.0);
    }

    #[test]
    fn no_cycle_examples() {
        let find = |certs: &[RegimeCertificate], name: &str| {
            certs.iter().find(|c| c.clause == name).unwrap().holds
        };
        let c = no_cycle_conditions(&params(1.0, 0.5, 1.6, 0.6, 0.5));
        assert!(find(&c, "dulac"));
        let c = no_cycle_conditions(&params(1.0, 0.1, 0.2, 0.5, 0.0));
        assert!(find(&c, "index_zero_or_two_equilibria"));
        let c = no_cycle_conditions(&params(1.0, 0.9, 0.2, 0.5, 0.0));
        assert!(find(&c, "b_plus_k1"));
        assert!(cycles_excluded(&c));
        let c = no_cycle_conditions(&params(0.5, 0.1, 0.08, 0.2, 0.0025));
        assert!(!cycles_excluded(&c));
    }

    #[test]
    fn refuge_free_unstable_point_forces_a_cycle() {
        // k1 = k2 = 0.05, a = 0.8: unique point x* = 0.2 with J11 = 0.44 > b
        let p = params(0.8, 0.01, 0.05, 0.05, 0.0);
        let c = no_cycle_conditions(&p);
        let exists = c.iter().find(|c| c.clause == CLAUSE_CYCLE_EXISTS).unwrap();
        assert!(exists.holds, "{exists:?}");
    }

    #[test]
    fn stochastic_labels() {
        let p = params(0.4, 0.1, 0.08, 0.2, 0.0025);
        let l = |s1, s2| stochastic_label(&p.with_noise(s1, s2).unwrap());
        assert_eq!(l(1.5, 0.5), StochasticRegime::FullExtinction);
        assert_eq!(l(1.5, 0.3), StochasticRegime::PreyExtinctionPredatorStationary);
        assert_eq!(l(0.01, 0.01), StochasticRegime::Stationary);
        assert_eq!(l(0.0, 0.0), StochasticRegime::Deterministic);
        assert_eq!(l(0.01, 0.0), StochasticRegime::Undetermined);
        let p0 = params(0.4, 0.1, 0.08, 0.2, 0.0).with_noise(0.01, 0.01).unwrap();
        assert_eq!(stochastic_label(&p0), StochasticRegime::Undetermined);
        assert!(!stochastic_regime(&p0).holds);
    }
}
