//! Frequency table of verdicts over a seeded ensemble, with checks of
//! the implications that are proven to hold between conditions.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{gen_instance, Distribution, GenSpec};
use crate::certify::{check_instance, CheckOptions, ConditionId, Verdict};
use crate::error::{Error, Result};
use crate::instances::InstanceKind;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionCounts {
    pub condition_id: ConditionId,
    pub certified: usize,
    pub not_certified: usize,
    pub inapplicable: usize,
    pub unsound_condition_holds: usize,
}

impl ConditionCounts {
    fn new(condition_id: ConditionId) -> Self {
        Self { condition_id, certified: 0, not_certified: 0, inapplicable: 0, unsound_condition_holds: 0 }
    }

    fn record(&mut self, v: Verdict) {
        match v {
            Verdict::Certified => self.certified += 1,
            Verdict::NotCertified => self.not_certified += 1,
            Verdict::Inapplicable => self.inapplicable += 1,
            Verdict::UnsoundConditionHolds => self.unsound_condition_holds += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.certified + self.not_certified + self.inapplicable + self.unsound_condition_holds
    }
}

/// `premise` CERTIFIED must imply `conclusion` CERTIFIED.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImplicationCheck {
    pub premise: ConditionId,
    pub conclusion: ConditionId,
    /// Trials where the premise was certified.
    pub premise_certified: usize,
    pub violations: usize,
    pub first_violation_trial: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub class: InstanceKind,
    pub n: usize,
    pub m: usize,
    pub target_rho: Option<f64>,
    pub distribution: Distribution,
    pub seed: u64,
    pub trials: usize,
    /// Trials that produced an instance; every condition's counters sum to it.
    pub sample_size: usize,
    pub generation_failures: usize,
    pub conditions: Vec<ConditionCounts>,
    pub implications: Vec<ImplicationCheck>,
}

impl ComparisonTable {
    pub fn counts(&self, id: ConditionId) -> Option<&ConditionCounts> {
        self.conditions.iter().find(|c| c.condition_id == id)
    }

    pub fn total_violations(&self) -> usize {
        self.implications.iter().map(|i| i.violations).sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let rho = self.target_rho.map_or("none".to_string(), |r| r.to_string());
        let _ = writeln!(
            s,
            "class {} n={} m={} target_rho={} dist={:?} seed={} trials={} (generated {})",
            self.class.as_str(),
            self.n,
            self.m,
            rho,
            self.distribution,
            self.seed,
            self.trials,
            self.sample_size
        );
        let _ = writeln!(s, "{:<26} {:>9} {:>9} {:>9} {:>9}", "condition", "certified", "not", "inapp", "unsound");
        for c in &self.conditions {
            let _ = writeln!(
                s,
                "{:<26} {:>9} {:>9} {:>9} {:>9}",
                c.condition_id.as_str(),
                c.certified,
                c.not_certified,
                c.inapplicable,
                c.unsound_condition_holds
            );
        }
        for i in &self.implications {
            let _ = writeln!(
                s,
                "{} => {}: {} premise certified, {} violations",
                i.premise.as_str(),
                i.conclusion.as_str(),
                i.premise_certified,
                i.violations
            );
        }
        s
    }
}

fn proven_implications(class: InstanceKind) -> Vec<(ConditionId, ConditionId)> {
    use ConditionId::*;
    match class {
        InstanceKind::Gave | InstanceKind::Gavme => vec![(ClassicIII, Spectral), (ClassicIV, IntervalSpectral)],
        InstanceKind::Ngavme => vec![(NgavmeIII, NgavmeRho), (NgavmeSigma, IntervalSpectral)],
        InstanceKind::Sylvester => vec![],
    }
}

/// Runs every applicable certifier on `trials` instances drawn from
/// `spec`, trial `t` using the seed `trial_seed(spec.seed, t)`.
pub fn compare_conditions(spec: &GenSpec, trials: usize, opts: &CheckOptions) -> Result<ComparisonTable> {
    spec.validate()?;
    if trials == 0 {
        return Err(Error::InvalidOptions("trials must be at least 1".into()));
    }
    let outcomes: Vec<Option<Vec<(ConditionId, Verdict)>>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let bundle = gen_instance(&spec.for_trial(t)).ok()?;
            Some(check_instance(&bundle.instance, opts).into_iter().map(|c| (c.condition_id, c.verdict)).collect())
        })
        .collect();

    let mut conditions: Vec<ConditionCounts> = Vec::new();
    let mut implications: Vec<ImplicationCheck> = proven_implications(spec.class)
        .into_iter()
        .map(|(premise, conclusion)| ImplicationCheck {
            premise,
            conclusion,
            premise_certified: 0,
            violations: 0,
            first_violation_trial: None,
        })
        .collect();
    let mut generation_failures = 0;
    for (t, outcome) in outcomes.iter().enumerate() {
        let Some(verdicts) = outcome else {
            generation_failures += 1;
            continue;
        };
        for &(id, v) in verdicts {
            match conditions.iter_mut().find(|c| c.condition_id == id) {
                Some(c) => c.record(v),
                None => {
                    let mut c = ConditionCounts::new(id);
                    c.record(v);
                    conditions.push(c);
                }
            }
        }
        let certified = |id| verdicts.iter().any(|&(i, v)| i == id && v == Verdict::Certified);
        for imp in &mut implications {
            if certified(imp.premise) {
                imp.premise_certified += 1;
                if !certified(imp.conclusion) {
                    imp.violations += 1;
                    imp.first_violation_trial.get_or_insert(t as u64);
                }
            }
        }
    }
    Ok(ComparisonTable {
        class: spec.class,
        n: spec.n,
        m: spec.m,
        target_rho: spec.target_rho,
        distribution: spec.distribution,
        seed: spec.seed,
        trials,
        sample_size: trials - generation_failures,
        generation_failures,
        conditions,
        implications,
    })
}
