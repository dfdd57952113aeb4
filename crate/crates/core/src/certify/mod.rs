//! Unique-solvability certificates.
//!
//! Every check returns a [`Certificate`] carrying the verdict, all the
//! scalars it computed, and the signed margin to the threshold (positive
//! when the inequality holds). Strict inequalities are evaluated on raw
//! computed values; [`CheckOptions::decision_tol`] lets callers demand a
//! positive margin.

mod all;
mod analytic;
mod interval;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use analytic::{
    check_gavme_classic, check_gavme_spectral, check_ngavme, check_sylvester_max, check_sylvester_min_corrected,
    check_sylvester_min_flawed,
};
pub use all::check_instance;
pub use interval::check_interval_spectral;

use crate::matcore::DEFAULT_KRON_CAP;

/// Default cap on the number of enumerated sign patterns, representatives
/// or principal minors.
pub const DEFAULT_ENUM_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConditionId {
    /// ρ(|A⁻¹B|) < 1
    #[serde(rename = "SPECTRAL")]
    Spectral,
    /// σmax(|B|) < σmin(A)
    #[serde(rename = "CLASSIC_I")]
    ClassicI,
    /// σmax(B) < σmin(A)
    #[serde(rename = "CLASSIC_II")]
    ClassicII,
    /// ρ(|A⁻¹||B|) < 1
    #[serde(rename = "CLASSIC_III")]
    ClassicIII,
    /// σmax(A⁻¹B) < 1
    #[serde(rename = "CLASSIC_IV")]
    ClassicIV,
    /// ρ((I ⊗ A⁻¹B)D) < 1 over diagonal D with entries in [-1, 1]
    #[serde(rename = "INTERVAL_SPECTRAL")]
    IntervalSpectral,
    /// σmax(|B|) < σmin(AC⁻¹)
    #[serde(rename = "NGAVME_I")]
    NgavmeI,
    /// σmax(B) < σmin(AC⁻¹)
    #[serde(rename = "NGAVME_II")]
    NgavmeII,
    /// ρ(|CA⁻¹||B|) < 1
    #[serde(rename = "NGAVME_III")]
    NgavmeIII,
    /// σmax(CA⁻¹B) < 1
    #[serde(rename = "NGAVME_IV")]
    NgavmeIV,
    /// ρ(|CA⁻¹B|) < 1
    #[serde(rename = "NGAVME_RHO")]
    NgavmeRho,
    /// σmax(CA⁻¹B) < 1, via the interval bound chain
    #[serde(rename = "NGAVME_SIGMA")]
    NgavmeSigma,
    /// σmin(B⁻¹AC⁻¹) > 1
    #[serde(rename = "NGAVME_CORO")]
    NgavmeCoro,
    /// σmax(LK⁻¹)σmax(A⁻¹B) < 1
    #[serde(rename = "SYLVESTER_MAX")]
    SylvesterMax,
    /// σmin(KL⁻¹)σmin(B⁻¹A) > 1
    #[serde(rename = "SYLVESTER_MIN_CORRECTED")]
    SylvesterMinCorrected,
    /// σmin(LK⁻¹)σmin(A⁻¹B) > 1. Known to be unsound.
    #[serde(rename = "SYLVESTER_MIN_FLAWED")]
    SylvesterMinFlawed,
    /// column W-property of {Q+P, −Q+P}
    #[serde(rename = "GAVME_W_I")]
    GavmeWI,
    /// column W-property of {I, (Q+P)⁻¹(−Q+P)}
    #[serde(rename = "GAVME_W_II")]
    GavmeWII,
    /// (Q+P)⁻¹(−Q+P) is a P-matrix
    #[serde(rename = "GAVME_W_III")]
    GavmeWIII,
    /// (Q+P)F₁ + (−Q+P)F₂ invertible for nonnegative diagonal F₁, F₂
    #[serde(rename = "GAVME_W_IV")]
    GavmeWIV,
    /// Q+P and −Q+P strictly column diagonally dominant
    #[serde(rename = "GAVME_DD_I")]
    GavmeDdI,
    /// Q+P, −Q+P and all column representatives irreducibly column diagonally dominant
    #[serde(rename = "GAVME_DD_II")]
    GavmeDdII,
    #[serde(rename = "NGAVME_W_I")]
    NgavmeWI,
    #[serde(rename = "NGAVME_W_II")]
    NgavmeWII,
    #[serde(rename = "NGAVME_W_III")]
    NgavmeWIII,
    #[serde(rename = "NGAVME_W_IV")]
    NgavmeWIV,
    #[serde(rename = "NGAVME_DD_I")]
    NgavmeDdI,
    #[serde(rename = "NGAVME_DD_II")]
    NgavmeDdII,
}

impl ConditionId {
    /// False only for the flawed Sylvester condition.
    pub fn is_sound(self) -> bool {
        self != ConditionId::SylvesterMinFlawed
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ConditionId::Spectral => "SPECTRAL",
            ConditionId::ClassicI => "CLASSIC_I",
            ConditionId::ClassicII => "CLASSIC_II",
            ConditionId::ClassicIII => "CLASSIC_III",
            ConditionId::ClassicIV => "CLASSIC_IV",
            ConditionId::IntervalSpectral => "INTERVAL_SPECTRAL",
            ConditionId::NgavmeI => "NGAVME_I",
            ConditionId::NgavmeII => "NGAVME_II",
            ConditionId::NgavmeIII => "NGAVME_III",
            ConditionId::NgavmeIV => "NGAVME_IV",
            ConditionId::NgavmeRho => "NGAVME_RHO",
            ConditionId::NgavmeSigma => "NGAVME_SIGMA",
            ConditionId::NgavmeCoro => "NGAVME_CORO",
            ConditionId::SylvesterMax => "SYLVESTER_MAX",
            ConditionId::SylvesterMinCorrected => "SYLVESTER_MIN_CORRECTED",
            ConditionId::SylvesterMinFlawed => "SYLVESTER_MIN_FLAWED",
            ConditionId::GavmeWI => "GAVME_W_I",
            ConditionId::GavmeWII => "GAVME_W_II",
            ConditionId::GavmeWIII => "GAVME_W_III",
            ConditionId::GavmeWIV => "GAVME_W_IV",
            ConditionId::GavmeDdI => "GAVME_DD_I",
            ConditionId::GavmeDdII => "GAVME_DD_II",
            ConditionId::NgavmeWI => "NGAVME_W_I",
            ConditionId::NgavmeWII => "NGAVME_W_II",
            ConditionId::NgavmeWIII => "NGAVME_W_III",
            ConditionId::NgavmeWIV => "NGAVME_W_IV",
            ConditionId::NgavmeDdI => "NGAVME_DD_I",
            ConditionId::NgavmeDdII => "NGAVME_DD_II",
        }
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Certified,
    NotCertified,
    /// A hypothesis (usually invertibility) failed; named in the notes.
    Inapplicable,
    /// The known-unsound condition holds. Never evidence of uniqueness.
    UnsoundConditionHolds,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Certified => "CERTIFIED",
            Verdict::NotCertified => "NOT_CERTIFIED",
            Verdict::Inapplicable => "INAPPLICABLE",
            Verdict::UnsoundConditionHolds => "UNSOUND_CONDITION_HOLDS",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub condition_id: ConditionId,
    pub verdict: Verdict,
    pub witnesses: BTreeMap<String, f64>,
    /// Signed distance from the threshold, positive when the inequality
    /// holds. `None` when the condition could not be evaluated.
    pub margin: Option<f64>,
    pub notes: String,
}

impl Certificate {
    pub fn inapplicable(id: ConditionId, note: impl Into<String>) -> Self {
        Self {
            condition_id: id,
            verdict: Verdict::Inapplicable,
            witnesses: BTreeMap::new(),
            margin: None,
            notes: note.into(),
        }
    }

    /// Certificate for an inequality whose margin is already computed.
    pub(crate) fn from_margin(id: ConditionId, margin: f64, tol: f64, witnesses: &[(&str, f64)]) -> Self {
        let holds = margin > tol;
        let verdict = match (holds, id.is_sound()) {
            (true, true) => Verdict::Certified,
            (true, false) => Verdict::UnsoundConditionHolds,
            (false, _) => Verdict::NotCertified,
        };
        Self {
            condition_id: id,
            verdict,
            witnesses: witnesses.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            margin: Some(margin),
            notes: String::new(),
        }
    }

    pub(crate) fn with_note(mut self, note: impl Into<String>) -> Self {
        let note = note.into();
        if self.notes.is_empty() {
            self.notes = note;
        } else {
            self.notes.push_str("; ");
            self.notes.push_str(&note);
        }
        self
    }

    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }

    pub fn witness(&self, name: &str) -> Option<f64> {
        self.witnesses.get(name).copied()
    }
}

/// Tolerances and caps shared by the certifiers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckOptions {
    /// Minimum margin a strict inequality must clear (default 0).
    pub decision_tol: f64,
    /// Cap on 2^k enumerations (sign vertices, representatives, minors).
    pub enum_cap: u64,
    /// Cap on either dimension of a Kronecker lift.
    pub kron_cap: usize,
    /// Number of random diagonal pairs in the invertibility probe.
    pub probe_samples: usize,
    pub probe_seed: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            decision_tol: 0.0,
            enum_cap: DEFAULT_ENUM_CAP,
            kron_cap: DEFAULT_KRON_CAP,
            probe_samples: 200,
            probe_seed: 0x5eed,
        }
    }
}

/// True when at least one sound certificate is CERTIFIED.
pub fn any_sound_certified(certs: &[Certificate]) -> bool {
    certs.iter().any(|c| c.condition_id.is_sound() && c.is_certified())
}
