//! Entailment soundness/completeness, label-based confusion metrics,
//! filtered-vs-raw deltas and the lexical overlap baseline.
//!
//! Ratios with a zero denominator are `None` and serialize as `null`; they
//! are never coerced to 0 or 1.

mod confusion;
mod delta;
mod lexical;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::evidence::Labels;
use crate::kb::Ontology;
use crate::verifier::{Verdict, VerdictStatus};

pub use confusion::{confusion_vs_labels, ConfusionCounts, ConfusionStats, ConfusionSummary};
pub use delta::{delta, DeltaEntry, DeltaSummary};
pub use lexical::{bleu, rouge_l, rouge_l_corpus, LexicalError};

/// Micro soundness at or above this value meets the safety target.
pub const SOUNDNESS_TARGET: f64 = 0.99;

pub(crate) fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportScore {
    pub soundness: Option<f64>,
    pub completeness: Option<f64>,
    pub claimed: usize,
    pub entailed: usize,
    pub supported: usize,
}

/// Scores a consistent verdict; `None` for inconsistent or malformed ones.
pub fn report_score(verdict: &Verdict) -> Option<ReportScore> {
    if verdict.status != VerdictStatus::Consistent {
        return None;
    }
    let supported = verdict.claimed.intersection(&verdict.entailed).count();
    Some(ReportScore {
        soundness: ratio(supported, verdict.claimed.len()),
        completeness: ratio(supported, verdict.entailed.len()),
        claimed: verdict.claimed.len(),
        entailed: verdict.entailed.len(),
        supported,
    })
}

/// |entailed ∩ claimed| / |claimed|.
pub fn report_soundness(verdict: &Verdict) -> Option<f64> {
    report_score(verdict).and_then(|s| s.soundness)
}

/// |entailed ∩ claimed| / |entailed|.
pub fn report_completeness(verdict: &Verdict) -> Option<f64> {
    report_score(verdict).and_then(|s| s.completeness)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub n_total: usize,
    pub n_consistent: usize,
    pub n_inconsistent: usize,
    pub n_malformed: usize,
    pub claimed_total: usize,
    pub entailed_total: usize,
    pub supported_total: usize,
    pub micro_soundness: Option<f64>,
    pub micro_completeness: Option<f64>,
    pub macro_soundness: Option<f64>,
    pub macro_soundness_defined: usize,
    pub macro_completeness: Option<f64>,
    pub macro_completeness_defined: usize,
    pub soundness_target: f64,
    pub soundness_target_met: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confusion: Option<ConfusionSummary>,
}

/// Aggregates entailment metrics over consistent verdicts; inconsistent and
/// malformed verdicts are only counted.
pub fn aggregate(verdicts: &[Verdict]) -> MetricsSummary {
    let mut s = MetricsSummary {
        n_total: verdicts.len(),
        soundness_target: SOUNDNESS_TARGET,
        ..Default::default()
    };
    let mut sound = Vec::new();
    let mut complete = Vec::new();
    for v in verdicts {
        match v.status {
            VerdictStatus::Inconsistent => s.n_inconsistent += 1,
            VerdictStatus::Malformed => s.n_malformed += 1,
            VerdictStatus::Consistent => {
                s.n_consistent += 1;
                let score = report_score(v).expect("consistent verdict");
                s.claimed_total += score.claimed;
                s.entailed_total += score.entailed;
                s.supported_total += score.supported;
                sound.extend(score.soundness);
                complete.extend(score.completeness);
            }
        }
    }
    s.micro_soundness = ratio(s.supported_total, s.claimed_total);
    s.micro_completeness = ratio(s.supported_total, s.entailed_total);
    s.macro_soundness = mean(&sound);
    s.macro_soundness_defined = sound.len();
    s.macro_completeness = mean(&complete);
    s.macro_completeness_defined = complete.len();
    s.soundness_target_met = s.micro_soundness.is_some_and(|m| m >= SOUNDNESS_TARGET);
    s
}

/// [`aggregate`] plus confusion counts against labels keyed by report id.
/// Every non-malformed verdict whose id has labels contributes, with its
/// claimed set as the prediction.
pub fn summarize(
    verdicts: &[Verdict],
    labels: Option<&HashMap<String, Labels>>,
    ontology: &Ontology,
) -> MetricsSummary {
    let mut summary = aggregate(verdicts);
    if let Some(labels) = labels {
        let items: Vec<_> = verdicts
            .iter()
            .filter(|v| v.status != VerdictStatus::Malformed)
            .filter_map(|v| labels.get(&v.id).map(|l| (&v.claimed, l)))
            .collect();
        summary.confusion = Some(confusion_vs_labels(items, ontology));
    }
    summary
}
