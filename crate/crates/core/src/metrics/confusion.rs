use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::{mean, ratio};
use crate::evidence::{DiagnosisSet, Labels};
use crate::kb::Ontology;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionCounts {
    fn record(&mut self, predicted: bool, actual: bool) {
        match (predicted, actual) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }

    fn add(&mut self, other: &ConfusionCounts) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
        self.tn += other.tn;
    }

    pub fn stats(&self) -> ConfusionStats {
        let precision = ratio(self.tp, self.tp + self.fp);
        let recall = ratio(self.tp, self.tp + self.fn_);
        let f1 = match (precision, recall) {
            (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
            (Some(_), Some(_)) => Some(0.0),
            _ => None,
        };
        ConfusionStats {
            counts: *self,
            precision,
            recall,
            f1,
            specificity: ratio(self.tn, self.tn + self.fp),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfusionStats {
    #[serde(flatten)]
    pub counts: ConfusionCounts,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub specificity: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfusionSummary {
    pub n_labeled: usize,
    /// Counts pooled over every (report, diagnosis) pair.
    pub pooled: ConfusionStats,
    /// Means of the per-diagnosis ratios over diagnoses where they are defined.
    pub macro_precision: Option<f64>,
    pub macro_recall: Option<f64>,
    pub macro_f1: Option<f64>,
    pub macro_specificity: Option<f64>,
    pub per_diagnosis: IndexMap<String, ConfusionStats>,
}

/// Confusion of predicted diagnosis sets against per-report labels.
pub fn confusion_vs_labels<'a>(
    items: impl IntoIterator<Item = (&'a DiagnosisSet, &'a Labels)>,
    ontology: &Ontology,
) -> ConfusionSummary {
    let diagnoses = ontology.diagnoses();
    let mut per = vec![ConfusionCounts::default(); diagnoses.len()];
    let mut n_labeled = 0;
    for (predicted, labels) in items {
        n_labeled += 1;
        for (slot, d) in diagnoses.iter().enumerate() {
            let actual = labels.get(d).copied().unwrap_or(false);
            per[slot].record(predicted.contains(d), actual);
        }
    }
    let mut pooled = ConfusionCounts::default();
    per.iter().for_each(|c| pooled.add(c));
    let stats: Vec<ConfusionStats> = per.iter().map(ConfusionCounts::stats).collect();
    let macro_of = |f: fn(&ConfusionStats) -> Option<f64>| {
        let defined: Vec<f64> = stats.iter().filter_map(f).collect();
        mean(&defined)
    };
    ConfusionSummary {
        n_labeled,
        pooled: pooled.stats(),
        macro_precision: macro_of(|s| s.precision),
        macro_recall: macro_of(|s| s.recall),
        macro_f1: macro_of(|s| s.f1),
        macro_specificity: macro_of(|s| s.specificity),
        per_diagnosis: diagnoses
            .iter()
            .zip(stats)
            .map(|(d, s)| (ontology.name(*d).to_string(), s))
            .collect(),
    }
}
