use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::MetricsSummary;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaEntry {
    pub vlm: Option<f64>,
    pub ours: Option<f64>,
    /// `ours - vlm`; undefined when either side is.
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DeltaSummary {
    pub metrics: IndexMap<String, DeltaEntry>,
}

impl DeltaSummary {
    pub fn get(&self, metric: &str) -> Option<&DeltaEntry> {
        self.metrics.get(metric)
    }
}

impl MetricsSummary {
    /// Named scalar metrics in a fixed order; confusion-derived entries are
    /// `None` when no labels were available.
    pub fn scalar_metrics(&self) -> Vec<(&'static str, Option<f64>)> {
        let c = self.confusion.as_ref();
        let count = |f: fn(&super::ConfusionCounts) -> usize| c.map(|c| f(&c.pooled.counts) as f64);
        vec![
            ("micro_soundness", self.micro_soundness),
            ("micro_completeness", self.micro_completeness),
            ("macro_soundness", self.macro_soundness),
            ("macro_completeness", self.macro_completeness),
            ("precision", c.and_then(|c| c.pooled.precision)),
            ("recall", c.and_then(|c| c.pooled.recall)),
            ("f1", c.and_then(|c| c.pooled.f1)),
            ("specificity", c.and_then(|c| c.pooled.specificity)),
            ("macro_precision", c.and_then(|c| c.macro_precision)),
            ("macro_recall", c.and_then(|c| c.macro_recall)),
            ("macro_f1", c.and_then(|c| c.macro_f1)),
            ("macro_specificity", c.and_then(|c| c.macro_specificity)),
            ("tp", count(|c| c.tp)),
            ("fp", count(|c| c.fp)),
            ("fn", count(|c| c.fn_)),
            ("tn", count(|c| c.tn)),
        ]
    }
}

/// Elementwise `ours - vlm` over [`MetricsSummary::scalar_metrics`].
pub fn delta(ours: &MetricsSummary, vlm: &MetricsSummary) -> DeltaSummary {
    let metrics = ours
        .scalar_metrics()
        .into_iter()
        .zip(vlm.scalar_metrics())
        .map(|((name, o), (_, v))| {
            let d = match (o, v) {
                (Some(o), Some(v)) => Some(o - v),
                _ => None,
            };
            (
                name.to_string(),
                DeltaEntry {
                    vlm: v,
                    ours: o,
                    delta: d,
                },
            )
        })
        .collect();
    DeltaSummary { metrics }
}
