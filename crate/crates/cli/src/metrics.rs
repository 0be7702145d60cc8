use std::collections::HashMap;

use anyhow::{anyhow, bail, Context, Result};
use entail_core::evidence::Labels;
use entail_core::kb::{AtomKind, Ontology};
use entail_core::metrics::{delta, summarize, DeltaSummary, MetricsSummary};
use entail_core::verifier::{Verdict, VerdictRecord};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::batch::records;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub vlm: MetricsSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ours: Option<MetricsSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<DeltaSummary>,
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl MetricsReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("metrics serialization");
        s.push('\n');
        s
    }

    /// One row per variant (`vlm`, then `ours` when present) with the record
    /// counts and every scalar metric as columns; undefined cells are empty.
    pub fn to_csv(&self, dataset: &str) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![
            "dataset",
            "variant",
            "n_total",
            "n_consistent",
            "n_inconsistent",
            "n_malformed",
        ];
        header.extend(self.vlm.scalar_metrics().iter().map(|(name, _)| *name));
        w.write_record(&header)?;
        let variants = std::iter::once(("vlm", &self.vlm)).chain(self.ours.as_ref().map(|o| ("ours", o)));
        for (variant, s) in variants {
            let mut row = vec![
                dataset.to_string(),
                variant.to_string(),
                s.n_total.to_string(),
                s.n_consistent.to_string(),
                s.n_inconsistent.to_string(),
                s.n_malformed.to_string(),
            ];
            row.extend(s.scalar_metrics().into_iter().map(|(_, v)| cell(v)));
            w.write_record(&row)?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }
}

pub fn parse_verdicts(text: &str, ontology: &Ontology) -> Result<Vec<Verdict>> {
    records(text)
        .into_iter()
        .map(|(no, line)| {
            let rec: VerdictRecord =
                serde_json::from_str(line).with_context(|| format!("verdict line {no}"))?;
            Verdict::from_record(&rec, ontology).with_context(|| format!("verdict line {no}"))
        })
        .collect()
}

#[derive(Deserialize)]
struct LabelLine {
    id: String,
    #[serde(default)]
    labels: Option<IndexMap<String, bool>>,
}

/// Labels keyed by report id from any JSONL whose objects carry `id` and
/// `labels`; lines without labels are skipped. Missing diagnoses are false.
pub fn parse_labels(text: &str, ontology: &Ontology) -> Result<HashMap<String, Labels>> {
    let mut out = HashMap::new();
    for (no, line) in records(text) {
        let rec: LabelLine = serde_json::from_str(line).with_context(|| format!("labels line {no}"))?;
        let Some(map) = rec.labels else { continue };
        let mut labels: Labels = ontology.diagnoses().iter().map(|&d| (d, false)).collect();
        for (name, value) in map {
            let d = ontology
                .lookup_kind(&name, AtomKind::Diagnosis)
                .ok_or_else(|| anyhow!("labels line {no}: unknown diagnosis `{name}`"))?;
            labels.insert(d, value);
        }
        if out.insert(rec.id.clone(), labels).is_some() {
            bail!("labels line {no}: duplicate id `{}`", rec.id);
        }
    }
    Ok(out)
}

/// Scores raw verdicts, and with `compare_filtered` also their filtered
/// counterparts (claims cut down to the verified set).
pub fn metrics(
    ontology: &Ontology,
    verdicts_text: &str,
    labels_text: Option<&str>,
    compare_filtered: bool,
) -> Result<MetricsReport> {
    let verdicts = parse_verdicts(verdicts_text, ontology)?;
    let labels = labels_text.map(|t| parse_labels(t, ontology)).transpose()?;
    Ok(report_from(
        ontology,
        &verdicts,
        labels.as_ref(),
        compare_filtered,
    ))
}

pub fn report_from(
    ontology: &Ontology,
    verdicts: &[Verdict],
    labels: Option<&HashMap<String, Labels>>,
    compare_filtered: bool,
) -> MetricsReport {
    let vlm = summarize(verdicts, labels, ontology);
    if !compare_filtered {
        return MetricsReport {
            vlm,
            ours: None,
            delta: None,
        };
    }
    let filtered: Vec<Verdict> = verdicts.iter().map(Verdict::filtered).collect();
    let ours = summarize(&filtered, labels, ontology);
    let d = delta(&ours, &vlm);
    MetricsReport {
        vlm,
        ours: Some(ours),
        delta: Some(d),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use entail_core::kb::parse_kb;

    #[test]
    fn unknown_label_is_fatal() {
        let kb = parse_kb("diagnosis pe").unwrap();
        assert!(parse_labels(r#"{"id":"a","labels":{"flu":true}}"#, &kb).is_err());
        let ok = parse_labels("{\"id\":\"a\",\"labels\":{}}\n{\"id\":\"b\"}\n", &kb).unwrap();
        assert_eq!(ok.len(), 1);
        assert_eq!(ok["a"].values().copied().collect::<Vec<_>>(), vec![false]);
    }

    #[test]
    fn csv_has_empty_cells_for_undefined() {
        let kb = parse_kb("diagnosis pe").unwrap();
        let r = report_from(&kb, &[], None, true);
        let csv = r.to_csv("empty").unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("empty,vlm,0,0,0,0,,,,,"), "{csv}");
        assert!(lines[2].starts_with("empty,ours,0,0,0,0,,"), "{csv}");
    }
}
