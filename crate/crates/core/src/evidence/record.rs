use std::collections::BTreeMap;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{extract_diagnoses, extract_findings, DiagnosisSet, EvidenceAssignment, Lexicon};
use crate::kb::{AtomKind, Ontology};
use crate::logic::AtomId;

/// One line of the report JSONL format.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub findings_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub impression_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub findings: Option<IndexMap<String, bool>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub impression_diagnoses: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<IndexMap<String, bool>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_findings_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_impression_text: Option<String>,
}

/// Ground-truth labels, total over the ontology's diagnoses.
pub type Labels = BTreeMap<AtomId, bool>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IngestError {
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("unknown {kind} `{name}` in `{field}`")]
    UnknownPredicate {
        field: &'static str,
        kind: &'static str,
        name: String,
    },
    #[error("record has neither `findings` nor `findings_text`")]
    MissingFindings,
    #[error("record has neither `impression_diagnoses` nor `impression_text`")]
    MissingImpression,
    #[error("`{field}` needs text extraction but no lexicon was supplied")]
    MissingLexicon { field: &'static str },
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestedReport {
    pub record: ReportRecord,
    pub evidence: EvidenceAssignment,
    pub claimed: DiagnosisSet,
    pub labels: Option<Labels>,
}

/// Parses one JSONL line and ingests it.
pub fn ingest_line(
    line: &str,
    ontology: &Ontology,
    lexicon: Option<&Lexicon>,
) -> Result<IngestedReport, IngestError> {
    let record: ReportRecord = serde_json::from_str(line).map_err(|e| IngestError::Schema(e.to_string()))?;
    ingest_record(record, ontology, lexicon)
}

/// Builds the closed-world evidence vector and claimed diagnosis set for a
/// record. Structured fields take precedence over text; text extraction
/// needs a lexicon.
pub fn ingest_record(
    record: ReportRecord,
    ontology: &Ontology,
    lexicon: Option<&Lexicon>,
) -> Result<IngestedReport, IngestError> {
    let evidence = match (&record.findings, &record.findings_text) {
        (Some(map), _) => {
            let mut v = EvidenceAssignment::absent(ontology);
            for (name, &present) in map {
                let id = resolve(ontology, name, AtomKind::Finding, "findings")?;
                if present {
                    v.affirm(ontology, id);
                }
            }
            v
        }
        (None, Some(text)) => {
            let lex = lexicon.ok_or(IngestError::MissingLexicon {
                field: "findings_text",
            })?;
            extract_findings(text, lex, ontology)
        }
        (None, None) => return Err(IngestError::MissingFindings),
    };

    let claimed = match (&record.impression_diagnoses, &record.impression_text) {
        (Some(names), _) => names
            .iter()
            .map(|n| resolve(ontology, n, AtomKind::Diagnosis, "impression_diagnoses"))
            .collect::<Result<DiagnosisSet, _>>()?,
        (None, Some(text)) => {
            let lex = lexicon.ok_or(IngestError::MissingLexicon {
                field: "impression_text",
            })?;
            extract_diagnoses(text, lex, ontology)
        }
        (None, None) => return Err(IngestError::MissingImpression),
    };

    let labels = match &record.labels {
        None => None,
        Some(map) => {
            let mut labels: Labels = ontology.diagnoses().iter().map(|&d| (d, false)).collect();
            for (name, &value) in map {
                let id = resolve(ontology, name, AtomKind::Diagnosis, "labels")?;
                labels.insert(id, value);
            }
            Some(labels)
        }
    };

    Ok(IngestedReport {
        record,
        evidence,
        claimed,
        labels,
    })
}

fn resolve(
    ontology: &Ontology,
    name: &str,
    kind: AtomKind,
    field: &'static str,
) -> Result<AtomId, IngestError> {
    ontology
        .lookup_kind(name, kind)
        .ok_or_else(|| IngestError::UnknownPredicate {
            field,
            kind: match kind {
                AtomKind::Finding => "finding",
                AtomKind::Diagnosis => "diagnosis",
            },
            name: name.to_string(),
        })
}
