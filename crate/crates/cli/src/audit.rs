use anyhow::Result;
use entail_core::evidence::{ingest_line, Lexicon};
use entail_core::kb::Ontology;
use entail_core::verifier::{Verdict, VerdictStatus, Verifier};
use indexmap::IndexMap;
use serde::Deserialize;
use serde_json::value::RawValue;

use crate::batch::{map_ordered, records};

#[derive(Debug, Clone)]
pub struct AuditOutput {
    pub verdicts: Vec<Verdict>,
    pub lines: Vec<String>,
    pub malformed: usize,
}

impl AuditOutput {
    pub fn summary_line(&self) -> String {
        let count = |s: VerdictStatus| self.verdicts.iter().filter(|v| v.status == s).count();
        format!(
            "audited {} records: {} consistent, {} inconsistent, {} malformed",
            self.verdicts.len(),
            count(VerdictStatus::Consistent),
            count(VerdictStatus::Inconsistent),
            self.malformed
        )
    }
}

#[derive(Deserialize)]
struct IdOnly {
    id: String,
}

/// Best-effort id for a record that failed ingestion.
fn fallback_id(line: &str, line_no: usize) -> String {
    serde_json::from_str::<IdOnly>(line)
        .map(|r| r.id)
        .unwrap_or_else(|_| format!("line-{line_no}"))
}

pub fn audit_line(
    verifier: &Verifier,
    lexicon: Option<&Lexicon>,
    line_no: usize,
    line: &str,
    emit_countermodels: bool,
) -> Verdict {
    match ingest_line(line, verifier.ontology(), lexicon) {
        Ok(report) => verifier.classify(&report, emit_countermodels),
        Err(e) => Verdict::malformed(fallback_id(line, line_no), e.to_string()),
    }
}

/// One verdict per non-blank input line, in input order.
pub fn audit(
    ontology: &Ontology,
    lexicon: Option<&Lexicon>,
    input: &str,
    jobs: usize,
    emit_countermodels: bool,
) -> Result<AuditOutput> {
    let verifier = Verifier::new(ontology);
    let lines = records(input);
    let verdicts = map_ordered(jobs, &lines, |(no, line)| {
        audit_line(&verifier, lexicon, *no, line, emit_countermodels)
    })?;
    let json = verdicts.iter().map(|v| v.to_json_line(ontology)).collect();
    let malformed = verdicts
        .iter()
        .filter(|v| v.status == VerdictStatus::Malformed)
        .count();
    Ok(AuditOutput {
        verdicts,
        lines: json,
        malformed,
    })
}

#[derive(Debug, Clone)]
pub struct FilterOutput {
    pub lines: Vec<String>,
    pub malformed: usize,
}

type RawRecord = IndexMap<String, Box<RawValue>>;

fn raw(json: String) -> Box<RawValue> {
    RawValue::from_string(json).expect("serializer output is valid JSON")
}

fn raw_str(s: &str) -> Box<RawValue> {
    raw(serde_json::to_string(s).expect("string serialization"))
}

/// Returns the rewritten line and whether the record was malformed.
fn filter_line(verifier: &Verifier, lexicon: Option<&Lexicon>, line: &str) -> (String, bool) {
    let Ok(mut record) = serde_json::from_str::<RawRecord>(line) else {
        return (line.to_string(), true);
    };
    let ontology = verifier.ontology();
    let report = match ingest_line(line, ontology, lexicon) {
        Ok(r) => r,
        Err(e) => {
            record.insert("verification_status".into(), raw_str("malformed"));
            record.insert("verification_error".into(), raw_str(&e.to_string()));
            return (
                serde_json::to_string(&record).expect("record serialization"),
                true,
            );
        }
    };
    let verdict = verifier.classify(&report, false);
    let kept: Vec<&str> = verdict.verified.iter().map(|d| ontology.name(*d)).collect();
    record.insert(
        "impression_diagnoses".into(),
        raw(serde_json::to_string(&kept).expect("name list serialization")),
    );
    if verdict.status == VerdictStatus::Inconsistent {
        record.insert("verification_status".into(), raw_str("inconsistent"));
    }
    (
        serde_json::to_string(&record).expect("record serialization"),
        false,
    )
}

/// Rewrites `impression_diagnoses` to the verified subset. Every other field
/// keeps its original JSON text; key order is kept and new keys go last.
pub fn filter(
    ontology: &Ontology,
    lexicon: Option<&Lexicon>,
    input: &str,
    jobs: usize,
) -> Result<FilterOutput> {
    let verifier = Verifier::new(ontology);
    let lines = records(input);
    let out = map_ordered(jobs, &lines, |(_, line)| filter_line(&verifier, lexicon, line))?;
    let malformed = out.iter().filter(|(_, m)| *m).count();
    Ok(FilterOutput {
        lines: out.into_iter().map(|(l, _)| l).collect(),
        malformed,
    })
}
