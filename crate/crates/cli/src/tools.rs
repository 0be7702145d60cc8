use anyhow::{bail, Result};
use entail_core::evidence::{extract_diagnoses, extract_findings, Lexicon, ReportRecord};
use entail_core::kb::{lint_kb, Ontology};
use entail_core::metrics::{bleu, rouge_l_corpus};
use serde::Serialize;

use crate::batch::{map_ordered, records};
use crate::Section;

/// Pretty lint JSON and whether the knowledge base is clean.
pub fn lint(ontology: &Ontology) -> (String, bool) {
    let report = lint_kb(ontology);
    let mut text = serde_json::to_string_pretty(&report.to_json(ontology)).expect("lint serialization");
    text.push('\n');
    (text, report.is_clean())
}

#[derive(Debug, Clone)]
pub struct ExtractOutput {
    pub lines: Vec<String>,
    pub malformed: usize,
}

#[derive(Serialize)]
struct ExtractError<'a> {
    id: &'a str,
    error: String,
}

fn extract_line(ontology: &Ontology, lexicon: &Lexicon, line: &str) -> std::result::Result<String, String> {
    let mut rec: ReportRecord = serde_json::from_str(line).map_err(|e| e.to_string())?;
    if rec.findings_text.is_none() && rec.impression_text.is_none() {
        return Err("record has no findings_text or impression_text".into());
    }
    if rec.findings.is_none() {
        if let Some(text) = &rec.findings_text {
            let v = extract_findings(text, lexicon, ontology);
            rec.findings = Some(
                v.iter(ontology)
                    .map(|(f, b)| (ontology.name(f).to_string(), b))
                    .collect(),
            );
        }
    }
    if rec.impression_diagnoses.is_none() {
        if let Some(text) = &rec.impression_text {
            let ds = extract_diagnoses(text, lexicon, ontology);
            rec.impression_diagnoses = Some(ds.iter().map(|d| ontology.name(*d).to_string()).collect());
        }
    }
    Ok(serde_json::to_string(&rec).expect("record serialization"))
}

/// Fills `findings` (complete over all findings) and `impression_diagnoses`
/// from text wherever the structured field is absent.
pub fn extract(ontology: &Ontology, lexicon: &Lexicon, input: &str, jobs: usize) -> Result<ExtractOutput> {
    let lines = records(input);
    let results = map_ordered(jobs, &lines, |(no, line)| {
        extract_line(ontology, lexicon, line).map_err(|error| {
            let id = serde_json::from_str::<serde_json::Value>(line)
                .ok()
                .and_then(|v| v.get("id").and_then(|i| i.as_str()).map(str::to_string))
                .unwrap_or_else(|| format!("line-{no}"));
            serde_json::to_string(&ExtractError { id: &id, error }).expect("error serialization")
        })
    })?;
    let malformed = results.iter().filter(|r| r.is_err()).count();
    Ok(ExtractOutput {
        lines: results.into_iter().map(|r| r.unwrap_or_else(|e| e)).collect(),
        malformed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LexicalReport {
    pub n_pairs: usize,
    /// Records lacking the candidate or reference text for the section.
    pub n_skipped: usize,
    pub bleu: f64,
    pub rouge_l: f64,
}

impl LexicalReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("lexical serialization");
        s.push('\n');
        s
    }
}

fn join(a: Option<&String>, b: Option<&String>) -> Option<String> {
    match (a, b) {
        (Some(a), Some(b)) => Some(format!("{a}\n{b}")),
        (Some(x), None) | (None, Some(x)) => Some(x.clone()),
        (None, None) => None,
    }
}

fn section_texts(rec: &ReportRecord, section: Section) -> (Option<String>, Option<String>) {
    match section {
        Section::Findings => (rec.findings_text.clone(), rec.reference_findings_text.clone()),
        Section::Impression => (rec.impression_text.clone(), rec.reference_impression_text.clone()),
        Section::Report => (
            join(rec.findings_text.as_ref(), rec.impression_text.as_ref()),
            join(
                rec.reference_findings_text.as_ref(),
                rec.reference_impression_text.as_ref(),
            ),
        ),
    }
}

pub fn lexical(input: &str, section: Section) -> Result<LexicalReport> {
    let mut cands = Vec::new();
    let mut refs = Vec::new();
    let mut n_skipped = 0;
    for (no, line) in records(input) {
        let rec: ReportRecord = match serde_json::from_str(line) {
            Ok(r) => r,
            Err(e) => bail!("line {no}: {e}"),
        };
        match section_texts(&rec, section) {
            (Some(c), Some(r)) => {
                cands.push(c);
                refs.push(r);
            }
            _ => n_skipped += 1,
        }
    }
    Ok(LexicalReport {
        n_pairs: cands.len(),
        n_skipped,
        bleu: bleu(&cands, &refs)?,
        rouge_l: rouge_l_corpus(&cands, &refs)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_texts_score_one() {
        let input = r#"{"id":"a","findings_text":"Small left effusion.","reference_findings_text":"Small left effusion."}
{"id":"b","impression_text":"No acute process."}
"#;
        let r = lexical(input, Section::Findings).unwrap();
        assert_eq!((r.n_pairs, r.n_skipped), (1, 1));
        assert_eq!(r.bleu, 1.0);
        assert_eq!(r.rouge_l, 1.0);
    }
}
