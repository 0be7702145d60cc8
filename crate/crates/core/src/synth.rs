//! Seeded synthetic corpora with bookkept hallucination and omission
//! injections.

use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evidence::{DiagnosisSet, EvidenceAssignment, ReportRecord};
use crate::kb::Ontology;
use crate::logic::solve;
use crate::verifier::Verifier;

/// Synthetic generation enumerates evidence vectors as integers and is
/// restricted to this many findings.
pub const SYNTH_FINDING_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n: usize,
    pub halluc_rate: f64,
    pub omit_rate: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("{count} findings exceed the synthetic generation limit of {limit}")]
    TooManyFindings { count: usize, limit: usize },
    #[error("no evidence vector is consistent with the rules")]
    NoConsistentEvidence,
    #[error("{name} must lie in [0, 1], got {value}")]
    RateOutOfRange { name: &'static str, value: f64 },
}

/// Bookkeeping for one generated report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InjectionRecord {
    pub id: String,
    pub evidence: IndexMap<String, bool>,
    pub entailed: Vec<String>,
    pub claimed: Vec<String>,
    pub hallucinations: Vec<String>,
    pub omissions: Vec<String>,
    /// Inconsistent evidence vectors drawn and discarded before this one.
    pub rejections: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthReport {
    pub record: ReportRecord,
    pub injection: InjectionRecord,
}

fn names(ontology: &Ontology, set: &DiagnosisSet) -> Vec<String> {
    set.iter().map(|d| ontology.name(*d).to_string()).collect()
}

fn check_rate(name: &'static str, value: f64) -> Result<(), SynthError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(SynthError::RateOutOfRange { name, value })
    }
}

/// Draws `config.n` reports. For each one an evidence vector is drawn
/// uniformly from the consistent ones by rejection; each entailed diagnosis
/// is then claimed with probability `1 - omit_rate` and each non-entailed one
/// with probability `halluc_rate`. Labels are the entailed set.
pub fn generate(ontology: &Ontology, config: &SynthConfig) -> Result<Vec<SynthReport>, SynthError> {
    check_rate("halluc_rate", config.halluc_rate)?;
    check_rate("omit_rate", config.omit_rate)?;
    let n_findings = ontology.findings().len();
    if n_findings > SYNTH_FINDING_LIMIT {
        return Err(SynthError::TooManyFindings {
            count: n_findings,
            limit: SYNTH_FINDING_LIMIT,
        });
    }
    // Some vector is consistent exactly when the rules alone are satisfiable:
    // the finding part of any model is one.
    if !solve(&ontology.knowledge(), ontology.atom_count()).is_sat() {
        return Err(SynthError::NoConsistentEvidence);
    }

    let verifier = Verifier::new(ontology);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let width = config.n.saturating_sub(1).to_string().len();
    let mut out = Vec::with_capacity(config.n);

    for i in 0..config.n {
        let mut rejections = 0u64;
        let (evidence, entailed) = loop {
            let index = rng.gen_range(0..(1u64 << n_findings));
            let evidence = EvidenceAssignment::from_index(ontology, index);
            match verifier.entailed_set(&evidence) {
                Ok(entailed) => break (evidence, entailed),
                Err(_) => rejections += 1,
            }
        };

        let mut claimed = DiagnosisSet::new();
        let mut hallucinations = DiagnosisSet::new();
        let mut omissions = DiagnosisSet::new();
        for &d in ontology.diagnoses() {
            if entailed.contains(&d) {
                if rng.gen_bool(1.0 - config.omit_rate) {
                    claimed.insert(d);
                } else {
                    omissions.insert(d);
                }
            } else if rng.gen_bool(config.halluc_rate) {
                claimed.insert(d);
                hallucinations.insert(d);
            }
        }

        let id = format!("synth-{i:0width$}");
        let findings: IndexMap<String, bool> = evidence
            .iter(ontology)
            .map(|(f, v)| (ontology.name(f).to_string(), v))
            .collect();
        let labels = ontology
            .diagnoses()
            .iter()
            .map(|d| (ontology.name(*d).to_string(), entailed.contains(d)))
            .collect();
        let record = ReportRecord {
            id: id.clone(),
            findings: Some(findings.clone()),
            impression_diagnoses: Some(names(ontology, &claimed)),
            labels: Some(labels),
            ..Default::default()
        };
        let injection = InjectionRecord {
            id,
            evidence: findings,
            entailed: names(ontology, &entailed),
            claimed: names(ontology, &claimed),
            hallucinations: names(ontology, &hallucinations),
            omissions: names(ontology, &omissions),
            rejections,
        };
        out.push(SynthReport { record, injection });
    }
    Ok(out)
}
