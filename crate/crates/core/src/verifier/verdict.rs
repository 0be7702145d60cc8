use std::collections::BTreeMap;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evidence::DiagnosisSet;
use crate::kb::{AtomKind, Ontology};
use crate::logic::{AtomId, Model};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictStatus {
    Consistent,
    Inconsistent,
    Malformed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaxonomyClass {
    /// Claimed and entailed.
    Supported,
    /// Claimed but not entailed (hallucinated).
    Unsupported,
    /// Entailed but not claimed (omitted).
    Missed,
    CorrectlyExcluded,
}

impl TaxonomyClass {
    pub fn of(claimed: bool, entailed: bool) -> Self {
        match (claimed, entailed) {
            (true, true) => TaxonomyClass::Supported,
            (true, false) => TaxonomyClass::Unsupported,
            (false, true) => TaxonomyClass::Missed,
            (false, false) => TaxonomyClass::CorrectlyExcluded,
        }
    }
}

/// Audit outcome for one report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub id: String,
    pub status: VerdictStatus,
    pub entailed: DiagnosisSet,
    pub claimed: DiagnosisSet,
    pub verified: DiagnosisSet,
    pub per_diagnosis: BTreeMap<AtomId, TaxonomyClass>,
    /// Witness for every non-entailed diagnosis, over all ontology atoms.
    pub countermodels: Option<BTreeMap<AtomId, Model>>,
    pub error: Option<String>,
}

impl Verdict {
    pub fn malformed(id: impl Into<String>, error: impl Into<String>) -> Self {
        Verdict {
            id: id.into(),
            status: VerdictStatus::Malformed,
            entailed: DiagnosisSet::new(),
            claimed: DiagnosisSet::new(),
            verified: DiagnosisSet::new(),
            per_diagnosis: BTreeMap::new(),
            countermodels: None,
            error: Some(error.into()),
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.status == VerdictStatus::Consistent
    }

    /// Diagnoses carrying `class`, in declaration order.
    pub fn with_class(&self, class: TaxonomyClass) -> DiagnosisSet {
        self.per_diagnosis
            .iter()
            .filter(|(_, c)| **c == class)
            .map(|(d, _)| *d)
            .collect()
    }

    /// The verdict the filtered report would receive: claims are cut down to
    /// the verified set and the taxonomy is recomputed. Countermodels are
    /// dropped because the claimed set changed.
    pub fn filtered(&self) -> Verdict {
        let claimed = self.verified.clone();
        let per_diagnosis = self
            .per_diagnosis
            .keys()
            .map(|d| {
                (
                    *d,
                    TaxonomyClass::of(claimed.contains(d), self.entailed.contains(d)),
                )
            })
            .collect();
        Verdict {
            id: self.id.clone(),
            status: self.status,
            entailed: self.entailed.clone(),
            verified: claimed.clone(),
            claimed,
            per_diagnosis,
            countermodels: None,
            error: self.error.clone(),
        }
    }

    pub fn to_record(&self, ontology: &Ontology) -> VerdictRecord {
        let names = |set: &DiagnosisSet| set.iter().map(|d| ontology.name(*d).to_string()).collect();
        VerdictRecord {
            id: self.id.clone(),
            status: self.status,
            entailed: names(&self.entailed),
            claimed: names(&self.claimed),
            verified: names(&self.verified),
            per_diagnosis: self
                .per_diagnosis
                .iter()
                .map(|(d, c)| (ontology.name(*d).to_string(), *c))
                .collect(),
            countermodels: self.countermodels.as_ref().map(|cms| {
                cms.iter()
                    .map(|(d, m)| {
                        let row = ontology
                            .atoms()
                            .iter()
                            .map(|a| (a.name.clone(), m.value(a.id)))
                            .collect();
                        (ontology.name(*d).to_string(), row)
                    })
                    .collect()
            }),
            error: self.error.clone(),
        }
    }

    /// One JSONL line, without the trailing newline.
    pub fn to_json_line(&self, ontology: &Ontology) -> String {
        serde_json::to_string(&self.to_record(ontology)).expect("verdict serialization")
    }

    pub fn from_record(record: &VerdictRecord, ontology: &Ontology) -> Result<Verdict, VerdictError> {
        let diag = |name: &str| {
            ontology
                .lookup_kind(name, AtomKind::Diagnosis)
                .ok_or_else(|| VerdictError::UnknownDiagnosis(name.to_string()))
        };
        let set = |names: &[String]| names.iter().map(|n| diag(n)).collect::<Result<DiagnosisSet, _>>();
        let per_diagnosis = record
            .per_diagnosis
            .iter()
            .map(|(n, c)| Ok((diag(n)?, *c)))
            .collect::<Result<_, VerdictError>>()?;
        let countermodels = match &record.countermodels {
            None => None,
            Some(cms) => {
                let mut out = BTreeMap::new();
                for (name, row) in cms {
                    let mut values = vec![false; ontology.atom_count()];
                    for (atom, v) in row {
                        let a = ontology
                            .lookup(atom)
                            .ok_or_else(|| VerdictError::UnknownAtom(atom.clone()))?;
                        values[a.id.0] = *v;
                    }
                    out.insert(diag(name)?, Model::new(values));
                }
                Some(out)
            }
        };
        Ok(Verdict {
            id: record.id.clone(),
            status: record.status,
            entailed: set(&record.entailed)?,
            claimed: set(&record.claimed)?,
            verified: set(&record.verified)?,
            per_diagnosis,
            countermodels,
            error: record.error.clone(),
        })
    }
}

/// Serialized form of a [`Verdict`]; field order is the JSONL key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub id: String,
    pub status: VerdictStatus,
    pub entailed: Vec<String>,
    pub claimed: Vec<String>,
    pub verified: Vec<String>,
    pub per_diagnosis: IndexMap<String, TaxonomyClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub countermodels: Option<IndexMap<String, IndexMap<String, bool>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerdictError {
    #[error("verdict names unknown diagnosis `{0}`")]
    UnknownDiagnosis(String),
    #[error("countermodel names unknown atom `{0}`")]
    UnknownAtom(String),
}
