use indexmap::IndexMap;
use serde::Serialize;

use super::Ontology;
use crate::evidence::EvidenceAssignment;
use crate::logic::{solve, AtomId};
use crate::verifier::Verifier;

/// Above this many findings reachability is reported as unknown.
pub const LINT_FINDING_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reachability {
    /// Entailed by at least one consistent evidence vector (the first one in
    /// lexicographic order is kept as witness) but not by all of them.
    EntailableBySomeEvidence {
        witness: EvidenceAssignment,
    },
    NeverEntailed,
    AlwaysEntailed,
    Unknown,
}

impl Reachability {
    pub fn label(&self) -> &'static str {
        match self {
            Reachability::EntailableBySomeEvidence { .. } => "entailable_by_some_evidence",
            Reachability::NeverEntailed => "never_entailed",
            Reachability::AlwaysEntailed => "always_entailed",
            Reachability::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LintReport {
    pub global_consistent: bool,
    pub reachability: Vec<(AtomId, Reachability)>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct ReachabilityJson {
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<IndexMap<String, bool>>,
}

/// Serialized lint report, keyed by atom names.
#[derive(Debug, Serialize)]
pub struct LintJson {
    pub global_consistent: bool,
    pub reachability: IndexMap<String, ReachabilityJson>,
    pub warnings: Vec<String>,
}

impl LintReport {
    /// True when the knowledge base is consistent and nothing was flagged.
    pub fn is_clean(&self) -> bool {
        self.global_consistent && self.warnings.is_empty()
    }

    pub fn to_json(&self, ontology: &Ontology) -> LintJson {
        let reachability = self
            .reachability
            .iter()
            .map(|(d, r)| {
                let witness = match r {
                    Reachability::EntailableBySomeEvidence { witness } => Some(
                        witness
                            .iter(ontology)
                            .map(|(f, v)| (ontology.name(f).to_string(), v))
                            .collect(),
                    ),
                    _ => None,
                };
                (
                    ontology.name(*d).to_string(),
                    ReachabilityJson {
                        status: r.label(),
                        witness,
                    },
                )
            })
            .collect();
        LintJson {
            global_consistent: self.global_consistent,
            reachability,
            warnings: self.warnings.clone(),
        }
    }
}

/// Checks that the rules are jointly satisfiable and, for up to
/// [`LINT_FINDING_LIMIT`] findings, classifies every diagnosis by
/// enumerating all evidence vectors.
pub fn lint_kb(ontology: &Ontology) -> LintReport {
    let mut warnings = Vec::new();
    let global_consistent = solve(&ontology.knowledge(), ontology.atom_count()).is_sat();
    if !global_consistent {
        warnings.push("rules are jointly unsatisfiable; every report would be inconsistent".into());
    }

    let mentioned: std::collections::BTreeSet<AtomId> =
        ontology.rules().iter().flat_map(|r| r.formula.atoms()).collect();
    for atom in ontology.atoms() {
        if !mentioned.contains(&atom.id) {
            warnings.push(format!("`{}` is not used by any rule", atom.name));
        }
    }

    let n_findings = ontology.findings().len();
    let reachability = if n_findings > LINT_FINDING_LIMIT {
        warnings.push(format!(
            "{n_findings} findings exceed the enumeration limit of {LINT_FINDING_LIMIT}; reachability unknown"
        ));
        ontology
            .diagnoses()
            .iter()
            .map(|d| (*d, Reachability::Unknown))
            .collect()
    } else {
        enumerate_reachability(ontology, &mut warnings)
    };

    LintReport {
        global_consistent,
        reachability,
        warnings,
    }
}

fn enumerate_reachability(ontology: &Ontology, warnings: &mut Vec<String>) -> Vec<(AtomId, Reachability)> {
    let verifier = Verifier::new(ontology);
    let diagnoses = ontology.diagnoses();
    let mut witness: Vec<Option<EvidenceAssignment>> = vec![None; diagnoses.len()];
    let mut always = vec![true; diagnoses.len()];
    let mut any_consistent = false;

    for index in 0..(1u64 << ontology.findings().len()) {
        let evidence = EvidenceAssignment::from_index(ontology, index);
        let Ok(entailed) = verifier.entailed_set(&evidence) else {
            continue;
        };
        any_consistent = true;
        for (slot, d) in diagnoses.iter().enumerate() {
            if entailed.contains(d) {
                witness[slot].get_or_insert_with(|| evidence.clone());
            } else {
                always[slot] = false;
            }
        }
    }

    if !any_consistent {
        warnings.push("no evidence vector is consistent with the rules".into());
    }
    diagnoses
        .iter()
        .zip(witness.into_iter().zip(always))
        .map(|(&d, (w, all))| {
            let r = match w {
                None => {
                    warnings.push(format!("diagnosis `{}` can never be entailed", ontology.name(d)));
                    Reachability::NeverEntailed
                }
                Some(_) if all => {
                    warnings.push(format!(
                        "diagnosis `{}` is entailed by every consistent evidence vector",
                        ontology.name(d)
                    ));
                    Reachability::AlwaysEntailed
                }
                Some(witness) => Reachability::EntailableBySomeEvidence { witness },
            };
            (d, r)
        })
        .collect()
}
