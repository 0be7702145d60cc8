//! Entailment checks of diagnoses against closed-world evidence.
//!
//! A diagnosis `d` is entailed by evidence `V` under rules `K` iff
//! `phi(V) & K & !d` is unsatisfiable. Evidence that contradicts `K` is
//! reported as inconsistent instead of entailing everything.

mod verdict;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::evidence::{phi, DiagnosisSet, EvidenceAssignment, IngestedReport};
use crate::kb::{AtomKind, Ontology};
use crate::logic::{dpll_sat, tseitin_compile, AtomId, Cnf, Formula, Lit, Model, SatResult};

pub use verdict::{TaxonomyClass, Verdict, VerdictError, VerdictRecord, VerdictStatus};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("evidence is inconsistent with the knowledge base")]
    InconsistentEvidence,
    #[error("diagnosis {0} is entailed; it has no countermodel")]
    Entailed(AtomId),
    #[error("atom {0} is not a diagnosis")]
    NotADiagnosis(AtomId),
}

/// Entailment engine for one ontology. The rule set is compiled to CNF once;
/// each query appends the evidence literals (and the negated goal) as unit
/// clauses, which is exactly the Tseitin compilation of
/// `phi(V) & K & !d` up to clause order.
#[derive(Debug, Clone)]
pub struct Verifier<'a> {
    ontology: &'a Ontology,
    knowledge: Cnf,
}

impl<'a> Verifier<'a> {
    pub fn new(ontology: &'a Ontology) -> Self {
        Verifier {
            ontology,
            knowledge: tseitin_compile(&ontology.knowledge(), ontology.atom_count()),
        }
    }

    pub fn ontology(&self) -> &'a Ontology {
        self.ontology
    }

    fn query(&self, evidence: &EvidenceAssignment, negated_goal: Option<AtomId>) -> SatResult {
        let mut cnf = self.knowledge.clone();
        for (id, value) in evidence.iter(self.ontology) {
            cnf.add_clause(vec![Lit::new(id.0, value)]);
        }
        if let Some(d) = negated_goal {
            cnf.add_clause(vec![Lit::new(d.0, false)]);
        }
        match dpll_sat(&cnf) {
            SatResult::Sat(m) => SatResult::Sat(m.restrict(self.ontology.atom_count())),
            SatResult::Unsat => SatResult::Unsat,
        }
    }

    fn check_diagnosis(&self, d: AtomId) -> Result<(), VerifyError> {
        match self.ontology.atoms().get(d.0) {
            Some(a) if a.kind == AtomKind::Diagnosis => Ok(()),
            _ => Err(VerifyError::NotADiagnosis(d)),
        }
    }

    /// Whether `phi(V) & K` is satisfiable.
    pub fn check_consistency(&self, evidence: &EvidenceAssignment) -> bool {
        self.query(evidence, None).is_sat()
    }

    /// A model of `phi(V) & K`, if any.
    pub fn witness(&self, evidence: &EvidenceAssignment) -> Option<Model> {
        match self.query(evidence, None) {
            SatResult::Sat(m) => Some(m),
            SatResult::Unsat => None,
        }
    }

    /// Decides `phi(V) & K |= d`.
    pub fn entails(&self, evidence: &EvidenceAssignment, d: AtomId) -> Result<bool, VerifyError> {
        self.check_diagnosis(d)?;
        if !self.check_consistency(evidence) {
            return Err(VerifyError::InconsistentEvidence);
        }
        Ok(!self.query(evidence, Some(d)).is_sat())
    }

    /// All entailed diagnoses, one solver call each.
    pub fn entailed_set(&self, evidence: &EvidenceAssignment) -> Result<DiagnosisSet, VerifyError> {
        if !self.check_consistency(evidence) {
            return Err(VerifyError::InconsistentEvidence);
        }
        Ok(self
            .ontology
            .diagnoses()
            .iter()
            .copied()
            .filter(|&d| !self.query(evidence, Some(d)).is_sat())
            .collect())
    }

    /// A model of `phi(V) & K & !d` over the ontology's atoms.
    pub fn countermodel(&self, evidence: &EvidenceAssignment, d: AtomId) -> Result<Model, VerifyError> {
        self.check_diagnosis(d)?;
        if !self.check_consistency(evidence) {
            return Err(VerifyError::InconsistentEvidence);
        }
        match self.query(evidence, Some(d)) {
            SatResult::Sat(m) => Ok(m),
            SatResult::Unsat => Err(VerifyError::Entailed(d)),
        }
    }

    /// Verdict for an ingested report. With `emit_countermodels` every
    /// non-entailed diagnosis gets a witness assignment.
    pub fn classify(&self, report: &IngestedReport, emit_countermodels: bool) -> Verdict {
        let claimed = report.claimed.clone();
        let id = report.record.id.clone();
        let entailed = match self.entailed_set(&report.evidence) {
            Ok(set) => set,
            Err(_) => {
                return Verdict {
                    id,
                    status: VerdictStatus::Inconsistent,
                    entailed: DiagnosisSet::new(),
                    claimed,
                    verified: DiagnosisSet::new(),
                    per_diagnosis: BTreeMap::new(),
                    countermodels: None,
                    error: None,
                }
            }
        };
        let per_diagnosis = self
            .ontology
            .diagnoses()
            .iter()
            .map(|d| (*d, TaxonomyClass::of(claimed.contains(d), entailed.contains(d))))
            .collect();
        let countermodels = emit_countermodels.then(|| {
            self.ontology
                .diagnoses()
                .iter()
                .filter(|d| !entailed.contains(d))
                .filter_map(|&d| {
                    self.query(&report.evidence, Some(d))
                        .model()
                        .cloned()
                        .map(|m| (d, m))
                })
                .collect()
        });
        Verdict {
            id,
            status: VerdictStatus::Consistent,
            verified: claimed.intersection(&entailed).copied().collect(),
            entailed,
            claimed,
            per_diagnosis,
            countermodels,
            error: None,
        }
    }

    /// Claimed diagnoses that survive entailment filtering. Inconsistent
    /// reports keep nothing; the status says why.
    pub fn filter_verified(&self, report: &IngestedReport) -> (DiagnosisSet, VerdictStatus) {
        let v = self.classify(report, false);
        (v.verified, v.status)
    }
}

pub fn check_consistency(evidence: &EvidenceAssignment, ontology: &Ontology) -> bool {
    Verifier::new(ontology).check_consistency(evidence)
}

pub fn entails(evidence: &EvidenceAssignment, ontology: &Ontology, d: AtomId) -> Result<bool, VerifyError> {
    Verifier::new(ontology).entails(evidence, d)
}

pub fn entailed_set(evidence: &EvidenceAssignment, ontology: &Ontology) -> Result<DiagnosisSet, VerifyError> {
    Verifier::new(ontology).entailed_set(evidence)
}

pub fn countermodel(
    evidence: &EvidenceAssignment,
    ontology: &Ontology,
    d: AtomId,
) -> Result<Model, VerifyError> {
    Verifier::new(ontology).countermodel(evidence, d)
}

pub fn classify(report: &IngestedReport, ontology: &Ontology) -> Verdict {
    Verifier::new(ontology).classify(report, false)
}

pub fn filter_verified(report: &IngestedReport, ontology: &Ontology) -> (DiagnosisSet, VerdictStatus) {
    Verifier::new(ontology).filter_verified(report)
}

/// Entailment by compiling `phi(V) & K & !d` as one formula, without the
/// cached rule CNF. Kept as a second route for cross-checking [`Verifier`].
pub fn entails_via_formula(
    evidence: &EvidenceAssignment,
    ontology: &Ontology,
    d: AtomId,
) -> Result<bool, VerifyError> {
    let context = Formula::and([phi(evidence, ontology), ontology.knowledge()]);
    let n = ontology.atom_count();
    if !dpll_sat(&tseitin_compile(&context, n)).is_sat() {
        return Err(VerifyError::InconsistentEvidence);
    }
    let query = Formula::and([context, Formula::not(Formula::atom(d))]);
    Ok(!dpll_sat(&tseitin_compile(&query, n)).is_sat())
}
