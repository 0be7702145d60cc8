//! Closed-world evidence vectors and the ways of producing them: ingestion
//! of structured report records and a deterministic lexicon matcher for
//! free text.

mod lexicon;
mod record;

use std::collections::BTreeSet;

use crate::kb::Ontology;
use crate::logic::{AtomId, Formula};

pub use lexicon::{
    extract_diagnoses, extract_findings, Lexicon, LexiconError, LexiconSpec, DEFAULT_HEDGE_CUES,
    DEFAULT_NEGATION_CUES, DEFAULT_NEGATION_WINDOW,
};
pub use record::{ingest_line, ingest_record, IngestError, IngestedReport, Labels, ReportRecord};

/// Diagnosis atoms; `AtomId` order is declaration order.
pub type DiagnosisSet = BTreeSet<AtomId>;

/// The evidence vector V: one boolean per finding, aligned with
/// [`Ontology::findings`]. Anything not affirmed is `false`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EvidenceAssignment {
    values: Vec<bool>,
}

impl EvidenceAssignment {
    /// Every finding absent.
    pub fn absent(ontology: &Ontology) -> Self {
        EvidenceAssignment {
            values: vec![false; ontology.findings().len()],
        }
    }

    /// Wraps a vector aligned with `ontology.findings()`. Returns `None` when
    /// the length does not match.
    pub fn from_values(ontology: &Ontology, values: Vec<bool>) -> Option<Self> {
        (values.len() == ontology.findings().len()).then_some(EvidenceAssignment { values })
    }

    /// The `index`-th vector in lexicographic order, first finding most
    /// significant. Requires fewer than 64 findings.
    pub fn from_index(ontology: &Ontology, index: u64) -> Self {
        let k = ontology.findings().len();
        assert!(k < 64, "enumeration needs fewer than 64 findings");
        EvidenceAssignment {
            values: (0..k).map(|i| (index >> (k - 1 - i)) & 1 == 1).collect(),
        }
    }

    /// Sets the finding `id` to present. No-op for non-finding atoms.
    pub fn affirm(&mut self, ontology: &Ontology, id: AtomId) {
        if let Some(slot) = ontology.finding_slot(id) {
            self.values[slot] = true;
        }
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, ontology: &Ontology, id: AtomId) -> Option<bool> {
        ontology.finding_slot(id).map(|slot| self.values[slot])
    }

    /// `(finding atom, value)` pairs in declaration order.
    pub fn iter<'a>(&'a self, ontology: &'a Ontology) -> impl Iterator<Item = (AtomId, bool)> + 'a {
        ontology
            .findings()
            .iter()
            .copied()
            .zip(self.values.iter().copied())
    }

    /// Pointwise `self <= other`.
    pub fn le(&self, other: &EvidenceAssignment) -> bool {
        self.values.iter().zip(&other.values).all(|(a, b)| !a || *b)
    }
}

/// Conjunction fixing every finding to its value in `evidence`:
/// present findings as positive literals, absent ones negated. With no
/// findings declared this is `True`.
pub fn phi(evidence: &EvidenceAssignment, ontology: &Ontology) -> Formula {
    Formula::and(evidence.iter(ontology).map(|(id, v)| Formula::literal(id, v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::parse_kb;
    use crate::logic::solve;

    #[test]
    fn phi_of_two_findings() {
        let kb = parse_kb("finding cb\nfinding ms").unwrap();
        let v = EvidenceAssignment::from_values(&kb, vec![true, false]).unwrap();
        let (cb, ms) = (AtomId(0), AtomId(1));
        assert_eq!(
            phi(&v, &kb),
            Formula::and([Formula::atom(cb), Formula::not(Formula::atom(ms))])
        );
    }

    #[test]
    fn phi_without_findings_is_true() {
        let kb = parse_kb("diagnosis pe").unwrap();
        assert_eq!(phi(&EvidenceAssignment::absent(&kb), &kb), Formula::True);
    }

    #[test]
    fn phi_holds_under_its_own_assignment() {
        let kb = parse_kb("finding a\ndiagnosis d\nfinding b\nfinding c").unwrap();
        for idx in 0..8 {
            let v = EvidenceAssignment::from_index(&kb, idx);
            for extra in [false, true] {
                let mut row = vec![extra; kb.atom_count()];
                for (id, val) in v.iter(&kb) {
                    row[id.0] = val;
                }
                assert!(phi(&v, &kb).eval(&row).unwrap());
            }
        }
    }

    #[test]
    fn phi_has_exactly_one_model_over_findings() {
        let kb = parse_kb("finding a\nfinding b\ndiagnosis d\nfinding c").unwrap();
        for idx in 0..8 {
            let v = EvidenceAssignment::from_index(&kb, idx);
            let model = solve(&phi(&v, &kb), kb.atom_count());
            let model = model.model().unwrap();
            for (id, val) in v.iter(&kb) {
                assert_eq!(model.value(id), val);
            }
        }
    }

    #[test]
    fn from_index_is_lexicographic() {
        let kb = parse_kb("finding a\nfinding b").unwrap();
        let rows: Vec<Vec<bool>> = (0..4)
            .map(|i| EvidenceAssignment::from_index(&kb, i).values().to_vec())
            .collect();
        assert_eq!(
            rows,
            vec![
                vec![false, false],
                vec![false, true],
                vec![true, false],
                vec![true, true]
            ]
        );
    }
}
