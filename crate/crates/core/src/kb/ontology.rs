use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::KbError;
use crate::logic::{AtomId, Formula};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomKind {
    Finding,
    Diagnosis,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub name: String,
    pub kind: AtomKind,
    pub id: AtomId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub formula: Formula,
}

/// Finding atoms, diagnosis atoms and the rule set over them.
///
/// Atom ids are dense and follow declaration order across both kinds, so
/// findings and diagnoses may interleave in id space.
#[derive(Debug, Clone, Default)]
pub struct Ontology {
    atoms: Vec<Atom>,
    findings: Vec<AtomId>,
    diagnoses: Vec<AtomId>,
    rules: Vec<Rule>,
    by_name: HashMap<String, AtomId>,
    // finding atom id -> position in `findings`
    finding_slot: HashMap<AtomId, usize>,
}

impl PartialEq for Ontology {
    fn eq(&self, other: &Self) -> bool {
        self.atoms == other.atoms && self.rules == other.rules
    }
}

impl Eq for Ontology {}

impl Ontology {
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom(&self, id: AtomId) -> &Atom {
        &self.atoms[id.0]
    }

    pub fn name(&self, id: AtomId) -> &str {
        &self.atoms[id.0].name
    }

    pub fn lookup(&self, name: &str) -> Option<&Atom> {
        self.by_name.get(name).map(|id| &self.atoms[id.0])
    }

    pub fn lookup_kind(&self, name: &str, kind: AtomKind) -> Option<AtomId> {
        self.lookup(name).filter(|a| a.kind == kind).map(|a| a.id)
    }

    pub fn findings(&self) -> &[AtomId] {
        &self.findings
    }

    pub fn diagnoses(&self) -> &[AtomId] {
        &self.diagnoses
    }

    /// Position of a finding atom within [`Ontology::findings`].
    pub fn finding_slot(&self, id: AtomId) -> Option<usize> {
        self.finding_slot.get(&id).copied()
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Conjunction of all rules (`True` for an empty rule set).
    pub fn knowledge(&self) -> Formula {
        Formula::and(self.rules.iter().map(|r| r.formula.clone()))
    }

    pub fn declare(&mut self, name: &str, kind: AtomKind) -> Result<AtomId, KbError> {
        if self.by_name.contains_key(name) {
            return Err(KbError::DuplicateDeclaration {
                line: 0,
                name: name.to_string(),
            });
        }
        let id = AtomId(self.atoms.len());
        self.atoms.push(Atom {
            name: name.to_string(),
            kind,
            id,
        });
        self.by_name.insert(name.to_string(), id);
        match kind {
            AtomKind::Finding => {
                self.finding_slot.insert(id, self.findings.len());
                self.findings.push(id);
            }
            AtomKind::Diagnosis => self.diagnoses.push(id),
        }
        Ok(id)
    }

    pub fn add_rule(&mut self, name: &str, formula: Formula) -> Result<(), KbError> {
        if self.rules.iter().any(|r| r.name == name) {
            return Err(KbError::DuplicateRule {
                line: 0,
                name: name.to_string(),
            });
        }
        if let Some(bad) = formula.atoms().into_iter().find(|a| a.0 >= self.atoms.len()) {
            return Err(KbError::UndeclaredAtom {
                line: 0,
                column: 0,
                name: bad.to_string(),
            });
        }
        self.rules.push(Rule {
            name: name.to_string(),
            formula,
        });
        Ok(())
    }

    /// Renders the ontology back to `.kbl` text that re-parses to an equal
    /// ontology.
    pub fn to_kbl(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Ontology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for atom in &self.atoms {
            let kw = match atom.kind {
                AtomKind::Finding => "finding",
                AtomKind::Diagnosis => "diagnosis",
            };
            writeln!(f, "{kw} {}", atom.name)?;
        }
        for rule in &self.rules {
            write!(f, "rule {}: ", rule.name)?;
            rule.formula
                .write_with(f, &|id: AtomId| self.atoms[id.0].name.clone())?;
            writeln!(f)?;
        }
        Ok(())
    }
}
