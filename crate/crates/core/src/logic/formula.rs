use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::LogicError;

/// Dense index of an atom within an ontology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AtomId(pub usize);

impl AtomId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// Propositional formula over [`AtomId`]s.
///
/// `And`/`Or` built through [`Formula::and`] and [`Formula::or`] always carry
/// at least two children; the variants stay public so that callers can match.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(AtomId),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(id: AtomId) -> Self {
        Formula::Atom(id)
    }

    pub fn literal(id: AtomId, positive: bool) -> Self {
        if positive {
            Formula::Atom(id)
        } else {
            Formula::Not(Box::new(Formula::Atom(id)))
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: Formula) -> Self {
        Formula::Not(Box::new(inner))
    }

    /// Conjunction; an empty list is `True` and a single child is returned as is.
    pub fn and(children: impl IntoIterator<Item = Formula>) -> Self {
        let mut children: Vec<Formula> = children.into_iter().collect();
        match children.len() {
            0 => Formula::True,
            1 => children.pop().unwrap(),
            _ => Formula::And(children),
        }
    }

    /// Disjunction; an empty list is `False` and a single child is returned as is.
    pub fn or(children: impl IntoIterator<Item = Formula>) -> Self {
        let mut children: Vec<Formula> = children.into_iter().collect();
        match children.len() {
            0 => Formula::False,
            1 => children.pop().unwrap(),
            _ => Formula::Or(children),
        }
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Self {
        Formula::Implies(Box::new(lhs), Box::new(rhs))
    }

    pub fn iff(lhs: Formula, rhs: Formula) -> Self {
        Formula::Iff(Box::new(lhs), Box::new(rhs))
    }

    /// Distinct atoms referenced by the formula, in index order.
    pub fn atoms(&self) -> BTreeSet<AtomId> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<AtomId>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => {
                out.insert(*a);
            }
            Formula::Not(inner) => inner.collect_atoms(out),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| c.collect_atoms(out)),
            Formula::Implies(l, r) | Formula::Iff(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    /// Number of atom slots needed to evaluate this formula (max index + 1).
    pub fn atom_span(&self) -> usize {
        self.atoms().last().map_or(0, |a| a.0 + 1)
    }

    /// Evaluates under a total assignment indexed by atom.
    pub fn eval(&self, assignment: &[bool]) -> Result<bool, LogicError> {
        Ok(match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(a) => *assignment
                .get(a.0)
                .ok_or(LogicError::IncompleteAssignment { atom: *a })?,
            Formula::Not(inner) => !inner.eval(assignment)?,
            Formula::And(cs) => {
                // Evaluate every child so a missing atom is always reported.
                let mut acc = true;
                for c in cs {
                    acc &= c.eval(assignment)?;
                }
                acc
            }
            Formula::Or(cs) => {
                let mut acc = false;
                for c in cs {
                    acc |= c.eval(assignment)?;
                }
                acc
            }
            Formula::Implies(l, r) => {
                let (l, r) = (l.eval(assignment)?, r.eval(assignment)?);
                !l || r
            }
            Formula::Iff(l, r) => l.eval(assignment)? == r.eval(assignment)?,
        })
    }

    /// Folds `True`/`False` away. The result is either a bare constant or a
    /// formula that contains no constants at all.
    pub fn fold_constants(&self) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => self.clone(),
            Formula::Not(inner) => match inner.fold_constants() {
                Formula::True => Formula::False,
                Formula::False => Formula::True,
                other => Formula::not(other),
            },
            Formula::And(cs) => {
                let mut kept = Vec::with_capacity(cs.len());
                for c in cs {
                    match c.fold_constants() {
                        Formula::True => {}
                        Formula::False => return Formula::False,
                        other => kept.push(other),
                    }
                }
                Formula::and(kept)
            }
            Formula::Or(cs) => {
                let mut kept = Vec::with_capacity(cs.len());
                for c in cs {
                    match c.fold_constants() {
                        Formula::False => {}
                        Formula::True => return Formula::True,
                        other => kept.push(other),
                    }
                }
                Formula::or(kept)
            }
            Formula::Implies(l, r) => match (l.fold_constants(), r.fold_constants()) {
                (Formula::False, _) | (_, Formula::True) => Formula::True,
                (Formula::True, r) => r,
                (l, Formula::False) => Formula::not(l),
                (l, r) => Formula::implies(l, r),
            },
            Formula::Iff(l, r) => match (l.fold_constants(), r.fold_constants()) {
                (Formula::True, x) | (x, Formula::True) => x,
                (Formula::False, Formula::False) => Formula::True,
                (Formula::False, x) | (x, Formula::False) => Formula::not(x),
                (l, r) => Formula::iff(l, r),
            },
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(_) => 3,
            Formula::And(_) => 4,
            Formula::Not(_) => 5,
            Formula::True | Formula::False | Formula::Atom(_) => 6,
        }
    }

    /// Writes the formula in the knowledge-base surface syntax, using `name`
    /// to render atoms. Parentheses are emitted exactly where re-parsing
    /// would otherwise produce a different tree.
    pub fn write_with<F>(&self, out: &mut impl fmt::Write, name: &F) -> fmt::Result
    where
        F: Fn(AtomId) -> String,
    {
        let child = |out: &mut dyn fmt::Write, c: &Formula, parens: bool| -> fmt::Result {
            let mut buf = String::new();
            c.write_with(&mut buf, name)?;
            if parens {
                write!(out, "({buf})")
            } else {
                out.write_str(&buf)
            }
        };
        let prec = self.precedence();
        match self {
            Formula::True => out.write_str("true"),
            Formula::False => out.write_str("false"),
            Formula::Atom(a) => out.write_str(&name(*a)),
            Formula::Not(inner) => {
                out.write_char('!')?;
                child(out, inner, inner.precedence() < prec)
            }
            Formula::And(cs) | Formula::Or(cs) => {
                let op = if matches!(self, Formula::And(_)) {
                    " & "
                } else {
                    " | "
                };
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        out.write_str(op)?;
                    }
                    child(out, c, c.precedence() <= prec)?;
                }
                Ok(())
            }
            Formula::Implies(l, r) | Formula::Iff(l, r) => {
                let op = if matches!(self, Formula::Implies(..)) {
                    " -> "
                } else {
                    " <-> "
                };
                child(out, l, l.precedence() <= prec)?;
                out.write_str(op)?;
                child(out, r, r.precedence() < prec)
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_with(f, &|a: AtomId| a.to_string())
    }
}

/// A total assignment over solver variables; index = atom / variable index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Model(Vec<bool>);

impl Model {
    pub fn new(values: Vec<bool>) -> Self {
        Model(values)
    }

    pub fn value(&self, atom: AtomId) -> bool {
        self.0[atom.0]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Drops auxiliary variables, keeping the first `atom_count` values.
    pub fn restrict(&self, atom_count: usize) -> Model {
        Model(self.0[..atom_count.min(self.0.len())].to_vec())
    }

    pub fn into_vec(self) -> Vec<bool> {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    Sat(Model),
    Unsat,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }

    pub fn model(&self) -> Option<&Model> {
        match self {
            SatResult::Sat(m) => Some(m),
            SatResult::Unsat => None,
        }
    }
}
