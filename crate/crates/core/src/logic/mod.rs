//! Propositional formulas, Tseitin compilation to CNF, a DPLL decision
//! procedure and a truth-table oracle used to cross-check it.

mod cnf;
mod dpll;
mod formula;
mod truth_table;

use thiserror::Error;

pub use cnf::{tseitin_compile, Cnf, Lit};
pub use dpll::dpll_sat;
pub use formula::{AtomId, Formula, Model, SatResult};
pub use truth_table::{truth_table_sat, TRUTH_TABLE_ATOM_LIMIT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("assignment has no value for atom {atom}")]
    IncompleteAssignment { atom: AtomId },
    #[error("truth table limited to {limit} atoms, formula has {count}")]
    TooManyAtoms { count: usize, limit: usize },
}

/// Satisfiability of a formula through Tseitin compilation and DPLL. The
/// model is restricted to the first `atom_count` (non-auxiliary) atoms.
pub fn solve(formula: &Formula, atom_count: usize) -> SatResult {
    let cnf = tseitin_compile(formula, atom_count);
    match dpll_sat(&cnf) {
        SatResult::Sat(m) => SatResult::Sat(m.restrict(cnf.original_count())),
        SatResult::Unsat => SatResult::Unsat,
    }
}
