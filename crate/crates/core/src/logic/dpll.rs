//! Complete, deterministic DPLL search.
//!
//! Each round runs unit propagation to a fixpoint, then assigns every pure
//! literal at once, until neither step changes anything. Branching picks
//! the lowest-index unassigned variable of a still-open clause and tries
//! `true` first. Variables left unassigned in a model default to `false`.
//!
//! Because both simplification steps are computed as whole-set fixpoints,
//! the returned model does not depend on clause order.

use super::cnf::{Cnf, Lit};
use super::formula::{Model, SatResult};

pub fn dpll_sat(cnf: &Cnf) -> SatResult {
    if cnf.clauses().iter().any(|c| c.is_empty()) {
        return SatResult::Unsat;
    }
    let mut search = Search {
        clauses: cnf.clauses(),
        values: vec![None; cnf.var_count()],
        trail: Vec::new(),
    };
    if search.solve() {
        SatResult::Sat(Model::new(
            search.values.iter().map(|v| v.unwrap_or(false)).collect(),
        ))
    } else {
        SatResult::Unsat
    }
}

enum ClauseState {
    Satisfied,
    Conflict,
    Unit(Lit),
    Open,
}

struct Search<'a> {
    clauses: &'a [Vec<Lit>],
    values: Vec<Option<bool>>,
    trail: Vec<usize>,
}

impl Search<'_> {
    fn lit_value(&self, lit: Lit) -> Option<bool> {
        self.values[lit.var()].map(|v| v == lit.is_positive())
    }

    fn assign(&mut self, lit: Lit) {
        debug_assert!(self.values[lit.var()].is_none());
        self.values[lit.var()] = Some(lit.is_positive());
        self.trail.push(lit.var());
    }

    fn undo_to(&mut self, mark: usize) {
        for var in self.trail.drain(mark..) {
            self.values[var] = None;
        }
    }

    fn clause_state(&self, clause: &[Lit]) -> ClauseState {
        let mut unassigned = None;
        let mut open = 0usize;
        for &lit in clause {
            match self.lit_value(lit) {
                Some(true) => return ClauseState::Satisfied,
                Some(false) => {}
                None => {
                    open += 1;
                    unassigned = Some(lit);
                }
            }
        }
        match (open, unassigned) {
            (0, _) => ClauseState::Conflict,
            (1, Some(lit)) => ClauseState::Unit(lit),
            _ => ClauseState::Open,
        }
    }

    /// Returns `false` on conflict.
    fn propagate_units(&mut self) -> bool {
        loop {
            let mut changed = false;
            for clause in self.clauses {
                match self.clause_state(clause) {
                    ClauseState::Conflict => return false,
                    ClauseState::Unit(lit) => {
                        self.assign(lit);
                        changed = true;
                    }
                    ClauseState::Satisfied | ClauseState::Open => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    /// Assigns all pure literals of the open clauses. Returns whether any
    /// assignment was made.
    fn assign_pure_literals(&mut self) -> bool {
        // bit 0: seen positive, bit 1: seen negative
        let mut seen = vec![0u8; self.values.len()];
        for clause in self.clauses {
            if matches!(self.clause_state(clause), ClauseState::Satisfied) {
                continue;
            }
            for &lit in clause {
                if self.values[lit.var()].is_none() {
                    seen[lit.var()] |= if lit.is_positive() { 1 } else { 2 };
                }
            }
        }
        let mut changed = false;
        for (var, mask) in seen.into_iter().enumerate() {
            match mask {
                1 => self.assign(Lit::new(var, true)),
                2 => self.assign(Lit::new(var, false)),
                _ => continue,
            }
            changed = true;
        }
        changed
    }

    fn branch_var(&self) -> Option<usize> {
        self.clauses
            .iter()
            .filter(|c| !matches!(self.clause_state(c), ClauseState::Satisfied))
            .flat_map(|c| c.iter())
            .filter(|l| self.values[l.var()].is_none())
            .map(|l| l.var())
            .min()
    }

    fn solve(&mut self) -> bool {
        loop {
            if !self.propagate_units() {
                return false;
            }
            if !self.assign_pure_literals() {
                break;
            }
        }
        let Some(var) = self.branch_var() else {
            return true;
        };
        let mark = self.trail.len();
        for polarity in [true, false] {
            self.assign(Lit::new(var, polarity));
            if self.solve() {
                return true;
            }
            self.undo_to(mark);
        }
        false
    }
}
