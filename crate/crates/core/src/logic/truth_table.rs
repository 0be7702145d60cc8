use super::formula::{Formula, Model, SatResult};
use super::LogicError;

/// Largest number of distinct atoms the enumeration oracle accepts.
pub const TRUTH_TABLE_ATOM_LIMIT: usize = 20;

/// Exhaustive satisfiability check over the atoms that occur in `formula`.
///
/// Rows are visited in lexicographic order with the lowest-index atom most
/// significant and `false < true`; the first satisfying row is returned as a
/// model of width `max(atom_count, formula.atom_span())` with every
/// non-occurring atom set to `false`.
pub fn truth_table_sat(formula: &Formula, atom_count: usize) -> Result<SatResult, LogicError> {
    let atoms: Vec<_> = formula.atoms().into_iter().collect();
    if atoms.len() > TRUTH_TABLE_ATOM_LIMIT {
        return Err(LogicError::TooManyAtoms {
            count: atoms.len(),
            limit: TRUTH_TABLE_ATOM_LIMIT,
        });
    }
    let width = atom_count.max(formula.atom_span());
    let k = atoms.len();
    let mut row = vec![false; width];
    for mask in 0u64..(1u64 << k) {
        for (j, atom) in atoms.iter().enumerate() {
            row[atom.index()] = (mask >> (k - 1 - j)) & 1 == 1;
        }
        if formula.eval(&row)? {
            return Ok(SatResult::Sat(Model::new(row)));
        }
    }
    Ok(SatResult::Unsat)
}
