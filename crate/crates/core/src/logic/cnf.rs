use std::fmt;

use super::formula::{AtomId, Formula};

/// A literal packed as `2 * var + negated`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: usize, positive: bool) -> Self {
        Lit(((var as u32) << 1) | u32::from(!positive))
    }

    pub fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn negate(self) -> Self {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.is_positive() { '+' } else { '-' };
        write!(f, "{sign}{}", self.var())
    }
}

/// Clausal form. Variables `0..original_count` are source atoms; anything
/// above is auxiliary and only introduced by [`tseitin_compile`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Cnf {
    clauses: Vec<Vec<Lit>>,
    var_count: usize,
    original_count: usize,
}

impl Cnf {
    pub fn new(original_count: usize) -> Self {
        Cnf {
            clauses: Vec::new(),
            var_count: original_count,
            original_count,
        }
    }

    /// Builds a CNF from raw clauses over `var_count` plain variables.
    pub fn from_clauses(var_count: usize, clauses: impl IntoIterator<Item = Vec<Lit>>) -> Self {
        let mut cnf = Cnf::new(var_count);
        for c in clauses {
            cnf.add_clause(c);
        }
        cnf.original_count = cnf.var_count;
        cnf
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    pub fn var_count(&self) -> usize {
        self.var_count
    }

    pub fn original_count(&self) -> usize {
        self.original_count
    }

    fn fresh_var(&mut self) -> usize {
        self.var_count += 1;
        self.var_count - 1
    }

    /// Adds a clause after sorting and deduplicating its literals. Tautologies
    /// (both polarities of one variable) are dropped. Returns whether the
    /// clause was kept.
    pub fn add_clause(&mut self, mut clause: Vec<Lit>) -> bool {
        clause.sort_unstable();
        clause.dedup();
        if clause.windows(2).any(|w| w[0].var() == w[1].var()) {
            return false;
        }
        if let Some(max) = clause.iter().map(|l| l.var()).max() {
            self.var_count = self.var_count.max(max + 1);
        }
        self.clauses.push(clause);
        true
    }
}

impl fmt::Display for Cnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, l) in c.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{l}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Compiles `formula` to an equisatisfiable CNF with the full (two-sided)
/// Tseitin encoding.
///
/// Constants are folded first. A formula that folds to `False` yields a
/// single empty clause; `True` yields no clauses. Top-level conjuncts are
/// asserted one by one and literals never get a definition variable, so
/// `a` compiles to `[[+a]]`. Auxiliary variables start at
/// `max(atom_count, formula.atom_span())`.
pub fn tseitin_compile(formula: &Formula, atom_count: usize) -> Cnf {
    let mut cnf = Cnf::new(atom_count.max(formula.atom_span()));
    match formula.fold_constants() {
        Formula::True => {}
        Formula::False => {
            cnf.clauses.push(Vec::new());
        }
        folded => {
            let mut roots = Vec::new();
            flatten_conjuncts(&folded, &mut roots);
            for root in roots {
                let lit = encode(root, &mut cnf);
                cnf.add_clause(vec![lit]);
            }
        }
    }
    cnf
}

fn flatten_conjuncts<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::And(cs) => cs.iter().for_each(|c| flatten_conjuncts(c, out)),
        other => out.push(other),
    }
}

fn encode(f: &Formula, cnf: &mut Cnf) -> Lit {
    match f {
        Formula::Atom(AtomId(i)) => Lit::new(*i, true),
        Formula::Not(inner) => encode(inner, cnf).negate(),
        Formula::And(cs) => {
            let kids: Vec<Lit> = cs.iter().map(|c| encode(c, cnf)).collect();
            let x = Lit::new(cnf.fresh_var(), true);
            // x -> each child
            for &k in &kids {
                cnf.add_clause(vec![x.negate(), k]);
            }
            // all children -> x
            let mut back: Vec<Lit> = kids.iter().map(|k| k.negate()).collect();
            back.push(x);
            cnf.add_clause(back);
            x
        }
        Formula::Or(cs) => {
            let kids: Vec<Lit> = cs.iter().map(|c| encode(c, cnf)).collect();
            let x = Lit::new(cnf.fresh_var(), true);
            let mut fwd = kids.clone();
            fwd.push(x.negate());
            cnf.add_clause(fwd);
            for &k in &kids {
                cnf.add_clause(vec![x, k.negate()]);
            }
            x
        }
        Formula::Implies(l, r) => {
            let (a, b) = (encode(l, cnf), encode(r, cnf));
            let x = Lit::new(cnf.fresh_var(), true);
            cnf.add_clause(vec![x.negate(), a.negate(), b]);
            cnf.add_clause(vec![x, a]);
            cnf.add_clause(vec![x, b.negate()]);
            x
        }
        Formula::Iff(l, r) => {
            let (a, b) = (encode(l, cnf), encode(r, cnf));
            let x = Lit::new(cnf.fresh_var(), true);
            cnf.add_clause(vec![x.negate(), a.negate(), b]);
            cnf.add_clause(vec![x.negate(), a, b.negate()]);
            cnf.add_clause(vec![x, a, b]);
            cnf.add_clause(vec![x, a.negate(), b.negate()]);
            x
        }
        Formula::True | Formula::False => {
            unreachable!("constants are folded before encoding")
        }
    }
}
