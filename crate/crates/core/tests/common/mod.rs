//! Independent brute-force oracles and seeded generators shared by the
//! integration suites. Nothing here calls into the solver; formulas are
//! built and evaluated on a local expression type.

#![allow(dead_code)]

use entail_core::kb::{AtomKind, Ontology};
use entail_core::logic::{AtomId, Formula, Lit};
use rand::Rng;

pub const TOY_KB: &str = "finding cb\nfinding ms\nfinding lo\nfinding ab\n\
                          diagnosis pe\ndiagnosis pna\n\
                          rule eff1: cb & ms -> pe\n\
                          rule pna1: lo & ab -> pna\n";

#[derive(Debug, Clone)]
pub enum Expr {
    Const(bool),
    Var(usize),
    Not(Box<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Imp(Box<Expr>, Box<Expr>),
    Iff(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, bits: &[bool]) -> bool {
        match self {
            Expr::Const(b) => *b,
            Expr::Var(i) => bits[*i],
            Expr::Not(e) => !e.eval(bits),
            Expr::And(es) => es.iter().all(|e| e.eval(bits)),
            Expr::Or(es) => es.iter().any(|e| e.eval(bits)),
            Expr::Imp(a, b) => !a.eval(bits) || b.eval(bits),
            Expr::Iff(a, b) => a.eval(bits) == b.eval(bits),
        }
    }

    /// Raw variants on purpose: empty and singleton `And`/`Or` nodes reach
    /// the encoder unsimplified.
    pub fn to_formula(&self) -> Formula {
        match self {
            Expr::Const(true) => Formula::True,
            Expr::Const(false) => Formula::False,
            Expr::Var(i) => Formula::Atom(AtomId(*i)),
            Expr::Not(e) => Formula::Not(Box::new(e.to_formula())),
            Expr::And(es) => Formula::And(es.iter().map(Expr::to_formula).collect()),
            Expr::Or(es) => Formula::Or(es.iter().map(Expr::to_formula).collect()),
            Expr::Imp(a, b) => Formula::Implies(Box::new(a.to_formula()), Box::new(b.to_formula())),
            Expr::Iff(a, b) => Formula::Iff(Box::new(a.to_formula()), Box::new(b.to_formula())),
        }
    }
}

pub fn random_expr<R: Rng + ?Sized>(rng: &mut R, vars: usize, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.05) {
            Expr::Const(rng.gen())
        } else {
            Expr::Var(rng.gen_range(0..vars))
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..6) {
        0 => Expr::Not(Box::new(random_expr(rng, vars, d))),
        1 => Expr::And(
            (0..rng.gen_range(0..4))
                .map(|_| random_expr(rng, vars, d))
                .collect(),
        ),
        2 => Expr::Or(
            (0..rng.gen_range(0..4))
                .map(|_| random_expr(rng, vars, d))
                .collect(),
        ),
        3 => Expr::Imp(
            Box::new(random_expr(rng, vars, d)),
            Box::new(random_expr(rng, vars, d)),
        ),
        4 => Expr::Iff(
            Box::new(random_expr(rng, vars, d)),
            Box::new(random_expr(rng, vars, d)),
        ),
        _ => Expr::Var(rng.gen_range(0..vars)),
    }
}

/// Assignment for index `i` with atom 0 as the most significant bit.
pub fn bits_of(index: u64, n: usize) -> Vec<bool> {
    (0..n).map(|k| (index >> (n - 1 - k)) & 1 == 1).collect()
}

/// First satisfying assignment in lexicographic order, if any.
pub fn brute_first_model(expr: &Expr, n: usize) -> Option<Vec<bool>> {
    (0..1u64 << n).map(|i| bits_of(i, n)).find(|b| expr.eval(b))
}

pub fn random_3cnf(rng: &mut impl Rng) -> (usize, Vec<Vec<Lit>>) {
    let n = rng.gen_range(3..=10);
    let m = rng.gen_range(n..=5 * n);
    let clauses = (0..m)
        .map(|_| (0..3).map(|_| Lit::new(rng.gen_range(0..n), rng.gen())).collect())
        .collect();
    (n, clauses)
}

pub fn clause_holds(clause: &[Lit], bits: &[bool]) -> bool {
    clause.iter().any(|l| bits[l.var()] == l.is_positive())
}

pub fn brute_cnf_sat(n: usize, clauses: &[Vec<Lit>]) -> bool {
    (0..1u64 << n).any(|i| {
        let bits = bits_of(i, n);
        clauses.iter().all(|c| clause_holds(c, &bits))
    })
}

/// A random knowledge base over findings `f0..` (ids `0..nf`) followed by
/// diagnoses `d0..`, plus one evidence vector and one queried diagnosis.
#[derive(Debug, Clone)]
pub struct EntailInstance {
    pub n_findings: usize,
    pub n_diagnoses: usize,
    pub rules: Vec<Expr>,
    pub evidence: Vec<bool>,
    pub query: usize,
}

impl EntailInstance {
    pub fn random(rng: &mut impl Rng) -> Self {
        let n_findings = rng.gen_range(1..=6);
        let n_diagnoses = rng.gen_range(1..=(10 - n_findings).min(4));
        let total = n_findings + n_diagnoses;
        let n_rules = rng.gen_range(1..=4);
        let rules = (0..n_rules)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    // definite clause: conjunction of findings -> diagnosis
                    let body = (0..rng.gen_range(1..=2))
                        .map(|_| Expr::Var(rng.gen_range(0..n_findings)))
                        .collect();
                    let head = Expr::Var(n_findings + rng.gen_range(0..n_diagnoses));
                    Expr::Imp(Box::new(Expr::And(body)), Box::new(head))
                } else {
                    random_expr(rng, total, 3)
                }
            })
            .collect();
        EntailInstance {
            n_findings,
            n_diagnoses,
            rules,
            evidence: (0..n_findings).map(|_| rng.gen()).collect(),
            query: n_findings + rng.gen_range(0..n_diagnoses),
        }
    }

    pub fn total_atoms(&self) -> usize {
        self.n_findings + self.n_diagnoses
    }

    pub fn ontology(&self) -> Ontology {
        let mut ont = Ontology::default();
        for i in 0..self.n_findings {
            ont.declare(&format!("f{i}"), AtomKind::Finding).unwrap();
        }
        for i in 0..self.n_diagnoses {
            ont.declare(&format!("d{i}"), AtomKind::Diagnosis).unwrap();
        }
        for (i, r) in self.rules.iter().enumerate() {
            ont.add_rule(&format!("r{i}"), r.to_formula()).unwrap();
        }
        ont
    }

    /// Full assignments that agree with the evidence and satisfy every rule.
    pub fn models(&self) -> Vec<Vec<bool>> {
        let n = self.total_atoms();
        (0..1u64 << n)
            .map(|i| bits_of(i, n))
            .filter(|b| b[..self.n_findings] == self.evidence[..])
            .filter(|b| self.rules.iter().all(|r| r.eval(b)))
            .collect()
    }

    /// `None` when the evidence is inconsistent with the rules.
    pub fn oracle_entails(&self, d: usize) -> Option<bool> {
        let models = self.models();
        (!models.is_empty()).then(|| models.iter().all(|m| m[d]))
    }

    pub fn rules_hold(&self, bits: &[bool]) -> bool {
        self.rules.iter().all(|r| r.eval(bits))
    }
}
