//! Clinical knowledge bases: the ontology type, the `.kbl` parser and the
//! consistency / reachability linter.

mod lint;
mod ontology;
mod parser;

use thiserror::Error;

pub use lint::{lint_kb, LintJson, LintReport, Reachability, ReachabilityJson, LINT_FINDING_LIMIT};
pub use ontology::{Atom, AtomKind, Ontology, Rule};
pub use parser::parse_kb;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KbError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}, column {column}: undeclared atom `{name}`")]
    UndeclaredAtom {
        line: usize,
        column: usize,
        name: String,
    },
    #[error("line {line}: `{name}` is already declared")]
    DuplicateDeclaration { line: usize, name: String },
    #[error("line {line}: duplicate rule name `{name}`")]
    DuplicateRule { line: usize, name: String },
}

impl KbError {
    fn at_line(self, line: usize) -> Self {
        match self {
            KbError::DuplicateDeclaration { name, .. } => KbError::DuplicateDeclaration { line, name },
            KbError::DuplicateRule { name, .. } => KbError::DuplicateRule { line, name },
            other => other,
        }
    }
}
