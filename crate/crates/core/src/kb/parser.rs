//! Line-oriented parser for `.kbl` knowledge bases.
//!
//! ```text
//! finding costophrenic_blunting
//! diagnosis pleural_effusion
//! rule eff1: costophrenic_blunting & meniscus_sign -> pleural_effusion
//! ```
//!
//! Formula precedence, tightest first: `!`, `&`, `|`, `->`, `<->`. Both
//! arrows associate to the right. A chain of the same binary operator
//! (`a & b & c`) becomes one n-ary node; parentheses always start a new node.

use super::ontology::{AtomKind, Ontology};
use super::KbError;
use crate::logic::Formula;

pub fn parse_kb(text: &str) -> Result<Ontology, KbError> {
    let mut ontology = Ontology::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let mut lexer = Lexer::new(line, line_no)?;
        let Some(first) = lexer.peek().cloned() else {
            continue;
        };
        let Token::Ident(keyword) = &first.token else {
            return Err(lexer.error_at(&first, "expected `finding`, `diagnosis` or `rule`"));
        };
        lexer.bump();
        match keyword.as_str() {
            "finding" | "diagnosis" => {
                let kind = if keyword == "finding" {
                    AtomKind::Finding
                } else {
                    AtomKind::Diagnosis
                };
                let name = lexer.expect_ident("atom name")?;
                lexer.expect_end()?;
                ontology.declare(&name, kind).map_err(|e| e.at_line(line_no))?;
            }
            "rule" => {
                let name = lexer.expect_ident("rule name")?;
                lexer.expect(Token::Colon, "`:` after rule name")?;
                let formula = FormulaParser {
                    lexer: &mut lexer,
                    ontology: &ontology,
                }
                .parse()?;
                lexer.expect_end()?;
                ontology
                    .add_rule(&name, formula)
                    .map_err(|e| e.at_line(line_no))?;
            }
            _ => {
                return Err(lexer.error_at(&first, "expected `finding`, `diagnosis` or `rule`"));
            }
        }
    }
    Ok(ontology)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Not,
    And,
    Or,
    Arrow,
    DoubleArrow,
    LParen,
    RParen,
    Colon,
}

#[derive(Debug, Clone)]
struct Spanned {
    token: Token,
    column: usize,
}

struct Lexer {
    tokens: Vec<Spanned>,
    pos: usize,
    line: usize,
    end_column: usize,
}

impl Lexer {
    fn new(src: &str, line: usize) -> Result<Self, KbError> {
        let bytes = src.as_bytes();
        let mut tokens = Vec::new();
        let mut i = 0;
        let syntax = |column: usize, message: String| KbError::Syntax {
            line,
            column,
            message,
        };
        while i < bytes.len() {
            let c = bytes[i];
            let column = src[..i].chars().count() + 1;
            let single = match c {
                b' ' | b'\t' | b'\r' => {
                    i += 1;
                    continue;
                }
                b'!' => Some(Token::Not),
                b'&' => Some(Token::And),
                b'|' => Some(Token::Or),
                b'(' => Some(Token::LParen),
                b')' => Some(Token::RParen),
                b':' => Some(Token::Colon),
                _ => None,
            };
            if let Some(token) = single {
                tokens.push(Spanned { token, column });
                i += 1;
            } else if src[i..].starts_with("<->") {
                tokens.push(Spanned {
                    token: Token::DoubleArrow,
                    column,
                });
                i += 3;
            } else if src[i..].starts_with("->") {
                tokens.push(Spanned {
                    token: Token::Arrow,
                    column,
                });
                i += 2;
            } else if c == b'_' || c.is_ascii_lowercase() {
                let start = i;
                while i < bytes.len()
                    && (bytes[i] == b'_' || bytes[i].is_ascii_lowercase() || bytes[i].is_ascii_digit())
                {
                    i += 1;
                }
                tokens.push(Spanned {
                    token: Token::Ident(src[start..i].to_string()),
                    column,
                });
            } else {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(syntax(column, format!("unexpected character `{ch}`")));
            }
        }
        Ok(Lexer {
            tokens,
            pos: 0,
            line,
            end_column: src.chars().count() + 1,
        })
    }

    fn peek(&self) -> Option<&Spanned> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Spanned> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn column(&self) -> usize {
        self.peek().map_or(self.end_column, |t| t.column)
    }

    fn error_at(&self, at: &Spanned, message: &str) -> KbError {
        KbError::Syntax {
            line: self.line,
            column: at.column,
            message: message.to_string(),
        }
    }

    fn error_here(&self, message: &str) -> KbError {
        KbError::Syntax {
            line: self.line,
            column: self.column(),
            message: message.to_string(),
        }
    }

    fn expect(&mut self, token: Token, what: &str) -> Result<(), KbError> {
        match self.peek() {
            Some(t) if t.token == token => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error_here(&format!("expected {what}"))),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<String, KbError> {
        match self.peek() {
            Some(Spanned {
                token: Token::Ident(name),
                ..
            }) => {
                if is_reserved(name) {
                    return Err(self.error_here(&format!("`{name}` is reserved")));
                }
                let name = name.clone();
                self.pos += 1;
                Ok(name)
            }
            _ => Err(self.error_here(&format!("expected {what}"))),
        }
    }

    fn expect_end(&self) -> Result<(), KbError> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.error_here("unexpected trailing input")),
        }
    }
}

fn is_reserved(name: &str) -> bool {
    matches!(name, "true" | "false")
}

struct FormulaParser<'a> {
    lexer: &'a mut Lexer,
    ontology: &'a Ontology,
}

impl FormulaParser<'_> {
    fn parse(&mut self) -> Result<Formula, KbError> {
        self.iff()
    }

    fn at(&self, token: &Token) -> bool {
        self.lexer.peek().is_some_and(|t| &t.token == token)
    }

    fn iff(&mut self) -> Result<Formula, KbError> {
        let lhs = self.implies()?;
        if self.at(&Token::DoubleArrow) {
            self.lexer.bump();
            let rhs = self.iff()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, KbError> {
        let lhs = self.or()?;
        if self.at(&Token::Arrow) {
            self.lexer.bump();
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, KbError> {
        let mut parts = vec![self.and()?];
        while self.at(&Token::Or) {
            self.lexer.bump();
            parts.push(self.and()?);
        }
        Ok(Formula::or(parts))
    }

    fn and(&mut self) -> Result<Formula, KbError> {
        let mut parts = vec![self.unary()?];
        while self.at(&Token::And) {
            self.lexer.bump();
            parts.push(self.unary()?);
        }
        Ok(Formula::and(parts))
    }

    fn unary(&mut self) -> Result<Formula, KbError> {
        if self.at(&Token::Not) {
            self.lexer.bump();
            return Ok(Formula::not(self.unary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula, KbError> {
        let Some(tok) = self.lexer.bump() else {
            return Err(self.lexer.error_here("expected a formula"));
        };
        match tok.token {
            Token::LParen => {
                let inner = self.iff()?;
                self.lexer.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            Token::Ident(name) => {
                match name.as_str() {
                    "true" => Ok(Formula::True),
                    "false" => Ok(Formula::False),
                    _ => self.ontology.lookup(&name).map(|a| Formula::atom(a.id)).ok_or(
                        KbError::UndeclaredAtom {
                            line: self.lexer.line,
                            column: tok.column,
                            name,
                        },
                    ),
                }
            }
            _ => Err(self.lexer.error_at(&tok, "expected an atom, constant or `(`")),
        }
    }
}
