//! Reading problem files and turning formulas into clauses.
//!
//! Two dialects of a strict TPTP subset are accepted:
//!
//! * **typed**: `tff` units with `$tType` sort declarations, typed symbol
//!   declarations and typed quantifiers; `cnf`/`fof` units may be mixed in and
//!   use the default sort `$i`.
//! * **untyped**: `cnf` and `fof` units only; every symbol lives in `$i`.
//!
//! `$distinct(t1,...,tk)` expands to pairwise disequalities. Arithmetic,
//! `$o`-typed arguments, polymorphism, `include` and annotations are rejected.

mod clausify;
mod lexer;
mod parser;

pub use clausify::{clausify, ClausifyOptions};

use crate::logic::{Atom, Signature, Var};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dialect {
    Typed,
    Untyped,
}

impl Dialect {
    /// Typed if the text contains a `tff` unit.
    pub fn detect(text: &str) -> Dialect {
        if parser::looks_typed(text) {
            Dialect::Typed
        } else {
            Dialect::Untyped
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Axiom,
    Conjecture,
    Other,
}

/// Quantified formula tree. Variables are made unique per file by the parser,
/// so binders never shadow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(Vec<Var>, Box<Formula>),
    Exists(Vec<Var>, Box<Formula>),
}

impl Formula {
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => {
                for t in a.terms() {
                    let mut vs = BTreeSet::new();
                    t.collect_vars(&mut vs);
                    out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
                }
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_free(bound, out)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(vs, f) | Formula::Exists(vs, f) => {
                let depth = bound.len();
                bound.extend(vs.iter().copied());
                f.collect_free(bound, out);
                bound.truncate(depth);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceFormula {
    pub name: String,
    pub role: Role,
    pub body: Formula,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("unsupported construct at {line}:{col}: {construct}")]
    Unsupported { line: usize, col: usize, construct: String },
    #[error("declaration error at {line}:{col}: {message}")]
    Declaration { line: usize, col: usize, message: String },
    #[error("sort error at {line}:{col}: {message}")]
    Sort { line: usize, col: usize, message: String },
}

impl ParseError {
    pub fn position(&self) -> (usize, usize) {
        match self {
            ParseError::Syntax { line, col, .. }
            | ParseError::Unsupported { line, col, .. }
            | ParseError::Declaration { line, col, .. }
            | ParseError::Sort { line, col, .. } => (*line, *col),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClausifyError {
    #[error("clausification produced more than {limit} clauses")]
    TooManyClauses { limit: usize },
}

/// Parses a problem file into its signature and formulas.
pub fn parse(text: &str, dialect: Dialect) -> Result<(Signature, Vec<SourceFormula>), ParseError> {
    parser::Parser::new(text, dialect)?.run()
}
