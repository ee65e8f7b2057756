//! The `.sos` spec-file language.
//!
//! ```text
//! sorts P D
//! data { d0 d1 }
//! labels { a }
//! ops {
//!   0/0
//!   +/2 PP
//!   check/2 DP
//! }
//! pred same/2 { (d0,d0) (d1,d1) }
//! rule check_a {
//!   x -(d,a,e)-> y
//!   ---
//!   check(d,x) -(d,a,e)-> y
//! }
//! def p = a.0 + 0
//! ```
//!
//! With-data rules write configurations, `(x + y, d) -a-> (x1, e)`; curried
//! rules write triple labels, `x + y -(d,a,e)-> x1`. A spec uses one flavor.
//! Identifiers that are not declared symbols are variables, with their sort
//! taken from the position they occur in. Line comments start with `#`.

mod export;
mod lexer;
mod parser;
mod print;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use export::{export_lts, LtsFormat};
pub use print::{print_closed_rules, write_rule};

use crate::curry::{curry, uncurry};
use crate::term::{Signature, Symbol, Term};
use crate::tss::{validate_gsos_with_data, Flavor, Rule, Tss, ValidationReport};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownSymbol(String),
    UnknownLabel(String),
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    SortMismatch(String),
    Signature(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            ParseErrorKind::UnknownSymbol(m) => write!(f, "unknown symbol {m}"),
            ParseErrorKind::UnknownLabel(l) => write!(f, "unknown label `{l}`"),
            ParseErrorKind::Arity { name, expected, found } => {
                write!(f, "arity mismatch: `{name}` expects {expected} arguments, got {found}")
            }
            ParseErrorKind::SortMismatch(m) => write!(f, "sort mismatch: {m}"),
            ParseErrorKind::Signature(m) => write!(f, "{m}"),
        }
    }
}

/// A parse failure with its 1-based location.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

/// A parsed specification: signature, rules and named closed terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecFile {
    pub sig: Arc<Signature>,
    pub rules: Vec<Rule>,
    pub defs: Vec<(Symbol, Term)>,
}

impl SpecFile {
    pub fn new(sig: Signature, rules: Vec<Rule>) -> Self {
        SpecFile {
            sig: Arc::new(sig),
            rules,
            defs: Vec::new(),
        }
    }

    pub fn tss(&self) -> Tss {
        Tss::new(self.sig.clone(), self.rules.clone())
    }

    pub fn flavor(&self) -> Option<Flavor> {
        self.tss().flavor()
    }

    pub fn validate(&self) -> ValidationReport {
        validate_gsos_with_data(&self.rules, &self.sig)
    }

    /// The same spec with every rule curried.
    pub fn curried(&self) -> SpecFile {
        SpecFile {
            rules: curry(&self.tss()).rules,
            ..self.clone()
        }
    }

    pub fn uncurried(&self) -> SpecFile {
        SpecFile {
            rules: uncurry(&self.tss()).rules,
            ..self.clone()
        }
    }

    /// Parses a closed process term; `def` names expand to their terms.
    pub fn parse_term(&self, src: &str) -> Result<Term, ParseError> {
        parser::parse_closed_term(self, src)
    }

    /// Parses a process term in which undeclared identifiers are variables.
    pub fn parse_open_term(&self, src: &str) -> Result<Term, ParseError> {
        parser::parse_open_term(self, src)
    }

    pub fn def(&self, name: &str) -> Option<&Term> {
        self.defs.iter().find(|(n, _)| &**n == name).map(|(_, t)| t)
    }
}

pub fn parse_spec(text: &str) -> Result<SpecFile, ParseError> {
    parser::parse_spec_text(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
sorts P D
data { d0 d1 }
labels { a }
ops {
  0/0
  +/2 PP
  check/2 DP
}
pred same/2 { (d0,d0) (d1,d1) }

rule pre_a {
  ---
  a.x -(d,a,d)-> x
}

rule check_a {
  x -(d,a,e)-> y
  ---
  check(d,x) -(d,a,e)-> y
  where same(d,d)
}

def p = a.0 + 0
";

    #[test]
    fn small_spec_round_trips() {
        let spec = parse_spec(SMALL).unwrap();
        assert_eq!(spec.rules.len(), 2);
        assert_eq!(spec.to_string(), SMALL);
        assert!(spec.validate().is_ok(), "{:?}", spec.validate());
    }

    #[test]
    fn undeclared_label_is_located() {
        let bad = SMALL.replace("a.x -(d,a,d)-> x", "a.x -(d,b,d)-> x");
        let err = parse_spec(&bad).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownLabel("b".into()));
        assert_eq!((err.line, err.col), (13, 11));
    }

    #[test]
    fn arity_and_sort_errors() {
        let spec = parse_spec(SMALL).unwrap();
        assert!(matches!(
            spec.parse_term("check(d0)").unwrap_err().kind,
            ParseErrorKind::Arity { .. }
        ));
        assert!(matches!(
            spec.parse_term("check(a.0,0)").unwrap_err().kind,
            ParseErrorKind::SortMismatch(_) | ParseErrorKind::UnknownSymbol(_)
        ));
        assert!(matches!(spec.parse_term("d0").unwrap_err().kind, ParseErrorKind::SortMismatch(_)));
        assert!(matches!(spec.parse_term("zz").unwrap_err().kind, ParseErrorKind::UnknownSymbol(_)));
    }

    #[test]
    fn defs_expand_in_terms() {
        let spec = parse_spec(SMALL).unwrap();
        assert_eq!(spec.parse_term("a.p").unwrap().to_string(), "a.(a.0 + 0)");
    }

    #[test]
    fn mixed_flavors_are_rejected() {
        let bad = SMALL.replace("check(d,x) -(d,a,e)-> y", "(check(d,x), d) -a-> (y, e)");
        assert!(parse_spec(&bad).is_err());
    }
}
