//! Text formats: problems, construction scripts, rule files and dataset records.

mod problem;
mod record;
mod rules;
mod script;
pub(crate) mod token;

pub use problem::{parse_premise_clause, parse_problem, Premise, PremiseClause, Problem};
#[cfg(test)]
pub(crate) use record::tests as tests_support;
pub use record::{
    lint_record, parse_record, parse_record_stream, serialize_record, serialize_request,
    NumericCheck, ProofStep, Record, RecordError,
};
pub(crate) use rules::{content_lines, parse_template_list};
pub use rules::{parse_rules, Rule, Template, ANGLE_CHASE, RATIO_CHASE};
pub use script::{format_script, parse_construction_script, Construction};
#[allow(unused_imports)]
pub(crate) use token::{tokenize, unexpected, Cursor, Tok, Token};

use alloc::string::String;
use core::fmt;

use crate::statement::Predicate;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnknownPredicate(String),
    ArityMismatch {
        predicate: Predicate,
        expected: usize,
        found: usize,
    },
    UndeclaredPoint(String),
    DuplicatePoint(String),
    UnexpectedToken(String),
    UnexpectedEnd,
    BadLiteral(String),
    BadId(String),
    UnknownConstruction(String),
    WrongArgCount {
        construction: String,
        expected: usize,
        found: usize,
    },
    DuplicateRuleName(String),
    UnboundConclusionVariable(String),
    TooManyVariables(String),
    MissingSection(&'static str),
}

/// A parse failure with the byte offset of the offending token.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

impl ParseError {
    pub fn new(kind: ParseErrorKind, offset: usize) -> Self {
        ParseError { kind, offset }
    }
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ParseErrorKind::*;
        match self {
            UnknownPredicate(t) => write!(f, "unknown predicate `{t}`"),
            ArityMismatch {
                predicate,
                expected,
                found,
            } => {
                write!(f, "`{predicate}` takes {expected} points, found {found}")
            }
            UndeclaredPoint(p) => write!(f, "undeclared point `{p}`"),
            DuplicatePoint(p) => write!(f, "point `{p}` declared twice"),
            UnexpectedToken(t) => write!(f, "unexpected token `{t}`"),
            UnexpectedEnd => f.write_str("unexpected end of input"),
            BadLiteral(t) => write!(f, "bad literal `{t}`"),
            BadId(t) => write!(f, "bad fact id `{t}`"),
            UnknownConstruction(t) => write!(f, "unknown construction `{t}`"),
            WrongArgCount {
                construction,
                expected,
                found,
            } => {
                write!(f, "`{construction}` takes {expected} points, found {found}")
            }
            DuplicateRuleName(n) => write!(f, "duplicate rule name `{n}`"),
            UnboundConclusionVariable(v) => {
                write!(f, "conclusion variable `{v}` not bound by a premise")
            }
            TooManyVariables(r) => write!(f, "rule `{r}` has more than 8 variables"),
            MissingSection(s) => write!(f, "missing section <{s}>"),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at byte {}", self.kind, self.offset)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ParseError {}
