use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::token::{
    check_no_extra_arg, is_point_name, parse_statement, tokenize, unexpected, Cursor, Tok, Token,
};
use super::{ParseError, ParseErrorKind};
use crate::statement::Statement;

/// A premise statement with the fact id it was declared with, if any.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Premise {
    pub statement: Statement,
    pub id: Option<u32>,
}

/// One `points : statements` clause.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PremiseClause {
    pub points: Vec<String>,
    pub statements: Vec<Premise>,
}

impl PremiseClause {
    pub fn new(points: Vec<String>, statements: Vec<Statement>) -> Self {
        PremiseClause {
            points,
            statements: statements
                .into_iter()
                .map(|statement| Premise {
                    statement,
                    id: None,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub clauses: Vec<PremiseClause>,
    pub goal: Statement,
}

impl Problem {
    pub fn points(&self) -> impl Iterator<Item = &str> {
        self.clauses
            .iter()
            .flat_map(|c| c.points.iter().map(|p| p.as_str()))
    }

    pub fn premise_statements(&self) -> impl Iterator<Item = &Premise> {
        self.clauses.iter().flat_map(|c| c.statements.iter())
    }
}

/// Parses clause bodies (`a b : stmt [id] stmt ...`) until `?`, `;` or end.
/// Shared with the aux section of records.
pub(crate) fn parse_clause<'a>(
    cur: &mut Cursor<'a>,
    declared: &mut BTreeSet<String>,
) -> Result<PremiseClause, ParseError> {
    let mut clause = PremiseClause::default();
    loop {
        match cur.next() {
            Some(Token {
                tok: Tok::Word(w),
                offset,
            }) => {
                if !is_point_name(w) {
                    return Err(ParseError::new(
                        ParseErrorKind::UnexpectedToken(w.to_string()),
                        offset,
                    ));
                }
                if declared.contains(w) || clause.points.iter().any(|p| p == w) {
                    return Err(ParseError::new(
                        ParseErrorKind::DuplicatePoint(w.to_string()),
                        offset,
                    ));
                }
                clause.points.push(w.to_string());
            }
            Some(Token {
                tok: Tok::Colon,
                offset,
            }) => {
                if clause.points.is_empty() {
                    return Err(ParseError::new(
                        ParseErrorKind::UnexpectedToken(":".to_string()),
                        offset,
                    ));
                }
                break;
            }
            Some(t) => return Err(unexpected(t)),
            None => return Err(ParseError::new(ParseErrorKind::UnexpectedEnd, cur.offset())),
        }
    }
    for p in &clause.points {
        declared.insert(p.clone());
    }
    while let Some(Token {
        tok: Tok::Word(_),
        offset,
    }) = cur.peek()
    {
        let st = parse_statement(cur, |w, off| check_declared(declared, w, off))?;
        check_no_extra_arg(cur, &st, offset)?;
        let mut id = None;
        if let Some(Token {
            tok: Tok::Id(n), ..
        }) = cur.peek()
        {
            id = Some(n);
            cur.next();
        }
        cur.eat(Tok::Comma);
        clause.statements.push(Premise { statement: st, id });
    }
    Ok(clause)
}

pub(crate) fn check_declared(
    declared: &BTreeSet<String>,
    w: &str,
    off: usize,
) -> Result<(), ParseError> {
    if declared.contains(w) {
        Ok(())
    } else {
        Err(ParseError::new(
            ParseErrorKind::UndeclaredPoint(w.to_string()),
            off,
        ))
    }
}

pub(crate) fn parse_problem_tokens(cur: &mut Cursor<'_>) -> Result<Problem, ParseError> {
    let mut declared = BTreeSet::new();
    let mut clauses = Vec::new();
    loop {
        match cur.peek() {
            Some(Token {
                tok: Tok::Question, ..
            }) => {
                cur.next();
                break;
            }
            Some(_) => {
                clauses.push(parse_clause(cur, &mut declared)?);
                match cur.peek() {
                    Some(Token { tok: Tok::Semi, .. }) => {
                        cur.next();
                    }
                    Some(Token {
                        tok: Tok::Question, ..
                    }) => {}
                    Some(t) => return Err(unexpected(t)),
                    None => {
                        return Err(ParseError::new(ParseErrorKind::UnexpectedEnd, cur.offset()))
                    }
                }
            }
            None => return Err(ParseError::new(ParseErrorKind::UnexpectedEnd, cur.offset())),
        }
    }
    let off = cur.offset();
    let goal = parse_statement(cur, |w, o| check_declared(&declared, w, o))?;
    check_no_extra_arg(cur, &goal, off)?;
    Ok(Problem { clauses, goal })
}

/// Parses one clause over already declared points; a trailing `;` is allowed.
pub fn parse_premise_clause(
    text: &str,
    declared: &BTreeSet<String>,
) -> Result<PremiseClause, ParseError> {
    let toks = tokenize(text, 0)?;
    let mut cur = Cursor::new(toks, text.len());
    let mut declared = declared.clone();
    let clause = parse_clause(&mut cur, &mut declared)?;
    cur.eat(Tok::Semi);
    if let Some(t) = cur.next() {
        return Err(unexpected(t));
    }
    Ok(clause)
}

/// Parses a problem: `;`-separated clauses followed by `? goal`.
pub fn parse_problem(text: &str) -> Result<Problem, ParseError> {
    let toks = tokenize(text, 0)?;
    let mut cur = Cursor::new(toks, text.len());
    let problem = parse_problem_tokens(&mut cur)?;
    if let Some(t) = cur.next() {
        return Err(unexpected(t));
    }
    Ok(problem)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statement::Predicate;

    pub(crate) const FIG2_PROBLEM: &str = "a : ; b : ; c : ; d : coll b c d [000] ;
e : eqangle a d d e d e b d [001] eqangle a b a e a e a d [002] ;
f : coll a b f [003] perp a b f e [004] ;
g : coll b d g [005] perp b d g e [006]
? cong f e g e";

    #[test]
    fn minimal_problem() {
        let p = parse_problem("a : ; b : ; c : ; d : coll b c d [000] ? para a b c d").unwrap();
        assert_eq!(p.clauses.len(), 4);
        assert_eq!(
            p.goal,
            Statement::from_strs(Predicate::Para, &["a", "b", "c", "d"])
        );
        assert_eq!(p.clauses[3].statements[0].id, Some(0));
    }

    #[test]
    fn figure2_problem() {
        let p = parse_problem(FIG2_PROBLEM).unwrap();
        assert_eq!(p.clauses.len(), 7);
        let ids: Vec<u32> = p.premise_statements().map(|s| s.id.unwrap()).collect();
        assert_eq!(ids, (0..7).collect::<Vec<_>>());
        assert_eq!(
            p.goal,
            Statement::from_strs(Predicate::Cong, &["f", "e", "g", "e"])
        );
    }

    #[test]
    fn forward_reference_rejected() {
        let e = parse_problem("a : coll a b c ?").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UndeclaredPoint("b".to_string()));
        assert_eq!(e.offset, 11);
    }

    #[test]
    fn structured_errors() {
        let e = parse_problem("a : ; b : ; c : foo a b c ? coll a b c").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownPredicate("foo".to_string()));
        let e = parse_problem("a : ; b : ; c : coll a b ? coll a b c").unwrap_err();
        assert!(matches!(
            e.kind,
            ParseErrorKind::ArityMismatch {
                expected: 3,
                found: 2,
                ..
            }
        ));
        let e = parse_problem("a : ; a : ? coll a a a").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicatePoint("a".to_string()));
        let e = parse_problem("a : ; b : ? cong a b a z").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UndeclaredPoint("z".to_string()));
    }

    #[test]
    fn single_clause() {
        let declared: BTreeSet<String> = ["a", "d", "e"].iter().map(|s| s.to_string()).collect();
        let c = parse_premise_clause("h : coll a d h, perp a d h e", &declared).unwrap();
        assert_eq!(c.points, ["h"]);
        assert_eq!(c.statements.len(), 2);
        assert!(parse_premise_clause("h : coll a d z", &declared).is_err());
        assert!(parse_premise_clause("h : coll a d h ; x :", &declared).is_err());
    }

    #[test]
    fn commas_and_literals() {
        let p =
            parse_problem("a b c d : ; h : coll a d h, perp a d h b ? aconst a b c d 1/2").unwrap();
        assert_eq!(p.clauses[1].statements.len(), 2);
        assert_eq!(p.goal.literal, Some(crate::statement::Rational::new(1, 2)));
    }
}
