use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::token::{parse_statement, tokenize, unexpected, Cursor, Tok, Token};
use super::{ParseError, ParseErrorKind};
use crate::statement::{fmt_rational, Predicate, Rational};

/// Names reserved for the built-in angle chase and ratio chase.
pub const ANGLE_CHASE: &str = "a01";
pub const RATIO_CHASE: &str = "a00";

/// A statement pattern over variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Template {
    pub predicate: Predicate,
    pub args: Vec<String>,
    pub literal: Option<Rational>,
}

impl Template {
    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.args.iter().map(|s| s.as_str())
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.predicate.name())?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        if let Some(l) = &self.literal {
            f.write_str(" ")?;
            fmt_rational(l, f)?;
        }
        Ok(())
    }
}

/// A Horn rule. `sameclock` premises are numeric guards: they are checked
/// on the figure, not looked up among facts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub premises: Vec<Template>,
    pub conclusions: Vec<Template>,
    pub numeric_guards: Vec<Template>,
}

impl Rule {
    /// Variables in first-occurrence order over premises then guards.
    pub fn variables(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for t in self.premises.iter().chain(&self.numeric_guards) {
            for v in t.vars() {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} :", self.name)?;
        for (i, t) in self.premises.iter().chain(&self.numeric_guards).enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, " {t}")?;
        }
        f.write_str(" =>")?;
        for (i, t) in self.conclusions.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, " {t}")?;
        }
        Ok(())
    }
}

pub(crate) fn parse_template_list(
    cur: &mut Cursor<'_>,
    stop: &[Tok<'_>],
) -> Result<Vec<(Template, usize)>, ParseError> {
    let mut out = Vec::new();
    loop {
        match cur.peek() {
            None => break,
            Some(t) if stop.contains(&t.tok) => break,
            Some(Token {
                tok: Tok::Word(_),
                offset,
            }) => {
                let st = parse_statement(cur, |w, off| {
                    if w.chars().next().is_some_and(|c| c.is_ascii_uppercase()) {
                        Ok(())
                    } else {
                        Err(ParseError::new(
                            ParseErrorKind::UnexpectedToken(w.to_string()),
                            off,
                        ))
                    }
                })?;
                out.push((
                    Template {
                        predicate: st.predicate,
                        args: st.args,
                        literal: st.literal,
                    },
                    offset,
                ));
                if !cur.eat(Tok::Comma) {
                    match cur.peek() {
                        None => break,
                        Some(t) if stop.contains(&t.tok) => break,
                        Some(t) => return Err(unexpected(t)),
                    }
                }
            }
            Some(t) => return Err(unexpected(t)),
        }
    }
    Ok(out)
}

/// Byte ranges of the non-comment part of each line.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut base = 0;
    text.split_inclusive('\n').map(move |line| {
        let start = base;
        base += line.len();
        let body = line.split('#').next().unwrap_or("");
        (start, body.trim_end_matches(['\n', '\r']))
    })
}

/// Parses a rule file: one `name : premise, ... => conclusion, ...` per line.
pub fn parse_rules(text: &str) -> Result<Vec<Rule>, ParseError> {
    let mut rules: Vec<Rule> = Vec::new();
    let mut names = BTreeSet::new();
    names.insert(ANGLE_CHASE.to_string());
    names.insert(RATIO_CHASE.to_string());
    for (start, body) in content_lines(text) {
        if body.trim().is_empty() {
            continue;
        }
        let toks = tokenize(body, start)?;
        let mut cur = Cursor::new(toks, start + body.len());
        let (name, name_off) = cur.word()?;
        if !names.insert(name.to_string()) {
            return Err(ParseError::new(
                ParseErrorKind::DuplicateRuleName(name.to_string()),
                name_off,
            ));
        }
        cur.expect(Tok::Colon)?;
        let premises = parse_template_list(&mut cur, &[Tok::Arrow])?;
        cur.expect(Tok::Arrow)?;
        let conclusions = parse_template_list(&mut cur, &[])?;
        if let Some(t) = cur.next() {
            return Err(unexpected(t));
        }
        let mut bound = BTreeSet::new();
        let mut prem = Vec::new();
        let mut guards = Vec::new();
        for (t, _) in premises {
            if t.predicate == Predicate::SameClock {
                guards.push(t);
            } else {
                bound.extend(t.args.iter().cloned());
                prem.push(t);
            }
        }
        for (t, off) in guards
            .iter()
            .map(|g| (g, name_off))
            .chain(conclusions.iter().map(|(t, o)| (t, *o)))
        {
            if let Some(v) = t.args.iter().find(|v| !bound.contains(*v)) {
                return Err(ParseError::new(
                    ParseErrorKind::UnboundConclusionVariable(v.clone()),
                    off,
                ));
            }
        }
        rules.push(Rule {
            name: name.to_string(),
            premises: prem,
            conclusions: conclusions.into_iter().map(|(t, _)| t).collect(),
            numeric_guards: guards,
        });
    }
    Ok(rules)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_rule() {
        let rules = parse_rules("r53 : simtrir A B C P Q R => eqratio A B P Q B C Q R").unwrap();
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].premises.len(), 1);
        assert_eq!(rules[0].conclusions[0].predicate, Predicate::EqRatio);
    }

    #[test]
    fn unbound_conclusion_variable() {
        let e = parse_rules("bad : coll A B C => para A B D E").unwrap_err();
        assert_eq!(
            e.kind,
            ParseErrorKind::UnboundConclusionVariable("D".to_string())
        );
    }

    #[test]
    fn empty_file() {
        assert!(parse_rules("").unwrap().is_empty());
        assert!(parse_rules("# only a comment\n\n").unwrap().is_empty());
    }

    #[test]
    fn duplicate_names() {
        let e =
            parse_rules("x : coll A B C => coll B A C\nx : coll A B C => coll C B A").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateRuleName("x".to_string()));
    }

    #[test]
    fn guards_are_split_out() {
        let r = &parse_rules(
            "r35 : eqangle A B B C Q R P Q, eqangle A C B C Q R P R, sameclock A B C P R Q => simtrir A B C P Q R",
        )
        .unwrap()[0];
        assert_eq!(r.premises.len(), 2);
        assert_eq!(r.numeric_guards.len(), 1);
        assert_eq!(r.variables(), ["A", "B", "C", "Q", "R", "P"]);
    }
}
