use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::{self, Write};

use super::problem::{check_declared, parse_clause, parse_problem_tokens, PremiseClause, Problem};
use super::token::{check_no_extra_arg, parse_statement, tokenize, unexpected, Cursor, Tok, Token};
use super::{ParseError, ParseErrorKind};
use crate::statement::Statement;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumericCheck {
    pub statement: Statement,
    pub id: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofStep {
    pub conclusion: Statement,
    pub id: u32,
    pub rule: String,
    pub deps: Vec<u32>,
}

/// A dataset record: problem, auxiliary clauses, numerically checked facts
/// and the proof.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub problem: Problem,
    pub aux: Vec<PremiseClause>,
    pub numerical_checks: Vec<NumericCheck>,
    pub proof: Vec<ProofStep>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RecordError {
    /// A proof step cites an id that is not defined before it.
    DanglingDependency(u32),
    /// Ids must run 0, 1, 2, ... in record order.
    NonDenseId {
        expected: u32,
        found: u32,
    },
    MissingId(Statement),
}

impl fmt::Display for RecordError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecordError::DanglingDependency(id) => {
                write!(f, "dependency [{id:03}] is not defined before use")
            }
            RecordError::NonDenseId { expected, found } => {
                write!(f, "expected id [{expected:03}], found [{found:03}]")
            }
            RecordError::MissingId(s) => write!(f, "statement `{s}` has no id"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for RecordError {}

impl Record {
    /// Statements of the record in id order, with their ids.
    pub fn statements(&self) -> impl Iterator<Item = (Option<u32>, &Statement)> {
        let premises = self
            .problem
            .premise_statements()
            .map(|p| (p.id, &p.statement));
        let aux = self
            .aux
            .iter()
            .flat_map(|c| c.statements.iter().map(|p| (p.id, &p.statement)));
        let num = self
            .numerical_checks
            .iter()
            .map(|n| (Some(n.id), &n.statement));
        let proof = self.proof.iter().map(|s| (Some(s.id), &s.conclusion));
        premises.chain(aux).chain(num).chain(proof)
    }

    /// Id of the proved goal: the last proof step, or the premise equal to
    /// the goal when the proof is empty.
    pub fn goal_id(&self) -> Option<u32> {
        if let Some(last) = self.proof.last() {
            return Some(last.id);
        }
        let goal = self.problem.goal.canonical();
        self.statements()
            .find(|(_, s)| s.canonical() == goal)
            .and_then(|(id, _)| id)
    }
}

/// Checks dense numbering and that every dependency is defined earlier.
pub fn lint_record(r: &Record) -> Result<(), RecordError> {
    for (next, (id, st)) in (0u32..).zip(r.statements()) {
        let id = id.ok_or_else(|| RecordError::MissingId(st.clone()))?;
        if id != next {
            return Err(RecordError::NonDenseId {
                expected: next,
                found: id,
            });
        }
    }
    for step in &r.proof {
        if let Some(&d) = step.deps.iter().find(|&&d| d >= step.id) {
            return Err(RecordError::DanglingDependency(d));
        }
    }
    Ok(())
}

fn write_statements(out: &mut String, stmts: &[super::Premise]) {
    for p in stmts {
        let _ = write!(out, " {}", p.statement);
        if let Some(id) = p.id {
            let _ = write!(out, " [{id:03}]");
        }
    }
}

/// The `<problem>` and `<aux>` sections alone.
pub fn serialize_request(problem: &Problem, aux: &[PremiseClause]) -> String {
    let mut out = String::new();
    write_request(&mut out, problem, aux);
    out
}

fn write_request(out: &mut String, problem: &Problem, aux: &[PremiseClause]) {
    out.push_str("<problem>\n");
    for (i, c) in problem.clauses.iter().enumerate() {
        out.push_str(&c.points.join(" "));
        out.push_str(" :");
        write_statements(out, &c.statements);
        if i + 1 < problem.clauses.len() {
            out.push_str(" ;");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "? {}", problem.goal);
    out.push_str("</problem>\n<aux>\n");
    for (i, c) in aux.iter().enumerate() {
        let _ = write!(out, "x{i:02} {} :", c.points.join(" "));
        write_statements(out, &c.statements);
        out.push_str(" ;\n");
    }
    out.push_str("</aux>\n");
}

/// Serializes a record into its tagged-section text form.
pub fn serialize_record(r: &Record) -> Result<String, RecordError> {
    lint_record(r)?;
    let mut out = String::new();
    write_request(&mut out, &r.problem, &r.aux);
    out.push_str("<numerical_check>\n");
    for n in &r.numerical_checks {
        let _ = writeln!(out, "{} [{:03}] ;", n.statement, n.id);
    }
    out.push_str("</numerical_check>\n<proof>\n");
    for s in &r.proof {
        let _ = write!(out, "{} [{:03}] {}", s.conclusion, s.id, s.rule);
        for d in &s.deps {
            let _ = write!(out, " [{d:03}]");
        }
        out.push_str(" ;\n");
    }
    out.push_str("</proof>\n");
    Ok(out)
}

const SECTIONS: [&str; 4] = ["problem", "aux", "numerical_check", "proof"];

fn section<'a>(
    text: &'a str,
    from: usize,
    name: &'static str,
) -> Result<(usize, &'a str, usize), ParseError> {
    let open = format!("<{name}>");
    let close = format!("</{name}>");
    let rest = &text[from..];
    let o = rest
        .find(&open)
        .ok_or_else(|| ParseError::new(ParseErrorKind::MissingSection(name), from))?;
    let lead = &rest[..o];
    if let Some(pos) = lead.find(|c: char| !c.is_whitespace()) {
        return Err(ParseError::new(
            ParseErrorKind::UnexpectedToken(lead[pos..].chars().take(16).collect()),
            from + pos,
        ));
    }
    let body_start = from + o + open.len();
    let c = text[body_start..]
        .find(&close)
        .ok_or_else(|| ParseError::new(ParseErrorKind::MissingSection(name), body_start))?;
    let body_end = body_start + c;
    Ok((
        body_start,
        &text[body_start..body_end],
        body_end + close.len(),
    ))
}

fn expect_id(cur: &mut Cursor<'_>) -> Result<u32, ParseError> {
    match cur.next() {
        Some(Token {
            tok: Tok::Id(n), ..
        }) => Ok(n),
        Some(t) => Err(unexpected(t)),
        None => Err(ParseError::new(ParseErrorKind::UnexpectedEnd, cur.offset())),
    }
}

/// Parses one record in tagged-section form.
pub fn parse_record(text: &str) -> Result<Record, ParseError> {
    let mut pos = 0;
    let mut bodies = Vec::new();
    for name in SECTIONS {
        let (start, body, end) = section(text, pos, name)?;
        bodies.push((start, body));
        pos = end;
    }
    if let Some(p) = text[pos..].find(|c: char| !c.is_whitespace()) {
        return Err(ParseError::new(
            ParseErrorKind::UnexpectedToken(text[pos + p..].chars().take(16).collect()),
            pos + p,
        ));
    }

    let (start, body) = bodies[0];
    let mut cur = Cursor::new(tokenize(body, start)?, start + body.len());
    let problem = parse_problem_tokens(&mut cur)?;
    if let Some(t) = cur.next() {
        return Err(unexpected(t));
    }
    let mut declared: BTreeSet<String> = problem.points().map(|p| p.to_string()).collect();

    let (start, body) = bodies[1];
    let mut cur = Cursor::new(tokenize(body, start)?, start + body.len());
    let mut aux = Vec::new();
    while !cur.at_end() {
        let (label, off) = cur.word()?;
        let ok = label.len() > 1
            && label.starts_with('x')
            && label[1..].bytes().all(|b| b.is_ascii_digit());
        if !ok {
            return Err(ParseError::new(
                ParseErrorKind::UnexpectedToken(label.to_string()),
                off,
            ));
        }
        aux.push(parse_clause(&mut cur, &mut declared)?);
        cur.expect(Tok::Semi)?;
    }

    let (start, body) = bodies[2];
    let mut cur = Cursor::new(tokenize(body, start)?, start + body.len());
    let mut numerical_checks = Vec::new();
    while !cur.at_end() {
        let off = cur.offset();
        let statement = parse_statement(&mut cur, |w, o| check_declared(&declared, w, o))?;
        check_no_extra_arg(&cur, &statement, off)?;
        let id = expect_id(&mut cur)?;
        cur.expect(Tok::Semi)?;
        numerical_checks.push(NumericCheck { statement, id });
    }

    let (start, body) = bodies[3];
    let mut cur = Cursor::new(tokenize(body, start)?, start + body.len());
    let mut proof = Vec::new();
    while !cur.at_end() {
        let off = cur.offset();
        let conclusion = parse_statement(&mut cur, |w, o| check_declared(&declared, w, o))?;
        check_no_extra_arg(&cur, &conclusion, off)?;
        let id = expect_id(&mut cur)?;
        let (rule, _) = cur.word()?;
        let mut deps = Vec::new();
        while let Some(Token {
            tok: Tok::Id(d), ..
        }) = cur.peek()
        {
            deps.push(d);
            cur.next();
        }
        cur.expect(Tok::Semi)?;
        proof.push(ProofStep {
            conclusion,
            id,
            rule: rule.to_string(),
            deps,
        });
    }
    Ok(Record {
        problem,
        aux,
        numerical_checks,
        proof,
    })
}

/// Parses a blank-line separated stream of records.
pub fn parse_record_stream(text: &str) -> Result<Vec<Record>, ParseError> {
    let mut out = Vec::new();
    let mut block_start = None;
    let mut offset = 0;
    let flush = |start: usize, end: usize, out: &mut Vec<Record>| -> Result<(), ParseError> {
        let chunk = &text[start..end];
        parse_record(chunk).map(|r| out.push(r)).map_err(|mut e| {
            e.offset += start;
            e
        })
    };
    for line in text.split_inclusive('\n') {
        let blank = line.trim().is_empty();
        match (blank, block_start) {
            (false, None) => block_start = Some(offset),
            (true, Some(s)) => {
                flush(s, offset, &mut out)?;
                block_start = None;
            }
            _ => {}
        }
        offset += line.len();
    }
    if let Some(s) = block_start {
        flush(s, text.len(), &mut out)?;
    }
    Ok(out)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::statement::Predicate;

    pub const FIG2_RECORD: &str = "<problem>
a : ; b : ; c : ; d : coll b c d [000] ;
e : eqangle a d d e d e b d [001] eqangle a b a e a e a d [002] ;
f : coll a b f [003] perp a b f e [004] ;
g : coll b d g [005] perp b d g e [006]
? cong f e g e
</problem>
<aux>
x00 h : coll a d h [007] perp a d h e [008] ;
</aux>
<numerical_check>
sameclock a f e a e h [009] ;
sameclock d h e d e g [010] ;
</numerical_check>
<proof>
eqangle a f f e h e a h [011] a01 [003] [007] [004] [008] ;
eqangle a e f e h e a e [012] a01 [002] [004] [008] ;
simtrir a f e a h e [013] r35 [011] [012] [009] ;
eqratio a e a e f e h e [014] r53 [013] ;
eqangle d h h e g e d g [015] a01 [007] [000] [005] [008] [006] ;
eqangle d e h e g e d e [016] a01 [001] [008] [006] ;
simtrir d h e d g e [017] r35 [015] [016] [010] ;
eqratio d e d e h e g e [018] r53 [017] ;
cong f e g e [019] a00 [014] [018] ;
</proof>
";

    fn squash(s: &str) -> String {
        s.split_whitespace().collect::<Vec<_>>().join(" ")
    }

    #[test]
    fn figure2_round_trip_modulo_wrapping() {
        let r = parse_record(FIG2_RECORD).unwrap();
        assert_eq!(r.aux.len(), 1);
        assert_eq!(r.numerical_checks.len(), 2);
        assert_eq!(r.proof.len(), 9);
        assert_eq!(r.goal_id(), Some(19));
        let text = serialize_record(&r).unwrap();
        assert_eq!(squash(&text), squash(FIG2_RECORD));
        assert_eq!(parse_record(&text).unwrap(), r);
        assert_eq!(
            serialize_record(&parse_record(&text).unwrap()).unwrap(),
            text
        );
    }

    #[test]
    fn empty_sections_are_emitted() {
        let problem =
            super::super::parse_problem("a : ; b : cong a b a b [000] ? cong a b a b").unwrap();
        let r = Record {
            problem,
            aux: Vec::new(),
            numerical_checks: Vec::new(),
            proof: Vec::new(),
        };
        let text = serialize_record(&r).unwrap();
        assert!(text.contains("<aux>\n</aux>"));
        assert!(text.contains("<numerical_check>\n</numerical_check>"));
        assert_eq!(parse_record(&text).unwrap(), r);
    }

    #[test]
    fn dangling_dependency() {
        let mut r = parse_record(FIG2_RECORD).unwrap();
        r.proof[0].deps[0] = 999;
        assert_eq!(
            serialize_record(&r),
            Err(RecordError::DanglingDependency(999))
        );
    }

    #[test]
    fn stream_of_two() {
        let text = format!("{FIG2_RECORD}\n{FIG2_RECORD}");
        let rs = parse_record_stream(&text).unwrap();
        assert_eq!(rs.len(), 2);
        assert_eq!(
            rs[1].proof[8].conclusion,
            Statement::from_strs(Predicate::Cong, &["f", "e", "g", "e"])
        );
    }

    #[test]
    fn missing_section() {
        let e = parse_record("<problem>\na : ? cong a a a a\n</problem>").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::MissingSection("aux"));
        assert!(parse_record("").is_err());
    }
}
