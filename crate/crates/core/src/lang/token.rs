use alloc::string::ToString;
use alloc::vec::Vec;

use super::{ParseError, ParseErrorKind};
use crate::statement::{Predicate, Rational, Statement};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Tok<'a> {
    Word(&'a str),
    Semi,
    Colon,
    Question,
    Comma,
    Arrow,
    Equals,
    Id(u32),
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Token<'a> {
    pub tok: Tok<'a>,
    pub offset: usize,
}

fn is_sep(c: char) -> bool {
    c.is_whitespace() || matches!(c, ';' | ':' | '?' | ',' | '[' | ']' | '=')
}

/// Splits `text` into tokens; offsets are shifted by `base`.
pub(crate) fn tokenize(text: &str, base: usize) -> Result<Vec<Token<'_>>, ParseError> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < text.len() {
        let c = text[i..].chars().next().unwrap_or(' ');
        let off = base + i;
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        let simple = match c {
            ';' => Some(Tok::Semi),
            ':' => Some(Tok::Colon),
            '?' => Some(Tok::Question),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(t) = simple {
            out.push(Token {
                tok: t,
                offset: off,
            });
            i += 1;
            continue;
        }
        if c == '=' {
            if bytes.get(i + 1) == Some(&b'>') {
                out.push(Token {
                    tok: Tok::Arrow,
                    offset: off,
                });
                i += 2;
            } else {
                out.push(Token {
                    tok: Tok::Equals,
                    offset: off,
                });
                i += 1;
            }
            continue;
        }
        if c == '[' {
            let close = text[i..].find(']').ok_or_else(|| {
                ParseError::new(
                    ParseErrorKind::BadId(text[i..].chars().take(8).collect()),
                    off,
                )
            })?;
            let inner = &text[i + 1..i + close];
            if inner.is_empty() || !inner.bytes().all(|b| b.is_ascii_digit()) {
                return Err(ParseError::new(
                    ParseErrorKind::BadId(inner.to_string()),
                    off,
                ));
            }
            let id: u32 = inner
                .parse()
                .map_err(|_| ParseError::new(ParseErrorKind::BadId(inner.to_string()), off))?;
            out.push(Token {
                tok: Tok::Id(id),
                offset: off,
            });
            i += close + 1;
            continue;
        }
        if c == ']' {
            return Err(ParseError::new(
                ParseErrorKind::UnexpectedToken("]".to_string()),
                off,
            ));
        }
        let start = i;
        while i < text.len() {
            let ch = text[i..].chars().next().unwrap_or(' ');
            if is_sep(ch) {
                break;
            }
            i += ch.len_utf8();
        }
        out.push(Token {
            tok: Tok::Word(&text[start..i]),
            offset: off,
        });
    }
    Ok(out)
}

pub(crate) struct Cursor<'a> {
    toks: Vec<Token<'a>>,
    pos: usize,
    end: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(toks: Vec<Token<'a>>, end: usize) -> Self {
        Cursor { toks, pos: 0, end }
    }

    pub fn peek(&self) -> Option<Token<'a>> {
        self.toks.get(self.pos).copied()
    }

    pub fn next(&mut self) -> Option<Token<'a>> {
        let t = self.peek();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    /// Offset of the next token, or of the end of input.
    pub fn offset(&self) -> usize {
        self.peek().map_or(self.end, |t| t.offset)
    }

    pub fn eat(&mut self, tok: Tok<'_>) -> bool {
        if self.peek().map(|t| t.tok) == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: Tok<'_>) -> Result<(), ParseError> {
        match self.next() {
            Some(t) if t.tok == tok => Ok(()),
            Some(t) => Err(unexpected(t)),
            None => Err(ParseError::new(ParseErrorKind::UnexpectedEnd, self.end)),
        }
    }

    pub fn word(&mut self) -> Result<(&'a str, usize), ParseError> {
        match self.next() {
            Some(Token {
                tok: Tok::Word(w),
                offset,
            }) => Ok((w, offset)),
            Some(t) => Err(unexpected(t)),
            None => Err(ParseError::new(ParseErrorKind::UnexpectedEnd, self.end)),
        }
    }
}

pub(crate) fn unexpected(t: Token<'_>) -> ParseError {
    let text = match t.tok {
        Tok::Word(w) => w.to_string(),
        Tok::Semi => ";".to_string(),
        Tok::Colon => ":".to_string(),
        Tok::Question => "?".to_string(),
        Tok::Comma => ",".to_string(),
        Tok::Arrow => "=>".to_string(),
        Tok::Equals => "=".to_string(),
        Tok::Id(id) => alloc::format!("[{id:03}]"),
    };
    ParseError::new(ParseErrorKind::UnexpectedToken(text), t.offset)
}

pub(crate) fn is_point_name(w: &str) -> bool {
    let mut chars = w.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() => {}
        _ => return false,
    }
    Predicate::from_name(w).is_none()
        && w.chars()
            .all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

pub(crate) fn parse_rational(w: &str) -> Option<Rational> {
    let (n, d) = match w.split_once('/') {
        Some((n, d)) => (n.parse::<i64>().ok()?, d.parse::<i64>().ok()?),
        None => (w.parse::<i64>().ok()?, 1),
    };
    if d == 0 {
        return None;
    }
    Some(Rational::new(n, d))
}

/// Parses one statement starting at a predicate word. Argument tokens are
/// accepted by `accept_arg`, which may reject them with its own error.
pub(crate) fn parse_statement<'a>(
    cur: &mut Cursor<'a>,
    mut accept_arg: impl FnMut(&'a str, usize) -> Result<(), ParseError>,
) -> Result<Statement, ParseError> {
    let (name, off) = cur.word()?;
    let predicate = Predicate::from_name(name)
        .ok_or_else(|| ParseError::new(ParseErrorKind::UnknownPredicate(name.to_string()), off))?;
    let arity = predicate.arity();
    let mut args = Vec::with_capacity(arity);
    while args.len() < arity {
        match cur.peek() {
            Some(Token {
                tok: Tok::Word(w),
                offset,
            }) if Predicate::from_name(w).is_none() => {
                if predicate.has_literal() && parse_rational(w).is_some() {
                    break;
                }
                accept_arg(w, offset)?;
                args.push(w.to_string());
                cur.next();
            }
            _ => break,
        }
    }
    if args.len() < arity {
        return Err(ParseError::new(
            ParseErrorKind::ArityMismatch {
                predicate,
                expected: arity,
                found: args.len(),
            },
            off,
        ));
    }
    let mut st = Statement::new(predicate, args);
    if predicate.has_literal() {
        let (w, loff) = cur.word()?;
        let lit = parse_rational(w)
            .ok_or_else(|| ParseError::new(ParseErrorKind::BadLiteral(w.to_string()), loff))?;
        st.literal = Some(lit);
    }
    Ok(st)
}

/// Error for a bare point name directly after a complete statement.
pub(crate) fn check_no_extra_arg(
    cur: &Cursor<'_>,
    st: &Statement,
    off: usize,
) -> Result<(), ParseError> {
    if let Some(Token {
        tok: Tok::Word(w), ..
    }) = cur.peek()
    {
        if is_point_name(w) {
            let arity = st.predicate.arity();
            return Err(ParseError::new(
                ParseErrorKind::ArityMismatch {
                    predicate: st.predicate,
                    expected: arity,
                    found: arity + 1,
                },
                off,
            ));
        }
    }
    Ok(())
}
