use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::token::{tokenize, unexpected, Cursor, Tok, Token};
use super::{ParseError, ParseErrorKind};
use crate::catalog::{Catalog, Category};

/// One applied construction: `outs = name outs... args...`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Construction {
    pub name: String,
    pub outs: Vec<String>,
    pub args: Vec<String>,
    pub category: Category,
}

impl Construction {
    /// Formats as one script item, without the `outs =` prefix.
    pub fn item(&self) -> String {
        let mut s = self.name.clone();
        for p in self.outs.iter().chain(&self.args) {
            s.push(' ');
            s.push_str(p);
        }
        s
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.outs.join(" "), self.item())
    }
}

/// Formats constructions as script lines, merging consecutive INTERSECT
/// items that share their output.
pub fn format_script(script: &[Construction]) -> String {
    let mut out = String::new();
    let mut i = 0;
    while i < script.len() {
        let c = &script[i];
        out.push_str(&c.outs.join(" "));
        out.push_str(" = ");
        out.push_str(&c.item());
        if c.category == Category::Intersect {
            if let Some(n) = script.get(i + 1) {
                if n.category == Category::Intersect && n.outs == c.outs {
                    out.push_str(", ");
                    out.push_str(&n.item());
                    i += 1;
                }
            }
        }
        out.push('\n');
        i += 1;
    }
    out
}

/// Parses a single script line (possibly with `,`-separated items).
pub(crate) fn parse_script_line(
    cur: &mut Cursor<'_>,
    catalog: &Catalog,
) -> Result<Vec<Construction>, ParseError> {
    let mut outs: Vec<String> = Vec::new();
    loop {
        match cur.next() {
            Some(Token {
                tok: Tok::Word(w), ..
            }) => outs.push(w.to_string()),
            Some(Token {
                tok: Tok::Equals,
                offset,
            }) => {
                if outs.is_empty() {
                    return Err(ParseError::new(
                        ParseErrorKind::UnexpectedToken("=".to_string()),
                        offset,
                    ));
                }
                break;
            }
            Some(t) => return Err(unexpected(t)),
            None => return Err(ParseError::new(ParseErrorKind::UnexpectedEnd, cur.offset())),
        }
    }
    let mut items = Vec::new();
    loop {
        let (name, off) = cur.word()?;
        let def = catalog.get(name).ok_or_else(|| {
            ParseError::new(ParseErrorKind::UnknownConstruction(name.to_string()), off)
        })?;
        let mut vars = Vec::new();
        while let Some(Token {
            tok: Tok::Word(w), ..
        }) = cur.peek()
        {
            vars.push(w.to_string());
            cur.next();
        }
        let expected = def.out_arity() + def.in_arity();
        if vars.len() != expected {
            return Err(ParseError::new(
                ParseErrorKind::WrongArgCount {
                    construction: name.to_string(),
                    expected,
                    found: vars.len(),
                },
                off,
            ));
        }
        let args = vars.split_off(def.out_arity());
        if vars != outs {
            return Err(ParseError::new(
                ParseErrorKind::UnexpectedToken(vars.join(" ")),
                off,
            ));
        }
        items.push(Construction {
            name: name.to_string(),
            outs: vars,
            args,
            category: def.category,
        });
        if !cur.eat(Tok::Comma) {
            break;
        }
    }
    Ok(items)
}

/// Parses a construction script, one `outs = construction ...` per line.
pub fn parse_construction_script(
    text: &str,
    catalog: &Catalog,
) -> Result<Vec<Construction>, ParseError> {
    let mut out = Vec::new();
    for (start, body) in super::content_lines(text) {
        if body.trim().is_empty() {
            continue;
        }
        let toks = tokenize(body, start)?;
        let mut cur = Cursor::new(toks, start + body.len());
        out.extend(parse_script_line(&mut cur, catalog)?);
        if let Some(t) = cur.next() {
            return Err(unexpected(t));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn orthocenter_line() {
        let cat = Catalog::default_catalog();
        let s = parse_construction_script("x = orthocenter x a b c", &cat).unwrap();
        assert_eq!(
            s,
            vec![Construction {
                name: "orthocenter".into(),
                outs: vec!["x".into()],
                args: vec!["a".into(), "b".into(), "c".into()],
                category: Category::Others,
            }]
        );
    }

    #[test]
    fn triangle_line() {
        let cat = Catalog::default_catalog();
        let s = parse_construction_script("a b c = triangle a b c", &cat).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].category, Category::Basic);
        assert_eq!(s[0].outs.len(), 3);
    }

    #[test]
    fn wrong_arg_count() {
        let cat = Catalog::default_catalog();
        let e = parse_construction_script("x = orthocenter x a b", &cat).unwrap_err();
        assert!(matches!(
            e.kind,
            ParseErrorKind::WrongArgCount {
                expected: 4,
                found: 3,
                ..
            }
        ));
        let e = parse_construction_script("x = nonsense x a", &cat).unwrap_err();
        assert_eq!(
            e.kind,
            ParseErrorKind::UnknownConstruction("nonsense".into())
        );
    }

    #[test]
    fn intersect_pair_round_trip() {
        let cat = Catalog::default_catalog();
        let text = "a b c = triangle a b c\nx = on_line x a b, on_circle x c a\n";
        let s = parse_construction_script(text, &cat).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(format_script(&s), text);
    }
}
