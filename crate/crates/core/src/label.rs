//! Structured labels: the atoms every carrier is built from.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A structural label.
///
/// The derived order is the canonical order: variant first, then fields
/// lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    /// The point of the one-element set, written `*`.
    Unit,
    /// A natural-number symbol, ordered numerically.
    Nat(u64),
    /// A named symbol.
    Sym(Arc<str>),
    /// An ordered pair, written `(a, b)`.
    Pair(Box<Label>, Box<Label>),
    /// A tagged label, written `tag(x)`.
    Tagged(Arc<str>, Box<Label>),
    /// A tuple, written `[a, b, c]`.
    Tuple(Vec<Label>),
}

impl Label {
    pub fn sym(s: &str) -> Label {
        Label::Sym(Arc::from(s))
    }

    pub fn nat(n: u64) -> Label {
        Label::Nat(n)
    }

    pub fn pair(a: Label, b: Label) -> Label {
        Label::Pair(Box::new(a), Box::new(b))
    }

    pub fn tagged(tag: &str, x: Label) -> Label {
        Label::Tagged(Arc::from(tag), Box::new(x))
    }

    pub fn tuple(items: Vec<Label>) -> Label {
        Label::Tuple(items)
    }

    /// Components of a pair label.
    pub fn as_pair(&self) -> Option<(&Label, &Label)> {
        match self {
            Label::Pair(a, b) => Some((a, b)),
            _ => None,
        }
    }

    /// Items of a tuple label.
    pub fn as_tuple(&self) -> Option<&[Label]> {
        match self {
            Label::Tuple(v) => Some(v),
            _ => None,
        }
    }

    /// Parses the textual form produced by `Display`.
    pub fn parse(s: &str) -> Result<Label> {
        let mut p = Parser { src: s.as_bytes(), pos: 0 };
        let l = p.label()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("trailing input"));
        }
        Ok(l)
    }
}

fn is_ident_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_'
}

fn is_ident_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_' || c == b'\'' || c == b'.'
}

fn write_sym(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    let bytes = s.as_bytes();
    let plain = !bytes.is_empty() && is_ident_start(bytes[0]) && bytes.iter().all(|&c| is_ident_char(c));
    if plain {
        write!(f, "{s}")
    } else {
        write!(f, "\"")?;
        for ch in s.chars() {
            match ch {
                '"' => write!(f, "\\\"")?,
                '\\' => write!(f, "\\\\")?,
                c => write!(f, "{c}")?,
            }
        }
        write!(f, "\"")
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Unit => write!(f, "*"),
            Label::Nat(n) => write!(f, "{n}"),
            Label::Sym(s) => write_sym(f, s),
            Label::Pair(a, b) => write!(f, "({a}, {b})"),
            Label::Tagged(t, x) => {
                write_sym(f, t)?;
                write!(f, "({x})")
            }
            Label::Tuple(items) => {
                write!(f, "[")?;
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "]")
            }
        }
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse { line: 1, column: self.pos + 1, message: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn symbol(&mut self) -> Result<String> {
        match self.peek() {
            Some(b'"') => {
                self.pos += 1;
                let mut out = String::new();
                loop {
                    let Some(&c) = self.src.get(self.pos) else {
                        return Err(self.error("unterminated string"));
                    };
                    self.pos += 1;
                    match c {
                        b'"' => break,
                        b'\\' => {
                            let Some(&e) = self.src.get(self.pos) else {
                                return Err(self.error("unterminated escape"));
                            };
                            self.pos += 1;
                            out.push(e as char);
                        }
                        _ => {
                            // Re-decode multi-byte characters from the source slice.
                            let start = self.pos - 1;
                            let width = utf8_width(c);
                            let end = (start + width).min(self.src.len());
                            out.push_str(std::str::from_utf8(&self.src[start..end]).map_err(|_| self.error("invalid utf-8"))?);
                            self.pos = end;
                        }
                    }
                }
                Ok(out)
            }
            Some(c) if is_ident_start(c) => {
                let start = self.pos;
                while self.pos < self.src.len() && is_ident_char(self.src[self.pos]) {
                    self.pos += 1;
                }
                Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
            }
            _ => Err(self.error("expected a label")),
        }
    }

    fn label(&mut self) -> Result<Label> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'*') => {
                self.pos += 1;
                Ok(Label::Unit)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("0");
                text.parse::<u64>().map(Label::Nat).map_err(|_| self.error("number out of range"))
            }
            Some(b'(') => {
                self.pos += 1;
                let a = self.label()?;
                self.expect(b',')?;
                let b = self.label()?;
                self.expect(b')')?;
                Ok(Label::pair(a, b))
            }
            Some(b'[') => {
                self.pos += 1;
                let mut items = Vec::new();
                if self.peek() == Some(b']') {
                    self.pos += 1;
                    return Ok(Label::Tuple(items));
                }
                loop {
                    items.push(self.label()?);
                    match self.peek() {
                        Some(b',') => self.pos += 1,
                        Some(b']') => {
                            self.pos += 1;
                            return Ok(Label::Tuple(items));
                        }
                        _ => return Err(self.error("expected ',' or ']'")),
                    }
                }
            }
            Some(_) => {
                let name = self.symbol()?;
                // A tag is a symbol immediately followed by '('.
                if self.src.get(self.pos) == Some(&b'(') {
                    self.pos += 1;
                    let x = self.label()?;
                    self.expect(b')')?;
                    Ok(Label::tagged(&name, x))
                } else {
                    Ok(Label::sym(&name))
                }
            }
        }
    }
}

fn utf8_width(first: u8) -> usize {
    match first {
        0x00..=0x7f => 1,
        0xc0..=0xdf => 2,
        0xe0..=0xef => 3,
        _ => 4,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_parse_round_trip() {
        let samples = vec![
            Label::Unit,
            Label::nat(12),
            Label::sym("Succ"),
            Label::sym("needs quoting"),
            Label::pair(Label::nat(0), Label::sym("x")),
            Label::tagged("cons", Label::nat(1)),
            Label::tuple(vec![]),
            Label::tuple(vec![Label::nat(1), Label::pair(Label::Unit, Label::tuple(vec![Label::nat(0)]))]),
        ];
        for l in samples {
            let text = l.to_string();
            assert_eq!(Label::parse(&text).unwrap(), l, "{text}");
        }
    }

    #[test]
    fn canonical_order_is_numeric_for_nats() {
        assert!(Label::nat(2) < Label::nat(10));
        assert!(Label::Unit < Label::nat(0));
        assert!(Label::nat(99) < Label::sym("a"));
    }

    #[test]
    fn parse_reports_column() {
        match Label::parse("(1, ") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 5),
            other => panic!("unexpected {other:?}"),
        }
    }
}
