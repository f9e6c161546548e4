//! Built-in expressions such as `list(Z2)` or `std_alg(3)`.

use std::fmt;

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Num(u64),
    Name(String),
    Call(String, Vec<Expr>),
    List(Vec<Expr>),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(n) => write!(f, "{n}"),
            Expr::Name(s) => write!(f, "{s}"),
            Expr::Call(h, args) => {
                write!(f, "{h}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            Expr::List(items) => {
                write!(f, "[")?;
                for (i, a) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, "]")
            }
        }
    }
}

impl Expr {
    /// Parses `src`; error columns are offset by `col0` on line `line`.
    pub fn parse_at(src: &str, line: usize, col0: usize) -> Result<Expr, CliError> {
        let mut p = P { s: src.as_bytes(), i: 0, line, col0 };
        let e = p.expr()?;
        p.ws();
        if p.i != p.s.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(e)
    }

    pub fn parse(src: &str) -> Result<Expr, CliError> {
        Expr::parse_at(src, 1, 1)
    }

    pub fn as_num(&self) -> Option<usize> {
        match self {
            Expr::Num(n) => Some(*n as usize),
            _ => None,
        }
    }
}

struct P<'a> {
    s: &'a [u8],
    i: usize,
    line: usize,
    col0: usize,
}

impl P<'_> {
    fn err(&self, msg: &str) -> CliError {
        CliError::Parse { line: self.line, column: self.col0 + self.i, message: msg.to_string() }
    }

    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.i).copied()
    }

    fn args(&mut self, close: u8) -> Result<Vec<Expr>, CliError> {
        let mut out = Vec::new();
        if self.peek() == Some(close) {
            self.i += 1;
            return Ok(out);
        }
        loop {
            out.push(self.expr()?);
            match self.peek() {
                Some(b',') => self.i += 1,
                Some(c) if c == close => {
                    self.i += 1;
                    return Ok(out);
                }
                _ => return Err(self.err(&format!("expected ',' or '{}'", close as char))),
            }
        }
    }

    fn expr(&mut self) -> Result<Expr, CliError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let start = self.i;
                while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                    self.i += 1;
                }
                let t = std::str::from_utf8(&self.s[start..self.i]).expect("ascii");
                t.parse().map(Expr::Num).map_err(|_| self.err("number out of range"))
            }
            Some(b'[') => {
                self.i += 1;
                Ok(Expr::List(self.args(b']')?))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.i;
                while self.i < self.s.len() && (self.s[self.i].is_ascii_alphanumeric() || b"_'.".contains(&self.s[self.i])) {
                    self.i += 1;
                }
                let name = String::from_utf8_lossy(&self.s[start..self.i]).into_owned();
                if self.s.get(self.i) == Some(&b'(') {
                    self.i += 1;
                    Ok(Expr::Call(name, self.args(b')')?))
                } else {
                    Ok(Expr::Name(name))
                }
            }
            None => Err(self.err("unexpected end of input")),
            Some(_) => Err(self.err("expected a name, number or list")),
        }
    }
}
