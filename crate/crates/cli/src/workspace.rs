//! The workspace text format: named monoids, functors, algebras,
//! coalgebras and measurings, plus a list of commands.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use polymeasure::measuring::Measuring;
use polymeasure::{Algebra, Carrier, Coalgebra, Functor, Label, PolyFunctor, PositionMonoid};

use crate::error::CliError;
use crate::expr::Expr;
use crate::resolve;

#[derive(Clone, Default)]
pub struct Workspace {
    pub monoids: BTreeMap<String, PositionMonoid>,
    pub functors: BTreeMap<String, Functor>,
    pub algebras: BTreeMap<String, Algebra>,
    pub coalgebras: BTreeMap<String, Coalgebra>,
    pub measurings: BTreeMap<String, Measuring>,
    /// Command lines with their line numbers.
    pub commands: Vec<(usize, String)>,
}

/// A body line: line number, column of the first character, trimmed text.
struct Line<'a> {
    no: usize,
    col: usize,
    text: &'a str,
}

fn strip_comment(s: &str) -> &str {
    let mut in_str = false;
    for (i, c) in s.char_indices() {
        match c {
            '"' => in_str = !in_str,
            '#' if !in_str => return &s[..i],
            _ => {}
        }
    }
    s
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> CliError {
    CliError::Parse { line, column, message: message.into() }
}

/// Splits at the first top-level occurrence of `sep`.
fn split_top<'a>(s: &'a str, sep: &str) -> Option<(&'a str, &'a str, usize)> {
    let bytes = s.as_bytes();
    let mut depth = 0i32;
    let mut in_str = false;
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if in_str {
            if c == b'\\' {
                i += 1;
            } else if c == b'"' {
                in_str = false;
            }
        } else {
            match c {
                b'"' => in_str = true,
                b'(' | b'[' => depth += 1,
                b')' | b']' => depth -= 1,
                _ if depth == 0 && s[i..].starts_with(sep) => return Some((&s[..i], &s[i + sep.len()..], i + sep.len())),
                _ => {}
            }
        }
        i += 1;
    }
    None
}

fn label_at(text: &str, line: usize, col: usize) -> Result<Label, CliError> {
    let trimmed = text.trim_start();
    let lead = text.len() - trimmed.len();
    Label::parse(trimmed.trim_end()).map_err(|e| CliError::relocate(e, line, col + lead))
}

fn expr_at(text: &str, line: usize, col: usize) -> Result<Expr, CliError> {
    let trimmed = text.trim_start();
    let lead = text.len() - trimmed.len();
    Expr::parse_at(trimmed.trim_end(), line, col + lead)
}

/// `lhs -> rhs` as two labels.
fn arrow(l: &Line) -> Result<(Label, Label), CliError> {
    let Some((lhs, rhs, off)) = split_top(l.text, "->") else {
        // Unbalanced brackets hide the arrow; the label parser locates them.
        let lhs = l.text.split("->").next().unwrap_or(l.text);
        label_at(lhs, l.no, l.col)?;
        return Err(parse_err(l.no, l.col, "expected 'lhs -> rhs'"));
    };
    Ok((label_at(lhs, l.no, l.col)?, label_at(rhs, l.no, l.col + off)?))
}

/// `keyword rest`.
fn keyword<'a>(l: &'a Line<'a>) -> (&'a str, &'a str, usize) {
    match l.text.find(char::is_whitespace) {
        Some(i) => (&l.text[..i], l.text[i..].trim_start(), l.text.len() - l.text[i..].trim_start().len()),
        None => (l.text, "", l.text.len()),
    }
}

fn tuple(l: &Label, line: usize, col: usize) -> Result<Vec<Label>, CliError> {
    l.as_tuple().map(<[Label]>::to_vec).ok_or_else(|| parse_err(line, col, format!("expected a list, found {l}")))
}

fn core_at(e: polymeasure::Error, line: usize, col: usize) -> CliError {
    parse_err(line, col, e.to_string())
}

impl Workspace {
    pub fn parse(src: &str) -> Result<Workspace, CliError> {
        let mut ws = Workspace::default();
        let lines: Vec<&str> = src.lines().collect();
        let mut i = 0;
        while i < lines.len() {
            let raw = strip_comment(lines[i]);
            let no = i + 1;
            i += 1;
            let text = raw.trim();
            if text.is_empty() {
                continue;
            }
            let col = raw.len() - raw.trim_start().len() + 1;
            let block = text.ends_with('{');
            let head = if block { text[..text.len() - 1].trim_end() } else { text };
            let mut body = Vec::new();
            if block {
                let mut closed = false;
                while i < lines.len() {
                    let r = strip_comment(lines[i]);
                    i += 1;
                    let t = r.trim();
                    if t == "}" {
                        closed = true;
                        break;
                    }
                    if !t.is_empty() {
                        body.push(Line { no: i, col: r.len() - r.trim_start().len() + 1, text: t });
                    }
                }
                if !closed {
                    return Err(parse_err(no, col, "block is not closed with '}'"));
                }
            }
            let hl = Line { no, col, text: head };
            let (kw, rest, off) = keyword(&hl);
            let rest_col = col + off;
            match kw {
                "monoid" if block => {
                    let m = parse_monoid(rest, &body, no, col)?;
                    ws.monoids.insert(rest.to_string(), m);
                }
                "functor" => {
                    if block {
                        let f = parse_functor(&ws, rest, &body, no, col)?;
                        ws.functors.insert(rest.to_string(), f);
                    } else {
                        let (name, e, eoff) =
                            split_top(rest, "=").ok_or_else(|| parse_err(no, rest_col, "expected 'functor NAME = EXPR'"))?;
                        let ex = expr_at(e, no, rest_col + eoff)?;
                        let f = resolve::functor(&ws, &ex).map_err(|e| relocate(e, no, rest_col + eoff))?;
                        ws.functors.insert(name.trim().to_string(), f);
                    }
                }
                "algebra" | "coalgebra" => {
                    let (name, tail, toff) =
                        split_top(rest, ":").ok_or_else(|| parse_err(no, rest_col, format!("expected '{kw} NAME : FUNCTOR'")))?;
                    let name = name.trim().to_string();
                    let tcol = rest_col + toff;
                    let (fx, def) = match split_top(tail, "=") {
                        Some((fx, d, doff)) if !block => (fx, Some((d, tcol + doff))),
                        _ => (tail, None),
                    };
                    let f = resolve::functor(&ws, &expr_at(fx, no, tcol)?).map_err(|e| relocate(e, no, tcol))?;
                    match (kw, def) {
                        ("algebra", Some((d, dcol))) => {
                            let a = resolve::algebra(&ws, &expr_at(d, no, dcol)?, Some(&f)).map_err(|e| relocate(e, no, dcol))?;
                            check_functor(&f, a.functor(), no, dcol)?;
                            ws.algebras.insert(name, a);
                        }
                        ("coalgebra", Some((d, dcol))) => {
                            let c = resolve::coalgebra(&ws, &expr_at(d, no, dcol)?, Some(&f)).map_err(|e| relocate(e, no, dcol))?;
                            check_functor(&f, c.functor(), no, dcol)?;
                            ws.coalgebras.insert(name, c);
                        }
                        ("algebra", None) if block => {
                            let a = parse_algebra(&f, &body, no, col)?;
                            ws.algebras.insert(name, a);
                        }
                        ("coalgebra", None) if block => {
                            let c = parse_coalgebra(&f, &body, no, col)?;
                            ws.coalgebras.insert(name, c);
                        }
                        _ => return Err(parse_err(no, col, format!("{kw} needs '= EXPR' or a block"))),
                    }
                }
                "measuring" if block => {
                    let (name, sig, soff) =
                        split_top(rest, ":").ok_or_else(|| parse_err(no, rest_col, "expected 'measuring NAME : C, A -> B'"))?;
                    let scol = rest_col + soff;
                    let (ca, b, boff) = split_top(sig, "->").ok_or_else(|| parse_err(no, scol, "expected 'C, A -> B'"))?;
                    let (c, a, aoff) = split_top(ca, ",").ok_or_else(|| parse_err(no, scol, "expected 'C, A -> B'"))?;
                    let a = resolve::algebra(&ws, &expr_at(a, no, scol + aoff)?, None).map_err(|e| relocate(e, no, scol + aoff))?;
                    let b = resolve::algebra(&ws, &expr_at(b, no, scol + boff)?, Some(a.functor()))
                        .map_err(|e| relocate(e, no, scol + boff))?;
                    let c = resolve::coalgebra(&ws, &expr_at(c, no, scol)?, Some(a.functor())).map_err(|e| relocate(e, no, scol))?;
                    let m = parse_measuring(&c, &a, &b, &body, no, col)?;
                    ws.measurings.insert(name.trim().to_string(), m);
                }
                "commands" if block && rest.is_empty() => {
                    ws.commands.extend(body.iter().map(|l| (l.no, l.text.to_string())));
                }
                _ => return Err(parse_err(no, col, format!("unknown definition '{}'", head))),
            }
        }
        Ok(ws)
    }
}

fn relocate(e: CliError, line: usize, col: usize) -> CliError {
    match e {
        CliError::Parse { .. } => e,
        other => parse_err(line, col, other.to_string()),
    }
}

fn check_functor(want: &Functor, got: &Functor, line: usize, col: usize) -> Result<(), CliError> {
    if PolyFunctor::same(want, got) {
        Ok(())
    } else {
        Err(parse_err(line, col, format!("object is over {}, declared over {}", got.name(), want.name())))
    }
}

fn products(
    carrier: &Carrier,
    unit: usize,
    given: &BTreeMap<(usize, usize), usize>,
    line: usize,
    col: usize,
) -> Result<Vec<usize>, CliError> {
    let n = carrier.len();
    let mut table = vec![0; n * n];
    for a in 0..n {
        for b in 0..n {
            table[a * n + b] = if a == unit {
                b
            } else if b == unit {
                a
            } else if let Some(&v) = given.get(&(a, b)).or_else(|| given.get(&(b, a))) {
                v
            } else {
                return Err(parse_err(line, col, format!("product ({}, {}) is not given", carrier.label(a), carrier.label(b))));
            };
        }
    }
    Ok(table)
}

struct MonoidParts {
    carrier: Option<Carrier>,
    unit: Option<usize>,
    given: BTreeMap<(usize, usize), usize>,
}

impl MonoidParts {
    fn accept(&mut self, l: &Line, kw: &str, rest: &str, off: usize) -> Result<bool, CliError> {
        match kw {
            "elements" | "positions" => {
                let items = tuple(&label_at(rest, l.no, l.col + off)?, l.no, l.col + off)?;
                let c = Carrier::new(items).map_err(|e| core_at(e, l.no, l.col + off))?;
                self.carrier = Some(c);
            }
            "unit" => {
                let c = self.carrier.as_ref().ok_or_else(|| parse_err(l.no, l.col, "elements must come first"))?;
                let u = c.require(&label_at(rest, l.no, l.col + off)?).map_err(|e| core_at(e, l.no, l.col + off))?;
                self.unit = Some(u);
            }
            "mul" => {
                let c = self.carrier.as_ref().ok_or_else(|| parse_err(l.no, l.col, "elements must come first"))?;
                let inner = Line { no: l.no, col: l.col + off, text: rest };
                let (lhs, rhs) = arrow(&inner)?;
                let (x, y) = lhs.as_pair().ok_or_else(|| parse_err(l.no, l.col + off, "expected (x, y) -> z"))?;
                let get = |lab: &Label| c.require(lab).map_err(|e| core_at(e, l.no, l.col + off));
                self.given.insert((get(x)?, get(y)?), get(&rhs)?);
            }
            _ => return Ok(false),
        }
        Ok(true)
    }

    fn finish(self, line: usize, col: usize) -> Result<PositionMonoid, CliError> {
        let carrier = self.carrier.ok_or_else(|| parse_err(line, col, "missing elements"))?;
        let unit = self.unit.ok_or_else(|| parse_err(line, col, "missing unit"))?;
        let table = products(&carrier, unit, &self.given, line, col)?;
        PositionMonoid::new(carrier, table, unit).map_err(|e| core_at(e, line, col))
    }
}

fn parse_monoid(_name: &str, body: &[Line], line: usize, col: usize) -> Result<PositionMonoid, CliError> {
    let mut parts = MonoidParts { carrier: None, unit: None, given: BTreeMap::new() };
    for l in body {
        let (kw, rest, off) = keyword(l);
        if !parts.accept(l, kw, rest, off)? {
            return Err(parse_err(l.no, l.col, format!("unknown monoid entry '{kw}'")));
        }
    }
    parts.finish(line, col)
}

fn parse_functor(ws: &Workspace, name: &str, body: &[Line], line: usize, col: usize) -> Result<Functor, CliError> {
    let mut parts = MonoidParts { carrier: None, unit: None, given: BTreeMap::new() };
    let mut monoid: Option<PositionMonoid> = None;
    let mut display = name.to_string();
    let mut fibers: BTreeMap<usize, (Carrier, usize)> = BTreeMap::new();
    let mut zips: BTreeMap<(usize, usize), (Vec<(Label, Label, Label)>, usize, usize)> = BTreeMap::new();
    let mut deferred = Vec::new();
    for l in body {
        let (kw, rest, off) = keyword(l);
        match kw {
            "name" => {
                display = match label_at(rest, l.no, l.col + off)? {
                    Label::Sym(s) => s.to_string(),
                    other => other.to_string(),
                }
            }
            "monoid" => {
                let e = expr_at(rest, l.no, l.col + off)?;
                monoid = Some(resolve::monoid(ws, &e).map_err(|e| relocate(e, l.no, l.col + off))?);
            }
            "fiber" | "zip" => deferred.push((l, kw, rest, off)),
            _ => {
                if !parts.accept(l, kw, rest, off)? {
                    return Err(parse_err(l.no, l.col, format!("unknown functor entry '{kw}'")));
                }
            }
        }
    }
    let monoid = match monoid {
        Some(m) => m,
        None => parts.finish(line, col)?,
    };
    let pos = monoid.carrier().clone();
    for (l, kw, rest, off) in deferred {
        let inner = Line { no: l.no, col: l.col + off, text: rest };
        let (lhs, rhs) = arrow(&inner)?;
        let at = |e| core_at(e, l.no, l.col + off);
        if kw == "fiber" {
            let p = pos.require(&lhs).map_err(at)?;
            let items = tuple(&rhs, l.no, l.col + off)?;
            fibers.insert(p, (Carrier::new(items).map_err(at)?, l.no));
        } else {
            let (c, d) = lhs.as_pair().ok_or_else(|| parse_err(l.no, l.col + off, "expected (c, d) -> [...]"))?;
            let (c, d) = (pos.require(c).map_err(at)?, pos.require(d).map_err(at)?);
            let mut entries = Vec::new();
            for item in tuple(&rhs, l.no, l.col + off)? {
                let (w, uv) = item.as_pair().ok_or_else(|| parse_err(l.no, l.col + off, "expected (w, (u, v))"))?;
                let (u, v) = uv.as_pair().ok_or_else(|| parse_err(l.no, l.col + off, "expected (w, (u, v))"))?;
                entries.push((w.clone(), u.clone(), v.clone()));
            }
            zips.insert((c, d), (entries, l.no, l.col + off));
        }
    }
    let n = pos.len();
    let fib: Vec<Carrier> = (0..n).map(|p| fibers.get(&p).map(|f| f.0.clone()).unwrap_or_else(Carrier::empty)).collect();
    let mut zip = Vec::with_capacity(n * n);
    for c in 0..n {
        for d in 0..n {
            let cd = monoid.mul(c, d);
            let target = &fib[cd];
            let z: Vec<(usize, usize)> = if let Some((entries, zl, zc)) = zips.get(&(c, d)) {
                zip_entries(entries, target, &fib[c], &fib[d], *zl, *zc, false)?
            } else if let Some((entries, zl, zc)) = zips.get(&(d, c)) {
                zip_entries(entries, target, &fib[d], &fib[c], *zl, *zc, true)?
            } else if target.is_empty() {
                Vec::new()
            } else if c == monoid.unit() && fib[c].len() == 1 {
                (0..target.len()).map(|w| (0, w)).collect()
            } else if d == monoid.unit() && fib[d].len() == 1 {
                (0..target.len()).map(|w| (w, 0)).collect()
            } else {
                let diag: Option<Vec<(usize, usize)>> = target
                    .elements()
                    .iter()
                    .map(|w| Some((fib[c].index_of(w)?, fib[d].index_of(w)?)))
                    .collect();
                diag.ok_or_else(|| {
                    parse_err(line, col, format!("zip ({}, {}) must be given", pos.label(c), pos.label(d)))
                })?
            };
            zip.push(z);
        }
    }
    PolyFunctor::new(&display, monoid, fib, zip).map_err(|e| core_at(e, line, col))
}

fn zip_entries(
    entries: &[(Label, Label, Label)],
    target: &Carrier,
    fc: &Carrier,
    fd: &Carrier,
    line: usize,
    col: usize,
    swap: bool,
) -> Result<Vec<(usize, usize)>, CliError> {
    let at = |e| core_at(e, line, col);
    let mut out = vec![None; target.len()];
    for (w, u, v) in entries {
        let wi = target.require(w).map_err(at)?;
        out[wi] = Some((fc.require(u).map_err(at)?, fd.require(v).map_err(at)?));
    }
    out.into_iter()
        .enumerate()
        .map(|(w, e)| {
            let (u, v) = e.ok_or_else(|| parse_err(line, col, format!("zip entry for {} missing", target.label(w))))?;
            Ok(if swap { (v, u) } else { (u, v) })
        })
        .collect()
}

fn carrier_line(body: &[Line], line: usize, col: usize) -> Result<Carrier, CliError> {
    let first = body.first().ok_or_else(|| parse_err(line, col, "empty block"))?;
    let (kw, rest, off) = keyword(first);
    if kw != "carrier" {
        return Err(parse_err(first.no, first.col, "the first entry must be 'carrier [...]'"));
    }
    let items = tuple(&label_at(rest, first.no, first.col + off)?, first.no, first.col + off)?;
    Carrier::new(items).map_err(|e| core_at(e, first.no, first.col + off))
}

fn parse_algebra(f: &Functor, body: &[Line], line: usize, col: usize) -> Result<Algebra, CliError> {
    let carrier = carrier_line(body, line, col)?;
    let shape = f.shape(carrier.len()).map_err(|e| core_at(e, line, col))?;
    let mut table = vec![usize::MAX; shape.len()];
    for l in &body[1..] {
        let (x, a) = arrow(l)?;
        let e = f.parse_elem(&x, &carrier).map_err(|e| core_at(e, l.no, l.col))?;
        let i = shape.encode_elem(&e);
        if table[i] != usize::MAX {
            return Err(parse_err(l.no, l.col, format!("structure assigned twice at {x}")));
        }
        table[i] = carrier.require(&a).map_err(|e| core_at(e, l.no, l.col))?;
    }
    if let Some(i) = table.iter().position(|&v| v == usize::MAX) {
        return Err(parse_err(line, col, format!("structure undefined at {}", f.elem_label(&shape.decode(i), &carrier))));
    }
    Algebra::from_table(f, carrier, table).map_err(|e| core_at(e, line, col))
}

fn parse_coalgebra(f: &Functor, body: &[Line], line: usize, col: usize) -> Result<Coalgebra, CliError> {
    let carrier = carrier_line(body, line, col)?;
    let shape = f.shape(carrier.len()).map_err(|e| core_at(e, line, col))?;
    let mut table = vec![usize::MAX; carrier.len()];
    for l in &body[1..] {
        let (c, x) = arrow(l)?;
        let i = carrier.require(&c).map_err(|e| core_at(e, l.no, l.col))?;
        if table[i] != usize::MAX {
            return Err(parse_err(l.no, l.col, format!("structure assigned twice at {c}")));
        }
        table[i] = shape.encode_elem(&f.parse_elem(&x, &carrier).map_err(|e| core_at(e, l.no, l.col))?);
    }
    if let Some(i) = table.iter().position(|&v| v == usize::MAX) {
        return Err(parse_err(line, col, format!("structure undefined at {}", carrier.label(i))));
    }
    Coalgebra::from_table(f, carrier, table).map_err(|e| core_at(e, line, col))
}

fn parse_measuring(c: &Coalgebra, a: &Algebra, b: &Algebra, body: &[Line], line: usize, col: usize) -> Result<Measuring, CliError> {
    let mut table = vec![usize::MAX; c.len() * a.len()];
    for l in body {
        let (ca, v) = arrow(l)?;
        let (s, x) = ca.as_pair().ok_or_else(|| parse_err(l.no, l.col, "expected (state, element) -> value"))?;
        let at = |e| core_at(e, l.no, l.col);
        let k = c.carrier().require(s).map_err(at)? * a.len() + a.carrier().require(x).map_err(at)?;
        if table[k] != usize::MAX {
            return Err(parse_err(l.no, l.col, format!("value assigned twice at {ca}")));
        }
        table[k] = b.carrier().require(&v).map_err(at)?;
    }
    if let Some(k) = table.iter().position(|&v| v == usize::MAX) {
        let (s, x) = (k / a.len().max(1), k % a.len().max(1));
        return Err(parse_err(line, col, format!("value undefined at ({}, {})", c.carrier().label(s), a.carrier().label(x))));
    }
    Measuring::new(c, a, b, table).map_err(|e| core_at(e, line, col))
}

/// Writes a functor as an explicit block.
pub fn write_functor(name: &str, f: &Functor) -> String {
    let m = f.positions();
    let pos = m.carrier();
    let mut s = format!("functor {name} {{\n");
    let _ = writeln!(s, "  name {}", Label::sym(f.name()));
    let _ = writeln!(s, "  positions {}", Label::Tuple(pos.elements().to_vec()));
    let _ = writeln!(s, "  unit {}", pos.label(m.unit()));
    let n = pos.len();
    for a in 0..n {
        for b in a..n {
            if a != m.unit() && b != m.unit() {
                let _ = writeln!(s, "  mul ({}, {}) -> {}", pos.label(a), pos.label(b), pos.label(m.mul(a, b)));
            }
        }
    }
    for p in 0..n {
        if f.arity(p) > 0 {
            let _ = writeln!(s, "  fiber {} -> {}", pos.label(p), Label::Tuple(f.fiber(p).elements().to_vec()));
        }
    }
    for c in 0..n {
        for d in c..n {
            let cd = m.mul(c, d);
            if f.arity(cd) == 0 {
                continue;
            }
            let items: Vec<Label> = f
                .zip(c, d)
                .iter()
                .enumerate()
                .map(|(w, &(u, v))| {
                    Label::pair(
                        f.fiber(cd).label(w).clone(),
                        Label::pair(f.fiber(c).label(u).clone(), f.fiber(d).label(v).clone()),
                    )
                })
                .collect();
            let _ = writeln!(s, "  zip ({}, {}) -> {}", pos.label(c), pos.label(d), Label::Tuple(items));
        }
    }
    s.push_str("}\n");
    s
}

pub fn write_algebra(name: &str, functor: &str, a: &Algebra) -> String {
    let mut s = format!("algebra {name} : {functor} {{\n");
    let _ = writeln!(s, "  carrier {}", Label::Tuple(a.carrier().elements().to_vec()));
    for (x, y) in a.pairs() {
        let _ = writeln!(s, "  {x} -> {y}");
    }
    s.push_str("}\n");
    s
}

pub fn write_coalgebra(name: &str, functor: &str, c: &Coalgebra) -> String {
    let mut s = format!("coalgebra {name} : {functor} {{\n");
    let _ = writeln!(s, "  carrier {}", Label::Tuple(c.carrier().elements().to_vec()));
    for (x, y) in c.pairs() {
        let _ = writeln!(s, "  {x} -> {y}");
    }
    s.push_str("}\n");
    s
}

pub fn write_measuring(name: &str, sig: (&str, &str, &str), m: &Measuring) -> String {
    let mut s = format!("measuring {name} : {}, {} -> {} {{\n", sig.0, sig.1, sig.2);
    for c in 0..m.coalgebra.len() {
        for a in 0..m.source.len() {
            let _ = writeln!(
                s,
                "  ({}, {}) -> {}",
                m.coalgebra.carrier().label(c),
                m.source.carrier().label(a),
                m.target.carrier().label(m.at(c, a))
            );
        }
    }
    s.push_str("}\n");
    s
}
