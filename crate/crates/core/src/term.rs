//! Finite well-founded terms over a functor, with leaf variables.

use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::functor::PolyFunctor;
use crate::label::Label;

/// A finite term: a node carries a position and one child per fiber element.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    Var(Label),
    Node(usize, Vec<Term>),
}

impl Term {
    pub fn node(pos: usize, children: Vec<Term>) -> Term {
        Term::Node(pos, children)
    }

    pub fn var(l: Label) -> Term {
        Term::Var(l)
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Node(_, ch) => ch.iter().all(Term::is_closed),
        }
    }

    /// Number of node levels: `0` for a variable, `1 + max` over children.
    pub fn height(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::Node(_, ch) => 1 + ch.iter().map(Term::height).max().unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Node(_, ch) => 1 + ch.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Checks positions and arities against `f`.
    pub fn check(&self, f: &PolyFunctor) -> Result<()> {
        match self {
            Term::Var(_) => Ok(()),
            Term::Node(p, ch) => {
                if *p >= f.num_positions() || ch.len() != f.arity(*p) {
                    return Err(Error::FunctorMismatch(format!("term does not fit {}", f.name())));
                }
                ch.iter().try_for_each(|c| c.check(f))
            }
        }
    }

    /// Nested `(position, [children])` labels; variables become `var(x)`.
    pub fn to_label(&self, f: &PolyFunctor) -> Label {
        match self {
            Term::Var(l) => Label::tagged("var", l.clone()),
            Term::Node(p, ch) => {
                Label::pair(f.position_label(*p).clone(), Label::Tuple(ch.iter().map(|c| c.to_label(f)).collect()))
            }
        }
    }

    /// Inverse of [`to_label`](Self::to_label).
    pub fn from_label(l: &Label, f: &PolyFunctor) -> Result<Term> {
        match l {
            Label::Tagged(tag, x) if &**tag == "var" => Ok(Term::Var((**x).clone())),
            Label::Pair(p, ch) => {
                let pos = f.position_index(p)?;
                let ch = ch.as_tuple().ok_or_else(|| Error::Invalid(format!("{l} is not a term")))?;
                if ch.len() != f.arity(pos) {
                    return Err(Error::Invalid(format!("{l} has the wrong number of children")));
                }
                Ok(Term::Node(pos, ch.iter().map(|c| Term::from_label(c, f)).collect::<Result<_>>()?))
            }
            _ => Err(Error::Invalid(format!("{l} is not a term"))),
        }
    }

    /// Compact one-line rendering, `pos` or `pos{child, ...}`.
    pub fn render(&self, f: &PolyFunctor) -> String {
        match self {
            Term::Var(l) => format!("?{l}"),
            Term::Node(p, ch) if ch.is_empty() => f.position_label(*p).to_string(),
            Term::Node(p, ch) => {
                let inner: Vec<String> = ch.iter().map(|c| c.render(f)).collect();
                format!("{}{{{}}}", f.position_label(*p), inner.join(", "))
            }
        }
    }

    /// Indented multi-line tree.
    pub fn pretty(&self, f: &PolyFunctor) -> String {
        let mut out = String::new();
        self.pretty_into(f, 0, &mut out);
        out
    }

    fn pretty_into(&self, f: &PolyFunctor, indent: usize, out: &mut String) {
        for _ in 0..indent {
            out.push_str("  ");
        }
        match self {
            Term::Var(l) => {
                out.push('?');
                out.push_str(&l.to_string());
                out.push('\n');
            }
            Term::Node(p, ch) => {
                out.push_str(&f.position_label(*p).to_string());
                out.push('\n');
                for c in ch {
                    c.pretty_into(f, indent + 1, out);
                }
            }
        }
    }
}

/// Evaluates a closed term bottom-up in `A`.
pub fn cata(t: &Term, a: &Algebra) -> Result<usize> {
    cata_with(t, a, &|l| Err(Error::Invalid(format!("term has free variable {l}"))))
}

/// Evaluates a term in `A`, resolving variables with `env`.
pub fn cata_with(t: &Term, a: &Algebra, env: &dyn Fn(&Label) -> Result<usize>) -> Result<usize> {
    match t {
        Term::Var(l) => env(l),
        Term::Node(p, ch) => {
            if *p >= a.functor().num_positions() || ch.len() != a.functor().arity(*p) {
                return Err(Error::FunctorMismatch(format!("term does not fit {}", a.functor().name())));
            }
            let args = ch.iter().map(|c| cata_with(c, a, env)).collect::<Result<Vec<_>>>()?;
            Ok(a.act_parts(*p, &args))
        }
    }
}
