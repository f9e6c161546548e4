//! Stock algebras and coalgebras: truncated naturals, bounded lists, depth
//! truncated trees, the unit and empty coalgebras and the terminal algebra.

use std::collections::HashMap;

use crate::algebra::{Algebra, Coalgebra};
use crate::builtin::maybe;
use crate::error::{Error, Result};
use crate::fixpoints::maybe_positions;
use crate::functor::{FElem, Functor};
use crate::label::Label;
use crate::set::Carrier;
use crate::term::Term;

/// The one-element algebra.
pub fn terminal_algebra(f: &Functor) -> Algebra {
    Algebra::from_fn(f, Carrier::unit(), |_| 0).expect("terminal algebra")
}

/// The unit coalgebra `𝕀`: one state `*` with structure `η(*)`.
pub fn unit_coalgebra(f: &Functor) -> Coalgebra {
    Coalgebra::from_fn(f, Carrier::unit(), |_| f.eta_elem()).expect("unit coalgebra")
}

pub fn empty_coalgebra(f: &Functor) -> Coalgebra {
    Coalgebra::from_table(f, Carrier::empty(), vec![]).expect("empty coalgebra")
}

pub fn empty_algebra_exists(f: &Functor) -> bool {
    f.nullary_positions().is_empty()
}

fn require_maybe(f: &Functor) -> Result<(usize, usize)> {
    maybe_positions(f).ok_or_else(|| Error::Unsupported(format!("{} is not a 1 + X functor", f.name())))
}

/// `𝕟`: `{0..n}` with `Zero ↦ 0` and `Succ j ↦ min(j + 1, n)`.
pub fn std_alg(n: usize) -> Algebra {
    std_alg_for(&maybe(), n).expect("Maybe")
}

/// `𝕟` for any functor of shape `1 + X`.
pub fn std_alg_for(f: &Functor, n: usize) -> Result<Algebra> {
    let (_, zero) = require_maybe(f)?;
    Algebra::from_fn(f, Carrier::range(n + 1), |e| if e.pos == zero { 0 } else { (e.args[0] + 1).min(n) })
}

/// `𝕞` with a cycle: `{0..m}` where `Succ m = k`.
pub fn lasso_alg(m: usize, k: usize) -> Result<Algebra> {
    if k > m {
        return Err(Error::Invalid(format!("loop target {k} exceeds {m}")));
    }
    Algebra::from_fn(&maybe(), Carrier::range(m + 1), |e| match e.pos {
        1 => 0,
        _ if e.args[0] == m => k,
        _ => e.args[0] + 1,
    })
}

/// `𝕟°`: states `{0..n}` with `0 ↦ Zero` and `k ↦ Succ(k - 1)`.
pub fn std_coalg(n: usize) -> Coalgebra {
    std_coalg_for(&maybe(), n).expect("Maybe")
}

pub fn std_coalg_for(f: &Functor, n: usize) -> Result<Coalgebra> {
    let (succ, zero) = require_maybe(f)?;
    Coalgebra::from_fn(f, Carrier::range(n + 1), |c| {
        if c == 0 {
            FElem { pos: zero, args: vec![] }
        } else {
            FElem { pos: succ, args: vec![c - 1] }
        }
    })
}

/// Label of the state of index infinity.
pub fn infinity_label() -> Label {
    Label::sym("inf")
}

/// The finite part `{0..k}` of the terminal `1 + X` coalgebra together with
/// the state `inf ↦ Succ inf`.
pub fn nat_inf_truncation(k: usize) -> Coalgebra {
    let mut labels: Vec<Label> = (0..=k as u64).map(Label::Nat).collect();
    labels.push(infinity_label());
    let carrier = Carrier::new(labels).expect("distinct");
    let inf = carrier.index_of(&infinity_label()).expect("present");
    Coalgebra::from_fn(&maybe(), carrier, |c| {
        if c == inf {
            FElem { pos: 0, args: vec![inf] }
        } else if c == 0 {
            FElem { pos: 1, args: vec![] }
        } else {
            FElem { pos: 0, args: vec![c - 1] }
        }
    })
    .expect("valid")
}

/// `𝕀` for `1 + X` seen as the single state of index infinity.
pub fn infinity_coalgebra() -> Coalgebra {
    Coalgebra::from_fn(&maybe(), Carrier::new(vec![infinity_label()]).expect("one"), |_| FElem {
        pos: 0,
        args: vec![0],
    })
    .expect("valid")
}

/// Closed terms of depth at most `n`, where the absorbing zero has depth 0
/// and any other node has depth one more than its deepest child.
fn truncated_terms(f: &Functor, n: usize) -> Result<Vec<Term>> {
    let zero = f.zero().ok_or_else(|| Error::Unsupported(format!("{} has no absorbing nullary zero", f.name())))?;
    let mut level = vec![Term::node(zero, vec![])];
    for _ in 0..n {
        let mut next = vec![Term::node(zero, vec![])];
        for p in 0..f.num_positions() {
            if p == zero {
                continue;
            }
            let k = f.arity(p);
            let mut odo = crate::set::Odometer::new(k, level.len());
            while let Some(t) = odo.next_table() {
                next.push(Term::node(p, t.iter().map(|&i| level[i].clone()).collect()));
            }
            crate::guard::check_size("truncated terms", next.len() as u128)?;
        }
        level = next;
    }
    Ok(level)
}

fn truncate(t: &Term, depth: usize, zero: usize) -> Term {
    match t {
        Term::Node(p, ch) if depth > 0 && *p != zero => {
            Term::node(*p, ch.iter().map(|c| truncate(c, depth - 1, zero)).collect())
        }
        _ => Term::node(zero, vec![]),
    }
}

/// The truncation carrier with a labelling of its terms.
pub struct Truncation {
    pub terms: Vec<Term>,
    pub carrier: Carrier,
    index: HashMap<Term, usize>,
}

impl Truncation {
    pub fn new(f: &Functor, n: usize, label: &dyn Fn(&Term) -> Label) -> Result<Truncation> {
        let terms = truncated_terms(f, n)?;
        let carrier = Carrier::new(terms.iter().map(label).collect())?;
        let mut ordered = vec![Term::Var(Label::Unit); terms.len()];
        for t in &terms {
            ordered[carrier.index_of(&label(t)).expect("present")] = t.clone();
        }
        let index = ordered.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Ok(Truncation { terms: ordered, carrier, index })
    }

    pub fn index_of(&self, t: &Term) -> Option<usize> {
        self.index.get(t).copied()
    }
}

/// `F^n 1` as depth-`n` truncated terms: `α` builds a node and truncates it.
pub fn truncation_algebra(f: &Functor, n: usize) -> Result<Algebra> {
    truncation_algebra_labelled(f, n, &|t| t.to_label(f))
}

/// `(F^n 1)°`: the same carrier with `χ` exposing the root of each term.
pub fn truncation_coalgebra(f: &Functor, n: usize) -> Result<Coalgebra> {
    truncation_coalgebra_labelled(f, n, &|t| t.to_label(f))
}

pub fn truncation_algebra_labelled(f: &Functor, n: usize, label: &dyn Fn(&Term) -> Label) -> Result<Algebra> {
    let tr = Truncation::new(f, n, label)?;
    let zero = f.zero().expect("checked");
    Algebra::from_fn(f, tr.carrier.clone(), |e| {
        let t = Term::node(e.pos, e.args.iter().map(|&a| tr.terms[a].clone()).collect());
        tr.index_of(&truncate(&t, n, zero)).expect("truncation stays in the carrier")
    })
}

pub fn truncation_coalgebra_labelled(f: &Functor, n: usize, label: &dyn Fn(&Term) -> Label) -> Result<Coalgebra> {
    let tr = Truncation::new(f, n, label)?;
    Coalgebra::from_fn(f, tr.carrier.clone(), |c| match &tr.terms[c] {
        Term::Node(p, ch) => FElem { pos: *p, args: ch.iter().map(|t| tr.index_of(t).expect("closed")).collect() },
        Term::Var(_) => unreachable!("truncated terms are closed"),
    })
}

/// Renders a list term as the tuple of its entries' labels.
fn list_label(f: &Functor) -> impl Fn(&Term) -> Label + '_ {
    move |t| {
        let mut items = Vec::new();
        let mut cur = t;
        while let Term::Node(p, ch) = cur {
            if ch.is_empty() {
                break;
            }
            let pl = f.position_label(*p);
            items.push(match pl {
                Label::Tagged(_, x) => (**x).clone(),
                other => other.clone(),
            });
            cur = &ch[0];
        }
        Label::Tuple(items)
    }
}

/// `X*_n`: lists of length at most `n`, with `cons(x, xs) = take(n)(x : xs)`.
/// `f` must be a list functor.
pub fn list_alg(f: &Functor, n: usize) -> Result<Algebra> {
    require_list(f)?;
    truncation_algebra_labelled(f, n, &list_label(f))
}

/// `(X*_n)°`: lists of length at most `n` with `χ(x : xs) = (x, xs)`.
pub fn list_coalg(f: &Functor, n: usize) -> Result<Coalgebra> {
    require_list(f)?;
    truncation_coalgebra_labelled(f, n, &list_label(f))
}

fn require_list(f: &Functor) -> Result<()> {
    let zero = f.zero();
    let ok = zero.is_some() && (0..f.num_positions()).all(|p| Some(p) == zero || f.arity(p) == 1);
    if ok {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("{} is not a list functor", f.name())))
    }
}

/// The list `xs` (entries as indices into `X`) as an element of `X*_n` or
/// `(X*_n)°`; entries beyond `n` are dropped.
pub fn list_index(carrier: &Carrier, x: &Carrier, xs: &[usize]) -> Option<usize> {
    carrier.index_of(&Label::Tuple(xs.iter().map(|&i| x.label(i).clone()).collect()))
}

/// `T_{X,n}`: binary trees of depth at most `n`.
pub fn tree_alg(f: &Functor, n: usize) -> Result<Algebra> {
    truncation_algebra(f, n)
}

/// `T_{X,n}°`.
pub fn tree_coalg(f: &Functor, n: usize) -> Result<Coalgebra> {
    truncation_coalgebra(f, n)
}
