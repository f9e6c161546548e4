//! Algebras and coalgebras of a polynomial functor, their homomorphisms, and
//! exhaustive enumeration of small instances.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::functor::{FElem, FShape, Functor, PolyFunctor};
use crate::guard;
use crate::label::Label;
use crate::set::{Carrier, Map, Odometer};

struct AlgebraData {
    functor: Functor,
    carrier: Carrier,
    shape: FShape,
    table: Vec<usize>,
}

/// An algebra `α : F(A) → A`, stored as a table over the index form of `F(A)`.
/// Cloning is cheap.
#[derive(Clone)]
pub struct Algebra(Arc<AlgebraData>);

impl Algebra {
    /// Builds an algebra from a table indexed like [`PolyFunctor::shape`].
    pub fn from_table(functor: &Functor, carrier: Carrier, table: Vec<usize>) -> Result<Algebra> {
        let shape = functor.shape(carrier.len())?;
        if table.len() != shape.len() {
            return Err(Error::Invalid(format!(
                "algebra table has {} entries, {} applied to the carrier has {}",
                table.len(),
                functor.name(),
                shape.len()
            )));
        }
        if let Some(&bad) = table.iter().find(|&&v| v >= carrier.len()) {
            return Err(Error::Invalid(format!("algebra table refers to element {bad} outside the carrier")));
        }
        Ok(Algebra(Arc::new(AlgebraData { functor: functor.clone(), carrier, shape, table })))
    }

    /// Builds an algebra from a function on index-form elements.
    pub fn from_fn(functor: &Functor, carrier: Carrier, f: impl Fn(&FElem) -> usize) -> Result<Algebra> {
        let shape = functor.shape(carrier.len())?;
        let table = (0..shape.len()).map(|i| f(&shape.decode(i))).collect();
        Self::from_table(functor, carrier, table)
    }

    /// Builds an algebra from its structure map `F(A) → A`.
    pub fn from_map(functor: &Functor, carrier: Carrier, structure: &Map) -> Result<Algebra> {
        let fa = functor.apply_to_set(&carrier)?;
        if structure.dom() != &fa || structure.cod() != &carrier {
            return Err(Error::FunctorMismatch(format!(
                "structure map does not have type {}(A) -> A",
                functor.name()
            )));
        }
        Self::from_table(functor, carrier, structure.table().to_vec())
    }

    /// Builds an algebra from `(F-element label, element label)` pairs, which
    /// must cover `F(A)` exactly once.
    pub fn from_pairs(functor: &Functor, carrier: Carrier, pairs: &[(Label, Label)]) -> Result<Algebra> {
        let shape = functor.shape(carrier.len())?;
        let mut table = vec![usize::MAX; shape.len()];
        for (x, a) in pairs {
            let e = functor.parse_elem(x, &carrier)?;
            let i = shape.encode_elem(&e);
            if table[i] != usize::MAX {
                return Err(Error::Invalid(format!("structure assigned twice at {x}")));
            }
            table[i] = carrier.require(a)?;
        }
        if let Some(i) = table.iter().position(|&v| v == usize::MAX) {
            return Err(Error::Invalid(format!(
                "structure undefined at {}",
                functor.elem_label(&shape.decode(i), &carrier)
            )));
        }
        Self::from_table(functor, carrier, table)
    }

    pub fn functor(&self) -> &Functor {
        &self.0.functor
    }

    pub fn carrier(&self) -> &Carrier {
        &self.0.carrier
    }

    pub fn len(&self) -> usize {
        self.0.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.carrier.is_empty()
    }

    pub fn shape(&self) -> &FShape {
        &self.0.shape
    }

    pub fn table(&self) -> &[usize] {
        &self.0.table
    }

    /// `α` at the F-element with index `i`.
    pub fn act_index(&self, i: usize) -> usize {
        self.0.table[i]
    }

    pub fn act(&self, e: &FElem) -> usize {
        self.0.table[self.0.shape.encode_elem(e)]
    }

    pub fn act_parts(&self, pos: usize, args: &[usize]) -> usize {
        self.0.table[self.0.shape.encode(pos, args)]
    }

    /// The structure map as a [`Map`].
    pub fn structure(&self) -> Result<Map> {
        Map::from_indices(self.0.functor.apply_to_set(&self.0.carrier)?, self.0.carrier.clone(), self.0.table.clone())
    }

    /// `(F-element label, element label)` pairs in canonical order.
    pub fn pairs(&self) -> Vec<(Label, Label)> {
        (0..self.0.shape.len())
            .map(|i| {
                let e = self.0.shape.decode(i);
                (self.0.functor.elem_label(&e, &self.0.carrier), self.0.carrier.label(self.0.table[i]).clone())
            })
            .collect()
    }
}

impl PartialEq for Algebra {
    fn eq(&self, other: &Algebra) -> bool {
        PolyFunctor::same(self.functor(), other.functor())
            && self.carrier() == other.carrier()
            && self.table() == other.table()
    }
}

impl Eq for Algebra {}

impl fmt::Debug for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Algebra<{}>{{", self.functor().name())?;
        for (i, (x, a)) in self.pairs().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x} -> {a}")?;
        }
        write!(f, "}}")
    }
}

struct CoalgebraData {
    functor: Functor,
    carrier: Carrier,
    shape: FShape,
    table: Vec<usize>,
}

/// A coalgebra `χ : C → F(C)`; `table[c]` is the index of `χ(c)` in the
/// index form of `F(C)`. Cloning is cheap.
#[derive(Clone)]
pub struct Coalgebra(Arc<CoalgebraData>);

impl Coalgebra {
    pub fn from_table(functor: &Functor, carrier: Carrier, table: Vec<usize>) -> Result<Coalgebra> {
        let shape = functor.shape(carrier.len())?;
        if table.len() != carrier.len() {
            return Err(Error::Invalid(format!(
                "coalgebra table has {} entries for {} states",
                table.len(),
                carrier.len()
            )));
        }
        if table.iter().any(|&v| v >= shape.len()) {
            return Err(Error::Invalid("coalgebra table refers to a missing F-element".into()));
        }
        Ok(Coalgebra(Arc::new(CoalgebraData { functor: functor.clone(), carrier, shape, table })))
    }

    pub fn from_fn(functor: &Functor, carrier: Carrier, f: impl Fn(usize) -> FElem) -> Result<Coalgebra> {
        let shape = functor.shape(carrier.len())?;
        let table = (0..carrier.len()).map(|c| shape.encode_elem(&f(c))).collect();
        Self::from_table(functor, carrier, table)
    }

    pub fn from_map(functor: &Functor, carrier: Carrier, structure: &Map) -> Result<Coalgebra> {
        let fc = functor.apply_to_set(&carrier)?;
        if structure.dom() != &carrier || structure.cod() != &fc {
            return Err(Error::FunctorMismatch(format!(
                "structure map does not have type C -> {}(C)",
                functor.name()
            )));
        }
        Self::from_table(functor, carrier, structure.table().to_vec())
    }

    /// Builds a coalgebra from `(state label, F-element label)` pairs.
    pub fn from_pairs(functor: &Functor, carrier: Carrier, pairs: &[(Label, Label)]) -> Result<Coalgebra> {
        let shape = functor.shape(carrier.len())?;
        let mut table = vec![usize::MAX; carrier.len()];
        for (c, x) in pairs {
            let i = carrier.require(c)?;
            if table[i] != usize::MAX {
                return Err(Error::Invalid(format!("structure assigned twice at {c}")));
            }
            table[i] = shape.encode_elem(&functor.parse_elem(x, &carrier)?);
        }
        if let Some(i) = table.iter().position(|&v| v == usize::MAX) {
            return Err(Error::Invalid(format!("structure undefined at {}", carrier.label(i))));
        }
        Self::from_table(functor, carrier, table)
    }

    pub fn functor(&self) -> &Functor {
        &self.0.functor
    }

    pub fn carrier(&self) -> &Carrier {
        &self.0.carrier
    }

    pub fn len(&self) -> usize {
        self.0.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.carrier.is_empty()
    }

    pub fn shape(&self) -> &FShape {
        &self.0.shape
    }

    pub fn table(&self) -> &[usize] {
        &self.0.table
    }

    /// `χ(c)` in index form.
    pub fn step(&self, c: usize) -> FElem {
        self.0.shape.decode(self.0.table[c])
    }

    /// Position of `χ(c)`.
    pub fn pos(&self, c: usize) -> usize {
        self.0.shape.pos_of(self.0.table[c])
    }

    pub fn structure(&self) -> Result<Map> {
        Map::from_indices(self.0.carrier.clone(), self.0.functor.apply_to_set(&self.0.carrier)?, self.0.table.clone())
    }

    pub fn pairs(&self) -> Vec<(Label, Label)> {
        (0..self.len())
            .map(|c| (self.0.carrier.label(c).clone(), self.0.functor.elem_label(&self.step(c), &self.0.carrier)))
            .collect()
    }
}

impl PartialEq for Coalgebra {
    fn eq(&self, other: &Coalgebra) -> bool {
        PolyFunctor::same(self.functor(), other.functor())
            && self.carrier() == other.carrier()
            && self.table() == other.table()
    }
}

impl Eq for Coalgebra {}

impl fmt::Debug for Coalgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Coalgebra<{}>{{", self.functor().name())?;
        for (i, (c, x)) in self.pairs().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c} -> {x}")?;
        }
        write!(f, "}}")
    }
}

pub(crate) fn same_functor(a: &Functor, b: &Functor, what: &str) -> Result<()> {
    if PolyFunctor::same(a, b) {
        Ok(())
    } else {
        Err(Error::FunctorMismatch(format!("{what}: {} vs {}", a.name(), b.name())))
    }
}

/// The first F-element of `A` at which `h` fails to commute with the
/// structure maps, or `None` when `h` is an algebra homomorphism.
pub fn algebra_hom_violation(h: &[usize], a: &Algebra, b: &Algebra) -> Result<Option<usize>> {
    same_functor(a.functor(), b.functor(), "algebra homomorphism")?;
    check_table(h, a.len(), b.len())?;
    let sa = a.shape();
    for i in 0..sa.len() {
        let e = sa.decode(i);
        let mapped: Vec<usize> = e.args.iter().map(|&x| h[x]).collect();
        if h[a.act_index(i)] != b.act_parts(e.pos, &mapped) {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

pub fn is_algebra_hom(h: &[usize], a: &Algebra, b: &Algebra) -> Result<bool> {
    Ok(algebra_hom_violation(h, a, b)?.is_none())
}

/// The first state of `C` at which `h` fails to commute, or `None` when `h`
/// is a coalgebra homomorphism.
pub fn coalgebra_hom_violation(h: &[usize], c: &Coalgebra, d: &Coalgebra) -> Result<Option<usize>> {
    same_functor(c.functor(), d.functor(), "coalgebra homomorphism")?;
    check_table(h, c.len(), d.len())?;
    for s in 0..c.len() {
        let e = c.step(s);
        let mapped: Vec<usize> = e.args.iter().map(|&x| h[x]).collect();
        if d.shape().encode(e.pos, &mapped) != d.table()[h[s]] {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

pub fn is_coalgebra_hom(h: &[usize], c: &Coalgebra, d: &Coalgebra) -> Result<bool> {
    Ok(coalgebra_hom_violation(h, c, d)?.is_none())
}

fn check_table(h: &[usize], dom: usize, cod: usize) -> Result<()> {
    if h.len() != dom || h.iter().any(|&v| v >= cod) {
        return Err(Error::Invalid("map table does not fit the carriers".into()));
    }
    Ok(())
}

/// All algebra homomorphisms `A → B` as tables, in canonical order.
///
/// Values on elements reachable from the constants are forced; the search
/// branches only on the rest.
pub fn algebra_homs(a: &Algebra, b: &Algebra) -> Result<Vec<Vec<usize>>> {
    algebra_homs_limited(a, b, usize::MAX)
}

/// Like [`algebra_homs`], stopping after `limit` results.
pub fn algebra_homs_limited(a: &Algebra, b: &Algebra, limit: usize) -> Result<Vec<Vec<usize>>> {
    same_functor(a.functor(), b.functor(), "algebra homomorphism")?;
    let sa = a.shape();
    let elems: Vec<FElem> = (0..sa.len()).map(|i| sa.decode(i)).collect();
    let mut out = Vec::new();
    let mut assign = vec![None; a.len()];
    search_alg(a, b, &elems, &mut assign, &mut out, limit)?;
    out.sort();
    Ok(out)
}

fn propagate_alg(a: &Algebra, b: &Algebra, elems: &[FElem], assign: &mut [Option<usize>]) -> bool {
    loop {
        let mut changed = false;
        for (i, e) in elems.iter().enumerate() {
            let mut mapped = Vec::with_capacity(e.args.len());
            for &x in &e.args {
                match assign[x] {
                    Some(v) => mapped.push(v),
                    None => break,
                }
            }
            if mapped.len() != e.args.len() {
                continue;
            }
            let want = b.act_parts(e.pos, &mapped);
            let t = a.act_index(i);
            match assign[t] {
                Some(v) if v != want => return false,
                Some(_) => {}
                None => {
                    assign[t] = Some(want);
                    changed = true;
                }
            }
        }
        if !changed {
            return true;
        }
    }
}

fn search_alg(
    a: &Algebra,
    b: &Algebra,
    elems: &[FElem],
    assign: &mut Vec<Option<usize>>,
    out: &mut Vec<Vec<usize>>,
    limit: usize,
) -> Result<()> {
    if out.len() >= limit {
        return Ok(());
    }
    if !propagate_alg(a, b, elems, assign) {
        return Ok(());
    }
    match assign.iter().position(|v| v.is_none()) {
        None => {
            guard::check_hom_set("algebra homomorphisms", out.len() as u128 + 1)?;
            out.push(assign.iter().map(|v| v.expect("assigned")).collect());
        }
        Some(x) => {
            for v in 0..b.len() {
                let mut next = assign.clone();
                next[x] = Some(v);
                search_alg(a, b, elems, &mut next, out, limit)?;
            }
        }
    }
    Ok(())
}

/// All coalgebra homomorphisms `C → D` as tables, in canonical order.
pub fn coalgebra_homs(c: &Coalgebra, d: &Coalgebra) -> Result<Vec<Vec<usize>>> {
    same_functor(c.functor(), d.functor(), "coalgebra homomorphism")?;
    let mut out = Vec::new();
    let mut assign = vec![None; c.len()];
    search_coalg(c, d, &mut assign, &mut out)?;
    out.sort();
    Ok(out)
}

/// Assigns `h(s) = t` and everything it forces; false on conflict.
fn force_coalg(c: &Coalgebra, d: &Coalgebra, assign: &mut [Option<usize>], s: usize, t: usize) -> bool {
    let mut stack = vec![(s, t)];
    while let Some((s, t)) = stack.pop() {
        match assign[s] {
            Some(v) if v == t => continue,
            Some(_) => return false,
            None => assign[s] = Some(t),
        }
        let es = c.step(s);
        let et = d.step(t);
        if es.pos != et.pos {
            return false;
        }
        for (&cs, &ct) in es.args.iter().zip(&et.args) {
            stack.push((cs, ct));
        }
    }
    true
}

fn search_coalg(
    c: &Coalgebra,
    d: &Coalgebra,
    assign: &mut Vec<Option<usize>>,
    out: &mut Vec<Vec<usize>>,
) -> Result<()> {
    match assign.iter().position(|v| v.is_none()) {
        None => {
            guard::check_hom_set("coalgebra homomorphisms", out.len() as u128 + 1)?;
            out.push(assign.iter().map(|v| v.expect("assigned")).collect());
        }
        Some(s) => {
            for t in 0..d.len() {
                let mut next = assign.clone();
                if force_coalg(c, d, &mut next, s, t) {
                    search_coalg(c, d, &mut next, out)?;
                }
            }
        }
    }
    Ok(())
}

/// Every algebra structure on `{0..n-1}`, in canonical table order.
pub fn enumerate_algebras(functor: &Functor, n: usize) -> Result<Vec<Algebra>> {
    let carrier = Carrier::range(n);
    let shape = functor.shape(n)?;
    guard::check_hom_set(&format!("algebras of {} on {n} elements", functor.name()), guard::pow_sat(n, shape.len()))?;
    let mut out = Vec::new();
    let mut odo = Odometer::new(shape.len(), n);
    while let Some(t) = odo.next_table() {
        out.push(Algebra::from_table(functor, carrier.clone(), t.to_vec())?);
    }
    Ok(out)
}

/// Every coalgebra structure on `{0..n-1}`, in canonical table order.
pub fn enumerate_coalgebras(functor: &Functor, n: usize) -> Result<Vec<Coalgebra>> {
    let carrier = Carrier::range(n);
    let shape = functor.shape(n)?;
    guard::check_hom_set(
        &format!("coalgebras of {} on {n} elements", functor.name()),
        guard::pow_sat(shape.len(), n),
    )?;
    let mut out = Vec::new();
    let mut odo = Odometer::new(n, shape.len());
    while let Some(t) = odo.next_table() {
        out.push(Coalgebra::from_table(functor, carrier.clone(), t.to_vec())?);
    }
    Ok(out)
}

/// Every coalgebra on carriers of size `0..=k`.
pub fn coalgebras_up_to(functor: &Functor, k: usize) -> Result<Vec<Coalgebra>> {
    let mut out = Vec::new();
    for n in 0..=k {
        out.extend(enumerate_coalgebras(functor, n)?);
    }
    Ok(out)
}

/// Every algebra on carriers of size `0..=k`.
pub fn algebras_up_to(functor: &Functor, k: usize) -> Result<Vec<Algebra>> {
    let mut out = Vec::new();
    for n in 0..=k {
        out.extend(enumerate_algebras(functor, n)?);
    }
    Ok(out)
}
