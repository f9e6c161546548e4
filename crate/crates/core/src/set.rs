//! Canonical finite sets, maps between them, and the product, coproduct and
//! exponential constructions.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::guard;
use crate::label::Label;

struct CarrierData {
    elems: Vec<Label>,
    index: HashMap<Label, usize>,
}

/// A finite set of labels in canonical order. Cloning is cheap.
#[derive(Clone)]
pub struct Carrier(Arc<CarrierData>);

impl Carrier {
    /// Builds a carrier; the labels are sorted and must be pairwise distinct.
    pub fn new(labels: Vec<Label>) -> Result<Carrier> {
        let mut elems = labels;
        elems.sort();
        for w in elems.windows(2) {
            if w[0] == w[1] {
                return Err(Error::Invalid(format!("duplicate element {}", w[0])));
            }
        }
        Ok(Self::from_sorted(elems))
    }

    /// Builds a carrier from labels already sorted and distinct.
    pub(crate) fn from_sorted(elems: Vec<Label>) -> Carrier {
        debug_assert!(elems.windows(2).all(|w| w[0] < w[1]), "carrier not canonical");
        let index = elems.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        Carrier(Arc::new(CarrierData { elems, index }))
    }

    pub fn empty() -> Carrier {
        Self::from_sorted(Vec::new())
    }

    /// The one-element carrier `{*}`.
    pub fn unit() -> Carrier {
        Self::from_sorted(vec![Label::Unit])
    }

    /// `{0, 1, ..., n-1}` as natural-number labels.
    pub fn range(n: usize) -> Carrier {
        Self::from_sorted((0..n as u64).map(Label::Nat).collect())
    }

    /// A carrier of named symbols.
    pub fn symbols(names: &[&str]) -> Result<Carrier> {
        Self::new(names.iter().map(|s| Label::sym(s)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.elems.is_empty()
    }

    pub fn elements(&self) -> &[Label] {
        &self.0.elems
    }

    pub fn label(&self, i: usize) -> &Label {
        &self.0.elems[i]
    }

    pub fn index_of(&self, l: &Label) -> Option<usize> {
        self.0.index.get(l).copied()
    }

    /// Like `index_of` but reports an unknown label as an error.
    pub fn require(&self, l: &Label) -> Result<usize> {
        self.index_of(l).ok_or_else(|| Error::UnknownLabel(l.clone()))
    }

    pub fn contains(&self, l: &Label) -> bool {
        self.0.index.contains_key(l)
    }
}

impl PartialEq for Carrier {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.elems == other.0.elems
    }
}

impl Eq for Carrier {}

impl fmt::Debug for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, l) in self.elements().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}

/// A total function between carriers, stored as an index table.
#[derive(Clone, PartialEq, Eq)]
pub struct Map {
    dom: Carrier,
    cod: Carrier,
    table: Vec<usize>,
}

impl Map {
    /// Builds a map from an index table.
    pub fn from_indices(dom: Carrier, cod: Carrier, table: Vec<usize>) -> Result<Map> {
        if table.len() != dom.len() {
            return Err(Error::Invalid(format!("map table has {} entries for a domain of {}", table.len(), dom.len())));
        }
        if let Some(&bad) = table.iter().find(|&&j| j >= cod.len()) {
            return Err(Error::Invalid(format!("map image index {bad} outside codomain of size {}", cod.len())));
        }
        Ok(Map { dom, cod, table })
    }

    /// Builds a map from label pairs; every domain element must appear once.
    pub fn from_pairs(dom: Carrier, cod: Carrier, pairs: &[(Label, Label)]) -> Result<Map> {
        let mut table = vec![usize::MAX; dom.len()];
        for (a, b) in pairs {
            let i = dom.require(a)?;
            let j = cod.require(b)?;
            if table[i] != usize::MAX && table[i] != j {
                return Err(Error::Invalid(format!("map assigns {a} twice")));
            }
            table[i] = j;
        }
        if let Some(i) = table.iter().position(|&j| j == usize::MAX) {
            return Err(Error::Invalid(format!("map undefined on {}", dom.label(i))));
        }
        Ok(Map { dom, cod, table })
    }

    pub fn from_fn(dom: Carrier, cod: Carrier, f: impl Fn(usize) -> usize) -> Map {
        let table = (0..dom.len()).map(f).collect();
        Map { dom, cod, table }
    }

    pub fn identity(c: &Carrier) -> Map {
        Map { dom: c.clone(), cod: c.clone(), table: (0..c.len()).collect() }
    }

    pub fn dom(&self) -> &Carrier {
        &self.dom
    }

    pub fn cod(&self) -> &Carrier {
        &self.cod
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn at(&self, i: usize) -> usize {
        self.table[i]
    }

    /// Applies the map to a label of the domain.
    pub fn apply(&self, l: &Label) -> Result<&Label> {
        let i = self.dom.require(l)?;
        Ok(self.cod.label(self.table[i]))
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &Map) -> Result<Map> {
        if self.cod != g.dom {
            return Err(Error::Invalid("composition of maps with mismatched carriers".into()));
        }
        Ok(Map { dom: self.dom.clone(), cod: g.cod.clone(), table: self.table.iter().map(|&j| g.table[j]).collect() })
    }

    /// Label pairs in domain order.
    pub fn pairs(&self) -> Vec<(Label, Label)> {
        self.table.iter().enumerate().map(|(i, &j)| (self.dom.label(i).clone(), self.cod.label(j).clone())).collect()
    }
}

impl fmt::Debug for Map {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (a, b)) in self.pairs().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a} -> {b}")?;
        }
        write!(f, "}}")
    }
}

/// Injectivity and surjectivity of a map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MapClass {
    pub injective: bool,
    pub surjective: bool,
}

pub fn classify_map(f: &Map) -> MapClass {
    let mut hit = vec![0usize; f.cod.len()];
    for &j in &f.table {
        hit[j] += 1;
    }
    MapClass { injective: hit.iter().all(|&h| h <= 1), surjective: hit.iter().all(|&h| h >= 1) }
}

/// A product carrier with its projections.
pub struct Product {
    pub carrier: Carrier,
    pub fst: Map,
    pub snd: Map,
}

/// `S × T`, pairs in lexicographic order. The pair `(s, t)` has index
/// `s * |T| + t`.
pub fn mk_product(s: &Carrier, t: &Carrier) -> Result<Product> {
    let n = guard::check_size("product", s.len() as u128 * t.len() as u128)?;
    let mut elems = Vec::with_capacity(n);
    for a in s.elements() {
        for b in t.elements() {
            elems.push(Label::pair(a.clone(), b.clone()));
        }
    }
    let carrier = Carrier::from_sorted(elems);
    let tl = t.len().max(1);
    let fst = Map::from_fn(carrier.clone(), s.clone(), |i| i / tl);
    let snd = Map::from_fn(carrier.clone(), t.clone(), |i| i % tl);
    Ok(Product { carrier, fst, snd })
}

/// A coproduct carrier with its injections.
pub struct Coproduct {
    pub carrier: Carrier,
    pub inl: Map,
    pub inr: Map,
}

/// `S + T` as labels tagged `l` and `r`. `inl(s)` has index `s` and `inr(t)`
/// has index `|S| + t`.
pub fn mk_coproduct(s: &Carrier, t: &Carrier) -> Result<Coproduct> {
    guard::check_size("coproduct", s.len() as u128 + t.len() as u128)?;
    let mut elems: Vec<Label> = s.elements().iter().map(|a| Label::tagged("l", a.clone())).collect();
    elems.extend(t.elements().iter().map(|b| Label::tagged("r", b.clone())));
    let carrier = Carrier::from_sorted(elems);
    let inl = Map::from_fn(s.clone(), carrier.clone(), |i| i);
    let sl = s.len();
    let inr = Map::from_fn(t.clone(), carrier.clone(), |j| sl + j);
    Ok(Coproduct { carrier, inl, inr })
}

/// The function space `[S, T]` with functions indexed in canonical order.
///
/// A function is a table `f[s]`; its index is the mixed-radix number with the
/// first domain element most significant, which matches the canonical order
/// of the tuple labels `[f(s0), f(s1), ...]`.
#[derive(Clone, Debug)]
pub struct FunctionSpace {
    pub dom: Carrier,
    pub cod: Carrier,
    count: usize,
}

impl FunctionSpace {
    pub fn new(dom: &Carrier, cod: &Carrier) -> Result<FunctionSpace> {
        let count = guard::check_hom_set(
            &format!("[{} elements, {} elements]", dom.len(), cod.len()),
            guard::pow_sat(cod.len(), dom.len()),
        )?;
        Ok(FunctionSpace { dom: dom.clone(), cod: cod.clone(), count })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn decode(&self, mut idx: usize) -> Vec<usize> {
        let n = self.dom.len();
        let b = self.cod.len();
        let mut out = vec![0; n];
        for slot in out.iter_mut().rev() {
            *slot = idx % b;
            idx /= b;
        }
        out
    }

    pub fn encode(&self, table: &[usize]) -> usize {
        let b = self.cod.len();
        table.iter().fold(0usize, |acc, &v| acc * b + v)
    }

    pub fn label_of(&self, table: &[usize]) -> Label {
        Label::Tuple(table.iter().map(|&j| self.cod.label(j).clone()).collect())
    }

    /// The carrier of all functions as tuple labels.
    pub fn carrier(&self) -> Carrier {
        Carrier::from_sorted((0..self.count).map(|i| self.label_of(&self.decode(i))).collect())
    }
}

/// Iterates over all tables `[0, b)^n` in lexicographic order.
pub struct Odometer {
    digits: Vec<usize>,
    base: usize,
    started: bool,
    done: bool,
}

impl Odometer {
    pub fn new(n: usize, base: usize) -> Odometer {
        Odometer { digits: vec![0; n], base, started: false, done: base == 0 && n > 0 }
    }

    /// Advances and returns the next table, or `None` when exhausted.
    pub fn next_table(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.digits);
        }
        for i in (0..self.digits.len()).rev() {
            self.digits[i] += 1;
            if self.digits[i] < self.base {
                return Some(&self.digits);
            }
            self.digits[i] = 0;
        }
        self.done = true;
        None
    }
}

/// All total functions `S → T` in canonical order.
pub fn enumerate_functions(s: &Carrier, t: &Carrier) -> Result<Vec<Map>> {
    let space = FunctionSpace::new(s, t)?;
    let mut out = Vec::with_capacity(space.count());
    let mut odo = Odometer::new(s.len(), t.len());
    while let Some(tab) = odo.next_table() {
        out.push(Map { dom: s.clone(), cod: t.clone(), table: tab.to_vec() });
    }
    Ok(out)
}
