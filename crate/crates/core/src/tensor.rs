//! The measuring tensor `C ▷ A` as a leveled presentation: generators
//! `[c, a]`, free F-nodes over classes, and congruence closure of the
//! relations `[c, α(x)] ~ (q·p, w ↦ [cs[u], as[v]])`.

use std::collections::HashMap;

use crate::algebra::{same_functor, Algebra, Coalgebra};
use crate::error::{Error, Result};
use crate::functor::{FElem, Functor};
use crate::guard;
use crate::label::Label;
use crate::measuring::{measuring_rhs, Measuring};
use crate::set::{Carrier, Odometer};
use crate::term::Term;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TensorNode {
    /// The generator `[c, a]`.
    Leaf(usize, usize),
    /// A position applied to classes.
    Node(usize, Vec<usize>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TensorStatus {
    /// A full level added no class.
    Finite { levels: usize },
    /// The level budget ran out while classes were still appearing.
    Truncated { budget: usize },
}

/// Why two nodes were merged.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MergeReason {
    /// `[c, α(x)]` with the node built from `χ(c)` and `x`.
    Relation { state: usize, elem: usize },
    /// Two nodes with the same position over the same classes.
    Congruence,
}

#[derive(Clone, Debug)]
pub struct TensorPresentation {
    pub functor: Functor,
    pub coalgebra: Coalgebra,
    pub source: Algebra,
    pub nodes: Vec<TensorNode>,
    parent: Vec<usize>,
    pub merges: Vec<(usize, usize, MergeReason)>,
    pub status: TensorStatus,
    /// Class count after each level; entry 0 is after the relations.
    pub class_counts: Vec<usize>,
    /// Present when the status is finite.
    pub algebra: Option<Algebra>,
    /// Class representatives in the order of the algebra carrier.
    pub class_reps: Vec<usize>,
}

struct EGraph {
    nodes: Vec<TensorNode>,
    parent: Vec<usize>,
    table: HashMap<(usize, Vec<usize>), usize>,
    merges: Vec<(usize, usize, MergeReason)>,
}

impl EGraph {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize, why: MergeReason) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        self.merges.push((a, b, why));
        true
    }

    fn intern(&mut self, pos: usize, children: Vec<usize>) -> usize {
        let key: (usize, Vec<usize>) = (pos, children.iter().map(|&c| self.find(c)).collect());
        if let Some(&id) = self.table.get(&key) {
            return self.find(id);
        }
        let id = self.nodes.len();
        self.nodes.push(TensorNode::Node(pos, key.1.clone()));
        self.parent.push(id);
        self.table.insert(key, id);
        id
    }

    /// Restores the hash-consing invariant, merging congruent nodes.
    fn rebuild(&mut self) {
        loop {
            let mut fresh: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let mut pending = Vec::new();
            for id in 0..self.nodes.len() {
                if let TensorNode::Node(p, ch) = self.nodes[id].clone() {
                    let key = (p, ch.iter().map(|&c| self.find(c)).collect::<Vec<_>>());
                    match fresh.get(&key) {
                        Some(&other) => pending.push((other, id)),
                        None => {
                            fresh.insert(key, id);
                        }
                    }
                }
            }
            let mut changed = false;
            for (a, b) in pending {
                changed |= self.union(a, b, MergeReason::Congruence);
            }
            self.table = fresh;
            if !changed {
                return;
            }
        }
    }

    fn classes(&mut self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.find(i) == i).collect()
    }
}

/// Builds the presentation level by level, for at most `budget` levels.
pub fn measuring_tensor(c: &Coalgebra, a: &Algebra, budget: usize) -> Result<TensorPresentation> {
    same_functor(c.functor(), a.functor(), "coalgebra and algebra")?;
    let f = a.functor().clone();
    let na = a.len();
    let mut g = EGraph { nodes: Vec::new(), parent: Vec::new(), table: HashMap::new(), merges: Vec::new() };
    for s in 0..c.len() {
        for x in 0..na {
            g.nodes.push(TensorNode::Leaf(s, x));
            g.parent.push(s * na + x);
        }
    }
    let shape = a.shape();
    for i in 0..shape.len() {
        let x = shape.decode(i);
        let ax = a.act_index(i);
        for s in 0..c.len() {
            let (pos, args) = measuring_rhs(c, s, &x);
            let node = g.intern(pos, args.iter().map(|&(cc, aa)| cc * na + aa).collect());
            g.union(s * na + ax, node, MergeReason::Relation { state: s, elem: i });
        }
    }
    g.rebuild();
    let mut class_counts = vec![g.classes().len()];
    let mut status = TensorStatus::Truncated { budget };
    for level in 1..=budget {
        let classes = g.classes();
        let before = classes.len();
        let mut total: u128 = before as u128;
        for p in 0..f.num_positions() {
            total += guard::pow_sat(classes.len(), f.arity(p));
        }
        guard::check_size("measuring tensor level", total)?;
        for p in 0..f.num_positions() {
            let mut odo = Odometer::new(f.arity(p), classes.len());
            while let Some(t) = odo.next_table() {
                let ch: Vec<usize> = t.iter().map(|&k| classes[k]).collect();
                g.intern(p, ch);
            }
        }
        g.rebuild();
        let after = g.classes().len();
        class_counts.push(after);
        if after == before {
            status = TensorStatus::Finite { levels: level };
            break;
        }
    }
    let mut class_reps = g.classes();
    let mut algebra = None;
    if let TensorStatus::Finite { .. } = status {
        let labels: Vec<Label> = class_reps.iter().map(|&r| node_label(&mut g, r, c, a)).collect();
        let carrier = Carrier::new(labels.clone())?;
        let mut ordered = vec![0; class_reps.len()];
        for (k, l) in labels.iter().enumerate() {
            ordered[carrier.index_of(l).expect("present")] = class_reps[k];
        }
        class_reps = ordered;
        let pos_of: HashMap<usize, usize> = class_reps.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let mut table = HashMap::new();
        for (key, &id) in g.table.clone().iter() {
            let r = g.find(id);
            table.insert(key.clone(), pos_of[&r]);
        }
        algebra = Some(Algebra::from_fn(&f, carrier, |e: &FElem| {
            let key = (e.pos, e.args.iter().map(|&i| class_reps[i]).collect::<Vec<_>>());
            table[&key]
        })?);
    }
    Ok(TensorPresentation {
        functor: f,
        coalgebra: c.clone(),
        source: a.clone(),
        nodes: g.nodes.clone(),
        parent: (0..g.nodes.len()).map(|i| g.find(i)).collect(),
        merges: g.merges,
        status,
        class_counts,
        algebra,
        class_reps,
    })
}

fn node_label(g: &mut EGraph, id: usize, c: &Coalgebra, a: &Algebra) -> Label {
    match g.nodes[id].clone() {
        TensorNode::Leaf(s, x) => {
            Label::tagged("gen", Label::pair(c.carrier().label(s).clone(), a.carrier().label(x).clone()))
        }
        TensorNode::Node(p, ch) => {
            let f = a.functor().clone();
            let kids = ch
                .iter()
                .map(|&k| {
                    let r = g.find(k);
                    node_label(g, r, c, a)
                })
                .collect();
            Label::pair(f.position_label(p).clone(), Label::Tuple(kids))
        }
    }
}

impl TensorPresentation {
    pub fn class_of(&self, node: usize) -> usize {
        self.parent[node]
    }

    pub fn num_classes(&self) -> usize {
        (0..self.nodes.len()).filter(|&i| self.parent[i] == i).count()
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.status, TensorStatus::Finite { .. })
    }

    /// Index in the algebra carrier of the class of `[c, a]`.
    pub fn generator_class(&self, c: usize, a: usize) -> Option<usize> {
        let r = self.parent[c * self.source.len() + a];
        self.class_reps.iter().position(|&x| x == r)
    }

    /// Replays every relation and congruence on the final classes and
    /// reports the first pair that would still merge.
    pub fn closure_violation(&self) -> Option<(usize, usize)> {
        let mut seen: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        for (id, n) in self.nodes.iter().enumerate() {
            if let TensorNode::Node(p, ch) = n {
                let key = (*p, ch.iter().map(|&k| self.parent[k]).collect::<Vec<_>>());
                if let Some(&other) = seen.get(&key) {
                    if self.parent[other] != self.parent[id] {
                        return Some((other, id));
                    }
                } else {
                    seen.insert(key, id);
                }
            }
        }
        let na = self.source.len();
        let shape = self.source.shape();
        for i in 0..shape.len() {
            let x = shape.decode(i);
            let ax = self.source.act_index(i);
            for s in 0..self.coalgebra.len() {
                let (pos, args) = measuring_rhs(&self.coalgebra, s, &x);
                let key = (pos, args.iter().map(|&(cc, aa)| self.parent[cc * na + aa]).collect::<Vec<_>>());
                match seen.get(&key) {
                    Some(&node) if self.parent[node] == self.parent[s * na + ax] => {}
                    Some(&node) => return Some((s * na + ax, node)),
                    None => return Some((s * na + ax, usize::MAX)),
                }
            }
        }
        None
    }
}

/// A class whose members evaluate differently under a candidate measuring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeConflict {
    pub class: usize,
    pub first: (usize, usize),
    pub second: (usize, usize),
}

/// The algebra hom `C ▷ A → B` induced by `φ`, as values per node class
/// representative in `class_reps` order. A conflict means `φ` is not a
/// measuring.
pub fn tensor_universal_map(phi: &Measuring, p: &TensorPresentation) -> Result<std::result::Result<Vec<usize>, MergeConflict>> {
    if phi.source != p.source || phi.coalgebra.table() != p.coalgebra.table() {
        return Err(Error::Invalid("measuring and presentation differ in C or A".into()));
    }
    let b = &phi.target;
    let mut value: Vec<Option<usize>> = vec![None; p.nodes.len()];
    let mut class_val: HashMap<usize, (usize, usize)> = HashMap::new();
    for id in 0..p.nodes.len() {
        let v = match &p.nodes[id] {
            TensorNode::Leaf(s, x) => phi.at(*s, *x),
            TensorNode::Node(pos, ch) => {
                let args: Option<Vec<usize>> = ch.iter().map(|&k| class_val.get(&p.parent[k]).map(|x| x.0)).collect();
                match args {
                    Some(args) => b.act_parts(*pos, &args),
                    None => continue,
                }
            }
        };
        value[id] = Some(v);
        let r = p.parent[id];
        match class_val.get(&r) {
            None => {
                class_val.insert(r, (v, id));
            }
            Some(&(w, first)) if w != v => {
                return Ok(Err(MergeConflict { class: r, first: (first, w), second: (id, v) }));
            }
            _ => {}
        }
    }
    Ok(Ok(p.class_reps.iter().map(|r| class_val.get(r).map_or(usize::MAX, |x| x.0)).collect()))
}

/// Expands `[c, a]` by rewriting generators along the least `α`-preimage,
/// for at most `depth` levels; remaining generators stay as variables.
pub fn normal_form(c: &Coalgebra, a: &Algebra, state: usize, elem: usize, depth: usize) -> Term {
    let shape = a.shape();
    let mut least: Vec<Option<usize>> = vec![None; a.len()];
    for i in 0..shape.len() {
        let t = a.act_index(i);
        if least[t].is_none() {
            least[t] = Some(i);
        }
    }
    fn go(c: &Coalgebra, a: &Algebra, least: &[Option<usize>], s: usize, x: usize, d: usize) -> Term {
        match least[x] {
            Some(i) if d > 0 => {
                let e = a.shape().decode(i);
                let (pos, args) = measuring_rhs(c, s, &e);
                Term::node(pos, args.iter().map(|&(cc, aa)| go(c, a, least, cc, aa, d - 1)).collect())
            }
            _ => Term::var(Label::pair(c.carrier().label(s).clone(), a.carrier().label(x).clone())),
        }
    }
    go(c, a, &least, state, elem, depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{algebra_homs, enumerate_algebras, enumerate_coalgebras};
    use crate::builtin::{const_monoid, list_f, maybe, unit_f};
    use crate::functor::PositionMonoid;
    use crate::measuring::{enumerate_measurings, Strategy};
    use crate::stock::{empty_coalgebra, list_alg, list_coalg, std_alg, std_coalg};

    /// `((C × A) + X) / ((c, α(x)) ~ χ(c)·x)` by direct union-find.
    fn const_monoid_oracle(m: &PositionMonoid, c: &Coalgebra, a: &Algebra) -> usize {
        let (nc, na, nx) = (c.len(), a.len(), m.len());
        let mut parent: Vec<usize> = (0..nc * na + nx).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for s in 0..nc {
            for x in 0..nx {
                let l = s * na + a.act_parts(x, &[]);
                let r = nc * na + m.mul(c.pos(s), x);
                let (rl, rr) = (find(&mut parent, l), find(&mut parent, r));
                parent[rl] = rr;
            }
        }
        (0..parent.len()).filter(|&i| find(&mut parent, i) == i).count()
    }

    #[test]
    fn const_monoid_pushout_and_adjunction() {
        let m = PositionMonoid::cyclic(2);
        let f = const_monoid(&m);
        let cs = enumerate_coalgebras(&f, 2).unwrap();
        let algs = enumerate_algebras(&f, 2).unwrap();
        for c in &cs {
            for a in &algs {
                let p = measuring_tensor(c, a, 6).unwrap();
                assert!(p.is_finite());
                assert_eq!(p.num_classes(), const_monoid_oracle(&m, c, a));
                assert_eq!(p.closure_violation(), None);
                let t = p.algebra.as_ref().unwrap();
                for b in algs.iter().step_by(3) {
                    let homs = algebra_homs(t, b).unwrap().len();
                    let ms = enumerate_measurings(c, a, b, Strategy::Brute).unwrap();
                    assert_eq!(homs, ms.len());
                    for phi in &ms {
                        assert!(tensor_universal_map(phi, &p).unwrap().is_ok());
                    }
                }
            }
        }
    }

    #[test]
    fn unit_functor_identifies_constant_generators() {
        let f = unit_f();
        let a = crate::algebra::Algebra::from_fn(&f, Carrier::range(3), |_| 1).unwrap();
        let c = crate::algebra::Coalgebra::from_fn(&f, Carrier::range(2), |_| FElem { pos: 0, args: vec![] }).unwrap();
        let p = measuring_tensor(&c, &a, 6).unwrap();
        assert!(p.is_finite());
        assert_eq!(p.num_classes(), 2 * 3 - 2 + 1);
        let e = measuring_tensor(&empty_coalgebra(&f), &a, 6).unwrap();
        assert_eq!(e.num_classes(), 1);
    }

    #[test]
    fn invalid_table_conflicts() {
        let m = PositionMonoid::cyclic(2);
        let f = const_monoid(&m);
        let a = crate::algebra::Algebra::from_fn(&f, Carrier::range(2), |e| e.pos).unwrap();
        let c = crate::stock::unit_coalgebra(&f);
        let p = measuring_tensor(&c, &a, 6).unwrap();
        let bad = Measuring::new(&c, &a, &a, vec![1, 0]).unwrap();
        assert!(!bad.validated);
        assert!(tensor_universal_map(&bad, &p).unwrap().is_err());
    }

    #[test]
    fn maybe_tensor_is_truncated_for_empty_generators() {
        let f = maybe();
        let p = measuring_tensor(&empty_coalgebra(&f), &std_alg(1), 4).unwrap();
        assert_eq!(p.status, TensorStatus::Truncated { budget: 4 });
        let q = measuring_tensor(&std_coalg(1), &std_alg(1), 6).unwrap();
        assert!(q.class_counts.len() > 1);
    }

    #[test]
    fn list_normal_form_extracts_prefix() {
        let x = PositionMonoid::cyclic(2);
        let f = list_f(&x);
        let c = list_coalg(&f, 2).unwrap();
        let a = list_alg(&f, 2).unwrap();
        let s = crate::stock::list_index(c.carrier(), x.carrier(), &[1, 1]).unwrap();
        let t = crate::stock::list_index(a.carrier(), x.carrier(), &[1, 0]).unwrap();
        let nf = normal_form(&c, &a, s, t, 5);
        assert_eq!(nf.render(&f), "cons(0){cons(1){nil}}");
    }
}
