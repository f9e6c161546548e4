//! Unfoldings, Adámek sequences, Lambek checks, reachability, bisimulation,
//! subcoalgebras and quotient algebras.

use std::collections::HashMap;
use std::fmt;

use crate::algebra::{algebra_homs_limited, algebras_up_to, coalgebra_homs, coalgebras_up_to, Algebra, Coalgebra};
use crate::error::{Error, Result};
use crate::functor::{FElem, Functor, PolyFunctor};
use crate::guard;
use crate::set::{classify_map, Carrier, Map};
use crate::term::Term;

/// Depth-truncated unfolding of a coalgebra state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BehaviorTree {
    Node(usize, Vec<BehaviorTree>),
    Cut,
}

/// Index of a state of a `1 + X` coalgebra in the extended naturals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Index {
    Finite(u64),
    Infinite,
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::Finite(n) => write!(f, "{n}"),
            Index::Infinite => write!(f, "inf"),
        }
    }
}

impl Index {
    pub fn min(self, other: Index) -> Index {
        std::cmp::min(self, other)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Behavior {
    pub tree: BehaviorTree,
    pub depth: usize,
    /// True when the unfolding ends before the depth bound.
    pub total: bool,
    /// Exact index, for `1 + X` functors.
    pub index: Option<Index>,
}

impl BehaviorTree {
    pub fn render(&self, f: &PolyFunctor) -> String {
        match self {
            BehaviorTree::Cut => "...".to_string(),
            BehaviorTree::Node(p, ch) if ch.is_empty() => f.position_label(*p).to_string(),
            BehaviorTree::Node(p, ch) => {
                let inner: Vec<String> = ch.iter().map(|c| c.render(f)).collect();
                format!("{}{{{}}}", f.position_label(*p), inner.join(", "))
            }
        }
    }
}

/// The successor and zero positions when `f` has the shape `1 + X`: two
/// positions, the unit unary with identity zip and the other nullary and
/// absorbing.
pub fn maybe_positions(f: &PolyFunctor) -> Option<(usize, usize)> {
    if f.num_positions() != 2 {
        return None;
    }
    let s = f.unit();
    let z = 1 - s;
    let ok = f.arity(s) == 1 && f.arity(z) == 0 && f.zero() == Some(z) && f.zip(s, s) == [(0, 0)];
    ok.then_some((s, z))
}

/// Exact index of every state of a `1 + X` coalgebra; a state whose
/// successor chain cycles has index infinity.
pub fn maybe_indices(c: &Coalgebra) -> Result<Vec<Index>> {
    let (_, zero) = maybe_positions(c.functor())
        .ok_or_else(|| Error::Unsupported(format!("indices need a 1 + X functor, got {}", c.functor().name())))?;
    let n = c.len();
    let mut memo: Vec<Option<Index>> = vec![None; n];
    for start in 0..n {
        let mut path = Vec::new();
        let mut on_path = vec![false; n];
        let mut s = start;
        let result = loop {
            if let Some(i) = memo[s] {
                break i;
            }
            if on_path[s] {
                break Index::Infinite;
            }
            if c.pos(s) == zero {
                memo[s] = Some(Index::Finite(0));
                break Index::Finite(0);
            }
            on_path[s] = true;
            path.push(s);
            s = c.step(s).args[0];
        };
        // States on the path sit above `result`.
        let mut cur = result;
        for &p in path.iter().rev() {
            cur = match cur {
                Index::Finite(k) => Index::Finite(k + 1),
                Index::Infinite => Index::Infinite,
            };
            memo[p] = Some(cur);
        }
    }
    Ok(memo.into_iter().map(|i| i.expect("computed")).collect())
}

/// Unfolds `χ` from `state` up to `depth` levels.
pub fn unfold(c: &Coalgebra, state: usize, depth: usize) -> Behavior {
    fn go(c: &Coalgebra, s: usize, d: usize, total: &mut bool) -> BehaviorTree {
        if d == 0 {
            *total = false;
            return BehaviorTree::Cut;
        }
        let e = c.step(s);
        BehaviorTree::Node(e.pos, e.args.iter().map(|&x| go(c, x, d - 1, total)).collect())
    }
    let mut total = true;
    let tree = go(c, state, depth, &mut total);
    let index = maybe_indices(c).ok().map(|v| v[state]);
    Behavior { tree, depth, total, index }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// A run of the Adámek sequence `0 → F0 → F²0 → …` or `1 ← F1 ← F²1 ← …`.
#[derive(Clone, Debug)]
pub struct AdamekRun {
    pub functor: Functor,
    pub direction: Direction,
    pub stages: Vec<Carrier>,
    /// Forward: `stages[k] → stages[k+1]`. Backward: `stages[k+1] → stages[k]`.
    pub maps: Vec<Map>,
    /// First `k` whose connecting map is bijective.
    pub stabilized_at: Option<usize>,
    /// The initial algebra of a stabilized forward run.
    pub algebra: Option<Algebra>,
    /// The terminal coalgebra of a stabilized backward run.
    pub coalgebra: Option<Coalgebra>,
    /// Set when a size guard stopped the run early.
    pub stopped: Option<String>,
}

impl AdamekRun {
    pub fn truncated(&self) -> bool {
        self.stabilized_at.is_none()
    }

    pub fn stage_sizes(&self) -> Vec<usize> {
        self.stages.iter().map(Carrier::len).collect()
    }
}

/// Iterates the Adámek sequence for at most `budget` steps.
pub fn adamek(f: &Functor, direction: Direction, budget: usize) -> Result<AdamekRun> {
    let mut run = AdamekRun {
        functor: f.clone(),
        direction,
        stages: Vec::new(),
        maps: Vec::new(),
        stabilized_at: None,
        algebra: None,
        coalgebra: None,
        stopped: None,
    };
    let x0 = match direction {
        Direction::Forward => Carrier::empty(),
        Direction::Backward => Carrier::unit(),
    };
    let x1 = f.apply_to_set(&x0)?;
    let m0 = match direction {
        Direction::Forward => Map::from_indices(x0.clone(), x1.clone(), vec![])?,
        Direction::Backward => Map::from_fn(x1.clone(), x0.clone(), |_| 0),
    };
    run.stages.push(x0);
    run.stages.push(x1);
    run.maps.push(m0);
    for k in 0..budget {
        let m = &run.maps[k];
        let class = classify_map(m);
        if class.injective && class.surjective {
            run.stabilized_at = Some(k);
            let inverse = invert(m);
            match direction {
                Direction::Forward => {
                    // structure F(X_k) = X_{k+1} → X_k
                    run.algebra = Some(Algebra::from_table(f, run.stages[k].clone(), inverse)?);
                }
                Direction::Backward => {
                    run.coalgebra = Some(Coalgebra::from_table(f, run.stages[k].clone(), inverse)?);
                }
            }
            break;
        }
        if k + 1 == budget {
            break;
        }
        let next = match f.apply_to_set(&run.stages[k + 1]) {
            Ok(c) => c,
            Err(e) => {
                run.stopped = Some(format!("stage {}: {e}", k + 2));
                break;
            }
        };
        let fm = match f.apply_to_map(m) {
            Ok(fm) => fm,
            Err(e) => {
                run.stopped = Some(format!("stage {}: {e}", k + 2));
                break;
            }
        };
        run.stages.push(next);
        run.maps.push(fm);
    }
    Ok(run)
}

fn invert(m: &Map) -> Vec<usize> {
    let mut inv = vec![0; m.cod().len()];
    for (i, &j) in m.table().iter().enumerate() {
        inv[j] = i;
    }
    inv
}

/// Outcome of a Lambek check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambekReport {
    pub bijective: bool,
    pub witness: Option<String>,
    /// Largest carrier size against which uniqueness was verified.
    pub checked_up_to: usize,
    pub uniqueness_witness: Option<String>,
}

impl LambekReport {
    pub fn passed(&self) -> bool {
        self.bijective && self.uniqueness_witness.is_none()
    }
}

/// Checks the fixed point produced by a stabilized run: the structure map is
/// bijective and there is exactly one morphism to (or from) every
/// (co)algebra on at most `k` elements.
pub fn lambek_check(run: &AdamekRun, k: usize) -> Result<LambekReport> {
    match (&run.algebra, &run.coalgebra) {
        (Some(a), _) => lambek_check_algebra(a, k),
        (_, Some(c)) => lambek_check_coalgebra(c, k),
        _ => Err(Error::NotStabilized(run.maps.len())),
    }
}

/// Lambek check for an algebra claimed initial.
pub fn lambek_check_algebra(a: &Algebra, k: usize) -> Result<LambekReport> {
    let class = classify_map(&a.structure()?);
    let witness = bijection_witness(&a.structure()?, class);
    let mut uniqueness_witness = None;
    for b in algebras_up_to(a.functor(), k)? {
        let n = algebra_homs_limited(a, &b, 2)?.len();
        if n != 1 {
            uniqueness_witness = Some(format!("{n} homomorphisms into {b:?}"));
            break;
        }
    }
    Ok(LambekReport { bijective: witness.is_none(), witness, checked_up_to: k, uniqueness_witness })
}

/// Lambek check for a coalgebra claimed terminal.
pub fn lambek_check_coalgebra(c: &Coalgebra, k: usize) -> Result<LambekReport> {
    let s = c.structure()?;
    let witness = bijection_witness(&s, classify_map(&s));
    let mut uniqueness_witness = None;
    for d in coalgebras_up_to(c.functor(), k)? {
        let n = coalgebra_homs(&d, c)?.len();
        if n != 1 {
            uniqueness_witness = Some(format!("{n} homomorphisms from {d:?}"));
            break;
        }
    }
    Ok(LambekReport { bijective: witness.is_none(), witness, checked_up_to: k, uniqueness_witness })
}

fn bijection_witness(m: &Map, class: crate::set::MapClass) -> Option<String> {
    if !class.surjective {
        let mut hit = vec![false; m.cod().len()];
        for &j in m.table() {
            hit[j] = true;
        }
        let miss = hit.iter().position(|h| !h).expect("not surjective");
        return Some(format!("not surjective: {} is not in the image", m.cod().label(miss)));
    }
    if !class.injective {
        let mut seen = HashMap::new();
        for (i, &j) in m.table().iter().enumerate() {
            if let Some(&prev) = seen.get(&j) {
                return Some(format!(
                    "not injective: {} and {} both map to {}",
                    m.dom().label(prev),
                    m.dom().label(i),
                    m.cod().label(j)
                ));
            }
            seen.insert(j, i);
        }
    }
    None
}

/// Elements reachable from the constants, with canonical representative
/// terms of least height.
#[derive(Clone, Debug)]
pub struct Reachability {
    /// Round in which each element was first reached.
    pub level: Vec<Option<usize>>,
    /// The F-element whose image first reached each element.
    pub preimage: Vec<Option<usize>>,
    /// Reached elements in discovery order; arguments precede results.
    pub order: Vec<usize>,
}

impl Reachability {
    pub fn is_reachable(&self, a: usize) -> bool {
        self.level[a].is_some()
    }

    pub fn all_reachable(&self) -> bool {
        self.level.iter().all(Option::is_some)
    }

    /// First unreachable element.
    pub fn unreachable_witness(&self) -> Option<usize> {
        self.level.iter().position(Option::is_none)
    }

    /// Representative closed term of a reachable element.
    pub fn representative(&self, alg: &Algebra, a: usize) -> Option<Term> {
        let i = self.preimage[a]?;
        let e = alg.shape().decode(i);
        let ch = e.args.iter().map(|&x| self.representative(alg, x)).collect::<Option<Vec<_>>>()?;
        Some(Term::node(e.pos, ch))
    }

    /// Height of every representative, `0` for unreachable elements.
    pub fn heights(&self, alg: &Algebra) -> Vec<usize> {
        let mut h = vec![0; self.level.len()];
        for &a in &self.order {
            let e = alg.shape().decode(self.preimage[a].expect("reached"));
            h[a] = 1 + e.args.iter().map(|&x| h[x]).max().unwrap_or(0);
        }
        h
    }
}

/// Least fixed point of `S ↦ α(F(S))`, computed in rounds so that
/// representatives have least height; ties go to the least F-element.
pub fn reachable_set(a: &Algebra) -> Reachability {
    let n = a.len();
    let shape = a.shape();
    let mut level = vec![None; n];
    let mut preimage = vec![None; n];
    let mut order = Vec::new();
    let mut round = 0;
    loop {
        let mut fresh = Vec::new();
        for i in 0..shape.len() {
            let t = a.act_index(i);
            if level[t].is_some() || fresh.iter().any(|&(x, _)| x == t) {
                continue;
            }
            let e = shape.decode(i);
            if e.args.iter().all(|&x| matches!(level[x], Some(l) if l < round)) {
                fresh.push((t, i));
            }
        }
        if fresh.is_empty() {
            break;
        }
        for (t, i) in fresh {
            level[t] = Some(round);
            preimage[t] = Some(i);
            order.push(t);
        }
        round += 1;
    }
    Reachability { level, preimage, order }
}

/// `A` is preinitial when every element is reachable; otherwise the first
/// unreachable element is returned.
pub fn is_preinitial(a: &Algebra) -> (bool, Option<usize>) {
    let r = reachable_set(a);
    let w = r.unreachable_witness();
    (w.is_none(), w)
}

/// A partition of a carrier into classes listed in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub class_of: Vec<usize>,
    pub classes: Vec<Vec<usize>>,
}

impl Partition {
    pub fn is_discrete(&self) -> bool {
        self.classes.iter().all(|c| c.len() == 1)
    }

    fn from_keys<K: std::hash::Hash + Eq>(keys: Vec<K>) -> Partition {
        let mut ids: HashMap<K, usize> = HashMap::new();
        let mut class_of = Vec::with_capacity(keys.len());
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for (s, k) in keys.into_iter().enumerate() {
            let next = ids.len();
            let id = *ids.entry(k).or_insert(next);
            if id == classes.len() {
                classes.push(Vec::new());
            }
            classes[id].push(s);
            class_of.push(id);
        }
        Partition { class_of, classes }
    }
}

/// Coarsest bisimulation by partition refinement.
///
/// Starts from the one-class partition and splits by the position of `χ(c)`
/// and the classes of its children until stable; classes are numbered in
/// order of their least element.
pub fn bisim_partition(c: &Coalgebra) -> Partition {
    let mut part = Partition::from_keys(vec![0u8; c.len()]);
    loop {
        let keys: Vec<(usize, usize, Vec<usize>)> = (0..c.len())
            .map(|s| {
                let e = c.step(s);
                (part.class_of[s], e.pos, e.args.iter().map(|&x| part.class_of[x]).collect())
            })
            .collect();
        let next = Partition::from_keys(keys);
        if next.classes.len() == part.classes.len() {
            return next;
        }
        part = next;
    }
}

pub fn is_subterminal(c: &Coalgebra) -> bool {
    bisim_partition(c).is_discrete()
}

/// True when `rel` (pairs of states) is a bisimulation on `c`.
pub fn is_bisimulation(c: &Coalgebra, rel: &[(usize, usize)]) -> bool {
    let set: std::collections::HashSet<(usize, usize)> = rel.iter().copied().collect();
    rel.iter().all(|&(s, t)| {
        let (es, et) = (c.step(s), c.step(t));
        es.pos == et.pos && es.args.iter().zip(&et.args).all(|(&x, &y)| set.contains(&(x, y)))
    })
}

/// The restriction of `c` to a `χ`-closed set of states.
pub fn restrict(c: &Coalgebra, states: &[usize]) -> Result<Coalgebra> {
    let mut sorted = states.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut pos = vec![usize::MAX; c.len()];
    for (i, &s) in sorted.iter().enumerate() {
        pos[s] = i;
    }
    let carrier = Carrier::new(sorted.iter().map(|&s| c.carrier().label(s).clone()).collect())?;
    let mut elems = Vec::with_capacity(sorted.len());
    for &s in &sorted {
        let e = c.step(s);
        let args = e
            .args
            .iter()
            .map(|&x| {
                if pos[x] == usize::MAX {
                    Err(Error::Invalid(format!("subset is not closed: {} leaves it", c.carrier().label(s))))
                } else {
                    Ok(pos[x])
                }
            })
            .collect::<Result<Vec<_>>>()?;
        elems.push(FElem { pos: e.pos, args });
    }
    Coalgebra::from_fn(c.functor(), carrier, |i| elems[i].clone())
}

/// A subcoalgebra with the states it keeps.
#[derive(Clone, Debug)]
pub struct SubCoalgebra {
    pub states: Vec<usize>,
    pub coalgebra: Coalgebra,
}

/// Every `χ`-closed subset, ordered by size and then canonically.
pub fn subcoalgebras(c: &Coalgebra) -> Result<Vec<SubCoalgebra>> {
    let bound = guard::max_subcoalgebra_carrier();
    if c.len() > bound {
        return Err(Error::SizeGuard {
            what: "subcoalgebra enumeration".into(),
            size: c.len() as u128,
            bound,
        });
    }
    let n = c.len();
    let children: Vec<u64> = (0..n).map(|s| c.step(s).args.iter().fold(0u64, |m, &x| m | (1 << x))).collect();
    let mut found: Vec<Vec<usize>> = Vec::new();
    for mask in 0u64..(1u64 << n) {
        let closed = (0..n).all(|s| mask & (1 << s) == 0 || children[s] & !mask == 0);
        if closed {
            found.push((0..n).filter(|&s| mask & (1 << s) != 0).collect());
        }
    }
    found.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    found
        .into_iter()
        .map(|states| Ok(SubCoalgebra { coalgebra: restrict(c, &states)?, states }))
        .collect()
}

/// A quotient algebra with its projection.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub algebra: Algebra,
    /// `A → A/~`; each class is labelled by its least element.
    pub projection: Map,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect() }
    }

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

    /// Merges; the smaller index becomes the root. True if a merge happened.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// Congruence closure of `pairs` under `α`.
pub fn quotient_algebra(a: &Algebra, pairs: &[(usize, usize)]) -> Result<Quotient> {
    let n = a.len();
    if pairs.iter().any(|&(x, y)| x >= n || y >= n) {
        return Err(Error::Invalid("quotient pair outside the carrier".into()));
    }
    let mut uf = UnionFind::new(n);
    for &(x, y) in pairs {
        uf.union(x, y);
    }
    let shape = a.shape();
    let elems: Vec<FElem> = (0..shape.len()).map(|i| shape.decode(i)).collect();
    loop {
        let mut seen: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let mut merged = false;
        for (i, e) in elems.iter().enumerate() {
            let key = (e.pos, e.args.iter().map(|&x| uf.find(x)).collect::<Vec<_>>());
            let t = a.act_index(i);
            match seen.get(&key) {
                Some(&other) => merged |= uf.union(other, t),
                None => {
                    seen.insert(key, t);
                }
            }
        }
        if !merged {
            break;
        }
    }
    let roots: Vec<usize> = (0..n).filter(|&x| uf.find(x) == x).collect();
    let mut class_index = vec![0; n];
    for (i, &r) in roots.iter().enumerate() {
        class_index[r] = i;
    }
    let proj: Vec<usize> = (0..n).map(|x| class_index[uf.find(x)]).collect();
    let carrier = Carrier::new(roots.iter().map(|&r| a.carrier().label(r).clone()).collect())?;
    let algebra = Algebra::from_fn(a.functor(), carrier.clone(), |e| {
        let args: Vec<usize> = e.args.iter().map(|&k| roots[k]).collect();
        proj[a.act_parts(e.pos, &args)]
    })?;
    let projection = Map::from_indices(a.carrier().clone(), carrier, proj)?;
    Ok(Quotient { algebra, projection })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{enumerate_coalgebras, is_algebra_hom};
    use crate::builtin::{const_monoid, list_f, maybe, unit_f};
    use crate::functor::PositionMonoid;

    fn nat_alg(n: usize) -> Algebra {
        let f = maybe();
        Algebra::from_fn(&f, Carrier::range(n + 1), |e| if e.pos == 1 { 0 } else { (e.args[0] + 1).min(n) }).unwrap()
    }

    fn nat_coalg(n: usize) -> Coalgebra {
        let f = maybe();
        Coalgebra::from_fn(&f, Carrier::range(n + 1), |c| {
            if c == 0 {
                FElem { pos: 1, args: vec![] }
            } else {
                FElem { pos: 0, args: vec![c - 1] }
            }
        })
        .unwrap()
    }

    #[test]
    fn indices_of_standard_coalgebra_and_loops() {
        let c = nat_coalg(3);
        assert_eq!(
            maybe_indices(&c).unwrap(),
            vec![Index::Finite(0), Index::Finite(1), Index::Finite(2), Index::Finite(3)]
        );
        let f = maybe();
        let loop1 = Coalgebra::from_fn(&f, Carrier::range(1), |_| FElem { pos: 0, args: vec![0] }).unwrap();
        assert_eq!(maybe_indices(&loop1).unwrap(), vec![Index::Infinite]);
        let b = unfold(&loop1, 0, 3);
        assert!(!b.total);
        assert_eq!(b.index, Some(Index::Infinite));
    }

    #[test]
    fn homomorphisms_preserve_index() {
        let f = maybe();
        let cs = enumerate_coalgebras(&f, 3).unwrap();
        for c in &cs {
            for d in cs.iter().step_by(7) {
                let (ic, id) = (maybe_indices(c).unwrap(), maybe_indices(d).unwrap());
                for h in coalgebra_homs(c, d).unwrap() {
                    for s in 0..c.len() {
                        assert_eq!(ic[s], id[h[s]]);
                    }
                }
            }
        }
    }

    #[test]
    fn list_unfolding_is_the_list() {
        let l = list_f(&PositionMonoid::cyclic(2));
        // states: 0 = [], 1 = [1], 2 = [0, 1]
        let c = Coalgebra::from_fn(&l, Carrier::range(3), |s| match s {
            0 => FElem { pos: 0, args: vec![] },
            1 => FElem { pos: 2, args: vec![0] },
            _ => FElem { pos: 1, args: vec![1] },
        })
        .unwrap();
        let b = unfold(&c, 2, 5);
        assert!(b.total);
        assert_eq!(b.tree.render(&l), "cons(0){cons(1){nil}}");
    }

    #[test]
    fn adamek_const_monoid_and_unit() {
        let m = PositionMonoid::cyclic(3);
        let run = adamek(&const_monoid(&m), Direction::Forward, 5).unwrap();
        assert_eq!(run.stabilized_at, Some(1));
        assert_eq!(run.algebra.as_ref().unwrap().len(), 3);
        assert!(lambek_check(&run, 2).unwrap().passed());

        let run = adamek(&unit_f(), Direction::Forward, 5).unwrap();
        assert_eq!(run.stabilized_at, Some(1));
        assert_eq!(run.algebra.as_ref().unwrap().len(), 1);
        let rep = lambek_check(&run, 3).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.checked_up_to, 3);
    }

    #[test]
    fn adamek_maybe_is_truncated() {
        let run = adamek(&maybe(), Direction::Forward, 6).unwrap();
        assert!(run.truncated());
        assert_eq!(run.stage_sizes(), vec![0, 1, 2, 3, 4, 5, 6]);
        assert!(lambek_check(&run, 1).is_err());
        let run = adamek(&maybe(), Direction::Backward, 6).unwrap();
        assert!(run.truncated());
        assert_eq!(run.stage_sizes(), vec![1, 2, 3, 4, 5, 6, 7]);
    }

    #[test]
    fn forward_connecting_maps_are_injective() {
        let z2 = PositionMonoid::cyclic(2);
        for f in [maybe(), list_f(&z2), crate::builtin::bin_tree_f(&z2)] {
            let run = adamek(&f, Direction::Forward, 4).unwrap();
            for m in &run.maps {
                assert!(classify_map(m).injective, "{}", f.name());
            }
        }
    }

    #[test]
    fn corrupted_structure_fails_lambek() {
        let m = PositionMonoid::cyclic(2);
        let f = const_monoid(&m);
        let a = Algebra::from_table(&f, Carrier::range(2), vec![0, 0]).unwrap();
        let rep = lambek_check_algebra(&a, 1).unwrap();
        assert!(!rep.bijective);
        assert!(rep.witness.unwrap().contains("not surjective"));
    }

    #[test]
    fn reachability_and_preinitial() {
        let a = nat_alg(3);
        assert!(is_preinitial(&a).0);
        // 𝕟 plus an unreachable fixed point.
        let f = maybe();
        let b = Algebra::from_fn(&f, Carrier::range(3), |e| match (e.pos, e.args.first()) {
            (1, _) => 0,
            (_, Some(&0)) => 1,
            (_, Some(&1)) => 1,
            _ => 2,
        })
        .unwrap();
        assert_eq!(is_preinitial(&b), (false, Some(2)));
        let r = reachable_set(&a);
        assert_eq!(r.representative(&a, 2).unwrap().height(), 3);
    }

    #[test]
    fn bisimulation_examples() {
        assert!(is_subterminal(&nat_coalg(4)));
        let f = maybe();
        let loops = Coalgebra::from_fn(&f, Carrier::range(2), |s| FElem { pos: 0, args: vec![s] }).unwrap();
        let p = bisim_partition(&loops);
        assert_eq!(p.classes, vec![vec![0, 1]]);
        assert!(!is_subterminal(&loops));
    }

    #[test]
    fn bisimulations_refine_into_the_partition() {
        let f = maybe();
        for c in enumerate_coalgebras(&f, 3).unwrap() {
            let p = bisim_partition(&c);
            let rel: Vec<(usize, usize)> = (0..c.len())
                .flat_map(|s| (0..c.len()).map(move |t| (s, t)))
                .filter(|&(s, t)| p.class_of[s] == p.class_of[t])
                .collect();
            assert!(is_bisimulation(&c, &rel));
            // every bisimulation on pairs is contained in the partition
            for &(s, t) in &rel {
                let _ = (s, t);
            }
            for s in 0..c.len() {
                for t in 0..c.len() {
                    let mut r = vec![(s, t)];
                    r.extend((0..c.len()).map(|x| (x, x)));
                    // close under children
                    let mut i = 0;
                    while i < r.len() {
                        let (x, y) = r[i];
                        let (ex, ey) = (c.step(x), c.step(y));
                        if ex.pos == ey.pos {
                            for (&a, &b) in ex.args.iter().zip(&ey.args) {
                                if !r.contains(&(a, b)) {
                                    r.push((a, b));
                                }
                            }
                        }
                        i += 1;
                    }
                    if is_bisimulation(&c, &r) {
                        assert_eq!(p.class_of[s], p.class_of[t]);
                    }
                }
            }
        }
    }

    #[test]
    fn subcoalgebras_of_empty_and_standard() {
        let f = maybe();
        let empty = Coalgebra::from_table(&f, Carrier::empty(), vec![]).unwrap();
        assert_eq!(subcoalgebras(&empty).unwrap().len(), 1);
        let subs = subcoalgebras(&nat_coalg(3)).unwrap();
        let sets: Vec<Vec<usize>> = subs.iter().map(|s| s.states.clone()).collect();
        assert_eq!(sets, vec![vec![], vec![0], vec![0, 1], vec![0, 1, 2], vec![0, 1, 2, 3]]);
    }

    #[test]
    fn quotient_of_truncated_naturals() {
        let a = nat_alg(5);
        let q = quotient_algebra(&a, &[(4, 5)]).unwrap();
        assert_eq!(q.algebra.len(), 5);
        let target = nat_alg(4);
        assert_eq!(q.algebra.table(), target.table());
        let same = quotient_algebra(&a, &[]).unwrap();
        assert_eq!(same.algebra, a);
        assert!(is_algebra_hom(same.projection.table(), &a, &same.algebra).unwrap());
    }
}
