//! The initial algebra as hash-consed terms, and measurings into it solved
//! by first-order unification.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use crate::algebra::{same_functor, Algebra, Coalgebra};
use crate::error::Result;
use crate::functor::Functor;
use crate::measuring::{measuring_rhs, Target};
use crate::term::Term;

/// Handle to a closed term owned by a [`LazyInitial`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermId(u32);

impl fmt::Debug for TermId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// The initial algebra of a functor, built on demand. Equal terms share one
/// handle, so equality of values is equality of terms.
pub struct LazyInitial {
    functor: Functor,
    nodes: RefCell<Vec<(usize, Vec<TermId>)>>,
    index: RefCell<HashMap<(usize, Vec<TermId>), TermId>>,
}

impl LazyInitial {
    pub fn new(f: &Functor) -> LazyInitial {
        LazyInitial { functor: f.clone(), nodes: RefCell::new(Vec::new()), index: RefCell::new(HashMap::new()) }
    }

    pub fn intern(&self, pos: usize, args: &[TermId]) -> TermId {
        let key = (pos, args.to_vec());
        if let Some(&id) = self.index.borrow().get(&key) {
            return id;
        }
        let mut nodes = self.nodes.borrow_mut();
        let id = TermId(nodes.len() as u32);
        nodes.push(key.clone());
        self.index.borrow_mut().insert(key, id);
        id
    }

    pub fn node(&self, id: TermId) -> (usize, Vec<TermId>) {
        self.nodes.borrow()[id.0 as usize].clone()
    }

    pub fn from_term(&self, t: &Term) -> Option<TermId> {
        match t {
            Term::Var(_) => None,
            Term::Node(p, ch) => {
                let args = ch.iter().map(|c| self.from_term(c)).collect::<Option<Vec<_>>>()?;
                Some(self.intern(*p, &args))
            }
        }
    }

    pub fn term(&self, id: TermId) -> Term {
        let (p, ch) = self.node(id);
        Term::node(p, ch.into_iter().map(|c| self.term(c)).collect())
    }

    pub fn height(&self, id: TermId) -> usize {
        let (_, ch) = self.node(id);
        1 + ch.into_iter().map(|c| self.height(c)).max().unwrap_or(0)
    }

    pub fn render(&self, id: TermId) -> String {
        self.term(id).render(&self.functor)
    }

    /// Number of distinct terms created so far.
    pub fn materialized(&self) -> usize {
        self.nodes.borrow().len()
    }

    /// Cardinality of the initial algebra: `None` when infinite.
    pub fn cardinality(&self) -> Option<usize> {
        cardinality(&self.functor)
    }

    /// The two least closed terms by height, then position order.
    pub fn smallest_terms(&self, k: usize) -> Vec<TermId> {
        let f = &self.functor;
        let mut out: Vec<TermId> = f.nullary_positions().into_iter().map(|p| self.intern(p, &[])).collect();
        if out.is_empty() {
            return out;
        }
        let mut level = out.clone();
        while out.len() < k {
            let mut next = Vec::new();
            for p in 0..f.num_positions() {
                let n = f.arity(p);
                if n == 0 {
                    continue;
                }
                let mut odo = crate::set::Odometer::new(n, out.len());
                while let Some(t) = odo.next_table() {
                    let args: Vec<TermId> = t.iter().map(|&i| out[i]).collect();
                    if args.iter().any(|a| level.contains(a)) {
                        next.push(self.intern(p, &args));
                    }
                    if out.len() + next.len() >= k {
                        break;
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            out.extend(next.iter().copied());
            level = next;
        }
        out.truncate(k);
        out
    }
}

impl fmt::Debug for LazyInitial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LazyInitial({}, {} terms)", self.functor.name(), self.materialized())
    }
}

impl Target for LazyInitial {
    type Value = TermId;

    fn functor(&self) -> &Functor {
        &self.functor
    }

    fn act(&self, pos: usize, args: &[TermId]) -> TermId {
        self.intern(pos, args)
    }
}

/// `Some(n)` when the initial algebra has `n` elements, `None` when infinite.
pub fn cardinality(f: &Functor) -> Option<usize> {
    let nullary = f.nullary_positions().len();
    if nullary == 0 {
        Some(0)
    } else if nullary == f.num_positions() {
        Some(nullary)
    } else {
        None
    }
}

/// Solutions of the measuring equations into the initial algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    /// The only measuring, as a table indexed `c * |A| + a`.
    Unique(Vec<TermId>),
    /// At least two measurings; two are given.
    Multiple { examples: [Vec<TermId>; 2] },
    /// No measuring. `witness` is a `(state, F(A) element)` whose equation
    /// cannot be met, when one is responsible.
    None { witness: Option<(usize, usize)>, reason: String },
}

impl SolveOutcome {
    pub fn count_class(&self) -> &'static str {
        match self {
            SolveOutcome::Unique(_) => "unique",
            SolveOutcome::Multiple { .. } => "multiple",
            SolveOutcome::None { .. } => "none",
        }
    }
}

struct Unifier {
    parent: Vec<usize>,
    structure: Vec<Option<(usize, Vec<usize>)>>,
}

impl Unifier {
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

    /// Adds `v = pos(args)`; false on a position clash.
    fn bind(&mut self, v: usize, pos: usize, args: Vec<usize>) -> bool {
        let r = self.find(v);
        match self.structure[r].clone() {
            None => {
                self.structure[r] = Some((pos, args));
                true
            }
            Some((p, old)) => p == pos && old.into_iter().zip(args).all(|(x, y)| self.union(x, y)),
        }
    }

    fn union(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return true;
        }
        let (lo, hi) = if rx < ry { (rx, ry) } else { (ry, rx) };
        self.parent[hi] = lo;
        let sh = self.structure[hi].take();
        match (self.structure[lo].clone(), sh) {
            (_, None) => true,
            (None, Some(s)) => {
                self.structure[lo] = Some(s);
                true
            }
            (Some((p, a)), Some((q, b))) => p == q && a.into_iter().zip(b).all(|(x, y)| self.union(x, y)),
        }
    }
}

/// Solves `φ : C × A → N` into the initial algebra `N` for arbitrary `A`.
pub fn solve_into_initial(c: &Coalgebra, a: &Algebra, n: &LazyInitial) -> Result<SolveOutcome> {
    same_functor(c.functor(), a.functor(), "coalgebra and algebra")?;
    same_functor(a.functor(), n.functor(), "algebra and initial algebra")?;
    let na = a.len();
    let nv = c.len() * na;
    let mut u = Unifier { parent: (0..nv).collect(), structure: vec![None; nv] };
    let shape = a.shape();
    for i in 0..shape.len() {
        let x = shape.decode(i);
        let ax = a.act_index(i);
        for s in 0..c.len() {
            let (pos, args) = measuring_rhs(c, s, &x);
            let vars = args.iter().map(|&(cc, aa)| cc * na + aa).collect();
            if !u.bind(s * na + ax, pos, vars) {
                return Ok(SolveOutcome::None {
                    witness: Some((s, i)),
                    reason: "the equation forces two different top positions".into(),
                });
            }
        }
    }
    let roots: Vec<usize> = (0..nv).map(|v| u.find(v)).collect();
    // Occurs check by depth-first search over the structure graph.
    let mut state = vec![0u8; nv];
    fn visit(r: usize, u: &mut Unifier, state: &mut [u8]) -> bool {
        if state[r] == 2 {
            return true;
        }
        if state[r] == 1 {
            return false;
        }
        state[r] = 1;
        if let Some((_, args)) = u.structure[r].clone() {
            for x in args {
                let rx = u.find(x);
                if !visit(rx, u, state) {
                    return false;
                }
            }
        }
        state[r] = 2;
        true
    }
    for v in 0..nv {
        let r = roots[v];
        if !visit(r, &mut u, &mut state) {
            return Ok(SolveOutcome::None {
                witness: None,
                reason: format!("the equations force an infinite term at variable {v}"),
            });
        }
    }
    let mut free: Vec<usize> = (0..nv).filter(|&v| roots[v] == v && u.structure[v].is_none()).collect();
    free.sort_unstable();
    let card = cardinality(n.functor());
    if !free.is_empty() && card == Some(0) {
        return Ok(SolveOutcome::None { witness: None, reason: "the initial algebra is empty".into() });
    }
    let ground = n.smallest_terms(2);
    let build = |choice: &dyn Fn(usize) -> TermId, u: &mut Unifier| -> Vec<TermId> {
        let mut memo: HashMap<usize, TermId> = HashMap::new();
        fn eval(
            r: usize,
            u: &mut Unifier,
            n: &LazyInitial,
            choice: &dyn Fn(usize) -> TermId,
            memo: &mut HashMap<usize, TermId>,
        ) -> TermId {
            if let Some(&t) = memo.get(&r) {
                return t;
            }
            let t = match u.structure[r].clone() {
                None => choice(r),
                Some((p, args)) => {
                    let vals: Vec<TermId> = args
                        .into_iter()
                        .map(|x| {
                            let rx = u.find(x);
                            eval(rx, u, n, choice, memo)
                        })
                        .collect();
                    n.intern(p, &vals)
                }
            };
            memo.insert(r, t);
            t
        }
        (0..nv)
            .map(|v| {
                let r = u.find(v);
                eval(r, u, n, choice, &mut memo)
            })
            .collect()
    };
    if free.is_empty() {
        return Ok(SolveOutcome::Unique(build(&|_| unreachable!("no free classes"), &mut u)));
    }
    if ground.len() < 2 {
        return Ok(SolveOutcome::Unique(build(&|_| ground[0], &mut u)));
    }
    let first = free[0];
    let (g0, g1) = (ground[0], ground[1]);
    let e0 = build(&|_| g0, &mut u);
    let e1 = build(&move |r| if r == first { g1 } else { g0 }, &mut u);
    Ok(SolveOutcome::Multiple { examples: [e0, e1] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{enumerate_algebras, enumerate_coalgebras};
    use crate::builtin::{const_monoid, list_f, maybe, unit_f};
    use crate::functor::PositionMonoid;
    use crate::measuring::preinitial_candidate;
    use crate::stock::{list_alg, std_alg, std_coalg, unit_coalgebra};

    #[test]
    fn interning_shares_terms() {
        let n = LazyInitial::new(&maybe());
        let z = n.intern(1, &[]);
        let s = n.intern(0, &[z]);
        assert_eq!(n.intern(0, &[z]), s);
        assert_eq!(n.height(s), 2);
        assert_eq!(n.render(s), "Succ{Zero}");
        assert_eq!(n.from_term(&n.term(s)), Some(s));
        assert_eq!(n.cardinality(), None);
        assert_eq!(cardinality(&unit_f()), Some(1));
        assert_eq!(cardinality(&crate::builtin::id_f()), Some(0));
    }

    #[test]
    fn min_into_naturals() {
        let f = maybe();
        let n = LazyInitial::new(&f);
        for k in 0..4 {
            let cand = preinitial_candidate(&std_coalg(k), &std_alg(k), &n).unwrap();
            assert!(cand.is_measuring());
            // 𝕀 measurings from 𝕜 into ℕ are total homs: none.
            let unit = preinitial_candidate(&unit_coalgebra(&f), &std_alg(k), &n).unwrap();
            assert!(!unit.is_measuring());
            match solve_into_initial(&unit_coalgebra(&f), &std_alg(k), &n).unwrap() {
                SolveOutcome::None { .. } => {}
                other => panic!("{other:?}"),
            }
            match solve_into_initial(&std_coalg(k), &std_alg(k), &n).unwrap() {
                SolveOutcome::Unique(t) => assert_eq!(t, cand.table),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn list_has_no_total_hom_into_lists() {
        let f = list_f(&PositionMonoid::cyclic(2));
        let n = LazyInitial::new(&f);
        let a = list_alg(&f, 2).unwrap();
        let cand = preinitial_candidate(&unit_coalgebra(&f), &a, &n).unwrap();
        assert!(cand.violation.is_some());
    }

    #[test]
    fn solver_agrees_with_candidate_on_preinitial_algebras() {
        let f = maybe();
        let n = LazyInitial::new(&f);
        let cs = enumerate_coalgebras(&f, 2).unwrap();
        for a in enumerate_algebras(&f, 2).unwrap().iter().filter(|a| crate::fixpoints::is_preinitial(a).0) {
            for c in &cs {
                let cand = preinitial_candidate(c, a, &n).unwrap();
                let sol = solve_into_initial(c, a, &n).unwrap();
                match sol {
                    SolveOutcome::Unique(t) => {
                        assert!(cand.is_measuring());
                        assert_eq!(t, cand.table);
                    }
                    SolveOutcome::None { .. } => assert!(!cand.is_measuring()),
                    SolveOutcome::Multiple { .. } => panic!("preinitial source has at most one measuring"),
                }
            }
        }
    }

    #[test]
    fn free_variables_give_multiple_solutions() {
        let f = maybe();
        let n = LazyInitial::new(&f);
        let c = crate::stock::empty_coalgebra(&f);
        assert_eq!(solve_into_initial(&c, &std_alg(1), &n).unwrap(), SolveOutcome::Unique(vec![]));
        // Element 2 is outside the image of α, so φ(*, 1) is unconstrained.
        let m = PositionMonoid::cyclic(2);
        let g = const_monoid(&m);
        let ng = LazyInitial::new(&g);
        let a = crate::algebra::Algebra::from_fn(&g, crate::set::Carrier::range(3), |e| e.pos).unwrap();
        match solve_into_initial(&unit_coalgebra(&g), &a, &ng).unwrap() {
            SolveOutcome::Multiple { examples } => assert_ne!(examples[0], examples[1]),
            other => panic!("{other:?}"),
        }
    }
}
