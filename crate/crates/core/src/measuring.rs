//! Measurings `φ : C × A → B`: the predicate, enumeration strategies, the
//! curried forms, the coalgebra tensor and enriched composition.
//!
//! Tables are indexed `c * |A| + a`. A measuring satisfies, for every state
//! `c` with `χ(c) = (q, cs)` and every `x = (p, as)` in `F(A)`,
//! `φ(c, α(x)) = β(q·p, w ↦ φ(cs[u], as[v]))` where `(u, v) = Λ_{q,p}(w)`.

use std::fmt;
use std::str::FromStr;

use crate::algebra::{algebra_homs, is_coalgebra_hom, same_functor, Algebra, Coalgebra};
use crate::convolution::convolution_algebra;
use crate::error::{Error, Result};
use crate::fixpoints::reachable_set;
use crate::functor::{FElem, Functor};
use crate::guard;
use crate::set::{mk_product, FunctionSpace, Map, Odometer};
use crate::stock::unit_coalgebra;

/// An F-algebra whose elements may live outside a finite carrier.
pub trait Target {
    type Value: Clone + Eq + std::hash::Hash + Ord + fmt::Debug;

    fn functor(&self) -> &Functor;

    fn act(&self, pos: usize, args: &[Self::Value]) -> Self::Value;
}

impl Target for Algebra {
    type Value = usize;

    fn functor(&self) -> &Functor {
        Algebra::functor(self)
    }

    fn act(&self, pos: usize, args: &[usize]) -> usize {
        self.act_parts(pos, args)
    }
}

/// The right-hand side `(q·p, [(cs[u], as[v])])` of the measuring square at
/// state `c` and `x`, as a position and argument pairs `(c', a')`.
pub fn measuring_rhs(c: &Coalgebra, state: usize, x: &FElem) -> (usize, Vec<(usize, usize)>) {
    let f = c.functor();
    let chi = c.step(state);
    let pos = f.mul(chi.pos, x.pos);
    let args = f.zip(chi.pos, x.pos).iter().map(|&(u, v)| (chi.args[u], x.args[v])).collect();
    (pos, args)
}

/// A failure of the measuring square.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub state: usize,
    /// Index of the offending element of `F(A)`.
    pub elem: usize,
    /// `φ(c, α(x))`.
    pub lhs: usize,
    /// `β(F(φ)(∇(χ(c), x)))`.
    pub rhs: usize,
}

fn check_compat(c: &Coalgebra, a: &Algebra, b: &Algebra) -> Result<()> {
    same_functor(c.functor(), a.functor(), "coalgebra and source algebra")?;
    same_functor(a.functor(), b.functor(), "source and target algebras")
}

/// Every violation of the measuring square, in `(state, elem)` order.
pub fn measuring_violations(c: &Coalgebra, a: &Algebra, b: &Algebra, table: &[usize]) -> Result<Vec<Violation>> {
    check_compat(c, a, b)?;
    if table.len() != c.len() * a.len() || table.iter().any(|&v| v >= b.len()) {
        return Err(Error::Invalid("measuring table does not fit C × A → B".into()));
    }
    let na = a.len();
    let mut out = Vec::new();
    let shape = a.shape();
    for i in 0..shape.len() {
        let x = shape.decode(i);
        let ax = a.act_index(i);
        for s in 0..c.len() {
            let (pos, args) = measuring_rhs(c, s, &x);
            let vals: Vec<usize> = args.iter().map(|&(cc, aa)| table[cc * na + aa]).collect();
            let rhs = b.act_parts(pos, &vals);
            let lhs = table[s * na + ax];
            if lhs != rhs {
                out.push(Violation { state: s, elem: i, lhs, rhs });
            }
        }
    }
    out.sort_by_key(|v| (v.state, v.elem));
    Ok(out)
}

pub fn is_measuring(c: &Coalgebra, a: &Algebra, b: &Algebra, table: &[usize]) -> Result<bool> {
    Ok(first_violation(c, a, b, table)?.is_none())
}

fn first_violation(c: &Coalgebra, a: &Algebra, b: &Algebra, table: &[usize]) -> Result<Option<Violation>> {
    Ok(measuring_violations(c, a, b, table)?.into_iter().next())
}

/// A validated or unvalidated measuring table.
#[derive(Clone, Debug)]
pub struct Measuring {
    pub coalgebra: Coalgebra,
    pub source: Algebra,
    pub target: Algebra,
    table: Vec<usize>,
    pub validated: bool,
}

impl PartialEq for Measuring {
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table
            && self.coalgebra.table() == other.coalgebra.table()
            && self.source == other.source
            && self.target == other.target
    }
}

impl Measuring {
    /// Wraps a table and records whether it satisfies the measuring square.
    pub fn new(c: &Coalgebra, a: &Algebra, b: &Algebra, table: Vec<usize>) -> Result<Measuring> {
        let validated = is_measuring(c, a, b, &table)?;
        Ok(Measuring { coalgebra: c.clone(), source: a.clone(), target: b.clone(), table, validated })
    }

    /// Builds a measuring from a function of `(state, element)` indices.
    pub fn from_fn(c: &Coalgebra, a: &Algebra, b: &Algebra, f: impl Fn(usize, usize) -> usize) -> Result<Measuring> {
        let table = (0..c.len()).flat_map(|s| (0..a.len()).map(move |x| (s, x))).map(|(s, x)| f(s, x)).collect();
        Measuring::new(c, a, b, table)
    }

    fn trusted(c: &Coalgebra, a: &Algebra, b: &Algebra, table: Vec<usize>) -> Measuring {
        Measuring { coalgebra: c.clone(), source: a.clone(), target: b.clone(), table, validated: true }
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn at(&self, c: usize, a: usize) -> usize {
        self.table[c * self.source.len() + a]
    }

    pub fn violations(&self) -> Result<Vec<Violation>> {
        measuring_violations(&self.coalgebra, &self.source, &self.target, &self.table)
    }

    /// The table as a map `C × A → B`.
    pub fn as_map(&self) -> Result<Map> {
        let p = mk_product(self.coalgebra.carrier(), self.source.carrier())?;
        Map::from_indices(p.carrier, self.target.carrier().clone(), self.table.clone())
    }

    /// `φ̃ : C → [A, B]`, the C-indexed partial homomorphism.
    pub fn partial_hom(&self) -> Result<Map> {
        let space = FunctionSpace::new(self.source.carrier(), self.target.carrier())?;
        let na = self.source.len();
        let table = (0..self.coalgebra.len()).map(|c| space.encode(&self.table[c * na..(c + 1) * na])).collect();
        Map::from_indices(self.coalgebra.carrier().clone(), space.carrier(), table)
    }

    /// `φ̂ : A → [C, B]`, an algebra homomorphism into the convolution algebra
    /// exactly when `φ` is a measuring.
    pub fn conv_hom(&self) -> Result<Map> {
        let space = FunctionSpace::new(self.coalgebra.carrier(), self.target.carrier())?;
        let table = (0..self.source.len())
            .map(|a| {
                let f: Vec<usize> = (0..self.coalgebra.len()).map(|c| self.at(c, a)).collect();
                space.encode(&f)
            })
            .collect();
        Map::from_indices(self.source.carrier().clone(), space.carrier(), table)
    }

    /// Inverse of [`partial_hom`](Self::partial_hom).
    pub fn from_partial_hom(c: &Coalgebra, a: &Algebra, b: &Algebra, m: &Map) -> Result<Measuring> {
        let space = FunctionSpace::new(a.carrier(), b.carrier())?;
        if m.dom().len() != c.len() || m.cod().len() != space.count() {
            return Err(Error::Invalid("map is not of type C → [A, B]".into()));
        }
        let table = (0..c.len()).flat_map(|s| space.decode(m.at(s))).collect();
        Measuring::new(c, a, b, table)
    }

    /// Inverse of [`conv_hom`](Self::conv_hom).
    pub fn from_conv_hom(c: &Coalgebra, a: &Algebra, b: &Algebra, m: &Map) -> Result<Measuring> {
        let space = FunctionSpace::new(c.carrier(), b.carrier())?;
        if m.dom().len() != a.len() || m.cod().len() != space.count() {
            return Err(Error::Invalid("map is not of type A → [C, B]".into()));
        }
        let cols: Vec<Vec<usize>> = (0..a.len()).map(|x| space.decode(m.at(x))).collect();
        Measuring::from_fn(c, a, b, |s, x| cols[x][s])
    }
}

/// Enumeration strategy for `μ_C(A, B)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Brute,
    Convolution,
    Propagate,
}

impl Strategy {
    pub fn all() -> [Strategy; 3] {
        [Strategy::Brute, Strategy::Convolution, Strategy::Propagate]
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Strategy> {
        match s {
            "brute" => Ok(Strategy::Brute),
            "convolution" => Ok(Strategy::Convolution),
            "propagate" => Ok(Strategy::Propagate),
            _ => Err(Error::Invalid(format!("unknown strategy {s}; expected brute, convolution or propagate"))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Brute => "brute",
            Strategy::Convolution => "convolution",
            Strategy::Propagate => "propagate",
        })
    }
}

/// All measurings in canonical (lexicographic table) order.
pub fn enumerate_measurings(c: &Coalgebra, a: &Algebra, b: &Algebra, strategy: Strategy) -> Result<Vec<Measuring>> {
    check_compat(c, a, b)?;
    let tables = match strategy {
        Strategy::Brute => brute_tables(c, a, b)?,
        Strategy::Convolution => convolution_tables(c, a, b)?,
        Strategy::Propagate => propagate_tables(c, a, b, usize::MAX)?,
    };
    Ok(tables.into_iter().map(|t| Measuring::trusted(c, a, b, t)).collect())
}

/// Number of measurings, stopping at `limit`.
pub fn count_measurings(c: &Coalgebra, a: &Algebra, b: &Algebra, limit: usize) -> Result<usize> {
    check_compat(c, a, b)?;
    Ok(propagate_tables(c, a, b, limit)?.len())
}

fn brute_tables(c: &Coalgebra, a: &Algebra, b: &Algebra) -> Result<Vec<Vec<usize>>> {
    let n = c.len() * a.len();
    guard::check_hom_set(
        "brute-force measuring candidates (the propagate strategy is not bounded by this guard)",
        guard::pow_sat(b.len(), n),
    )?;
    let mut out = Vec::new();
    let mut odo = Odometer::new(n, b.len());
    while let Some(t) = odo.next_table() {
        if first_violation(c, a, b, t)?.is_none() {
            out.push(t.to_vec());
        }
    }
    Ok(out)
}

fn convolution_tables(c: &Coalgebra, a: &Algebra, b: &Algebra) -> Result<Vec<Vec<usize>>> {
    let conv = convolution_algebra(c, b).map_err(|e| match e {
        Error::HomSetTooLarge { what, size, bound } => Error::HomSetTooLarge {
            what: format!("{what} in the convolution strategy (the propagate strategy is not bounded by this guard)"),
            size,
            bound,
        },
        other => other,
    })?;
    let space = FunctionSpace::new(c.carrier(), b.carrier())?;
    let mut out: Vec<Vec<usize>> = algebra_homs(a, &conv.algebra)?
        .into_iter()
        .map(|h| {
            let cols: Vec<Vec<usize>> = h.iter().map(|&f| space.decode(f)).collect();
            (0..c.len()).flat_map(|s| cols.iter().map(move |col| col[s])).collect()
        })
        .collect();
    out.sort();
    Ok(out)
}

struct Constraint {
    lhs: usize,
    pos: usize,
    rhs: Vec<usize>,
}

/// Per-variable domains refined to a greatest fixed point, then a
/// depth-first read-off in variable order with ascending values.
fn propagate_tables(c: &Coalgebra, a: &Algebra, b: &Algebra, limit: usize) -> Result<Vec<Vec<usize>>> {
    let na = a.len();
    let nv = c.len() * na;
    let nb = b.len();
    let shape = a.shape();
    let mut cons = Vec::with_capacity(c.len() * shape.len());
    for i in 0..shape.len() {
        let x = shape.decode(i);
        let ax = a.act_index(i);
        for s in 0..c.len() {
            let (pos, args) = measuring_rhs(c, s, &x);
            cons.push(Constraint { lhs: s * na + ax, pos, rhs: args.iter().map(|&(cc, aa)| cc * na + aa).collect() });
        }
    }
    let mut dom = vec![vec![true; nb]; nv];
    if !refine(&mut dom, &cons, b) {
        return Ok(Vec::new());
    }
    // Constraints are checked once their last variable is assigned.
    let mut ready: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for (k, con) in cons.iter().enumerate() {
        let last = con.rhs.iter().copied().chain([con.lhs]).max().expect("nonempty");
        ready[last].push(k);
    }
    let mut out = Vec::new();
    if nv == 0 {
        out.push(Vec::new());
        return Ok(out);
    }
    let mut assign = vec![0usize; nv];
    dfs(0, &mut assign, &dom, &ready, &cons, b, limit, &mut out);
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    v: usize,
    assign: &mut Vec<usize>,
    dom: &[Vec<bool>],
    ready: &[Vec<usize>],
    cons: &[Constraint],
    b: &Algebra,
    limit: usize,
    out: &mut Vec<Vec<usize>>,
) {
    if out.len() >= limit {
        return;
    }
    if v == assign.len() {
        out.push(assign.clone());
        return;
    }
    for val in 0..dom[v].len() {
        if !dom[v][val] {
            continue;
        }
        assign[v] = val;
        let ok = ready[v].iter().all(|&k| {
            let con = &cons[k];
            let args: Vec<usize> = con.rhs.iter().map(|&r| assign[r]).collect();
            b.act_parts(con.pos, &args) == assign[con.lhs]
        });
        if ok {
            dfs(v + 1, assign, dom, ready, cons, b, limit, out);
            if out.len() >= limit {
                return;
            }
        }
    }
}

/// Generalized arc consistency on every constraint. Returns false when a
/// domain empties. Constraints whose support product exceeds a fixed bound
/// are skipped; the read-off checks them exactly.
fn refine(dom: &mut [Vec<bool>], cons: &[Constraint], b: &Algebra) -> bool {
    const MAX_TUPLES: usize = 1 << 14;
    let nb = b.len();
    loop {
        let mut changed = false;
        for con in cons {
            let mut vars: Vec<usize> = con.rhs.clone();
            vars.sort_unstable();
            vars.dedup();
            let sizes: Vec<usize> = vars.iter().map(|&v| dom[v].iter().filter(|&&x| x).count()).collect();
            let total = sizes.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s));
            let Some(total) = total else { continue };
            if total > MAX_TUPLES {
                continue;
            }
            let values: Vec<Vec<usize>> =
                vars.iter().map(|&v| (0..nb).filter(|&x| dom[v][x]).collect()).collect();
            let slot: Vec<usize> = con.rhs.iter().map(|r| vars.binary_search(r).expect("present")).collect();
            let mut sup_lhs = vec![false; nb];
            let mut sup_vars: Vec<Vec<bool>> = vars.iter().map(|_| vec![false; nb]).collect();
            let lhs_slot = vars.binary_search(&con.lhs).ok();
            if values.iter().any(Vec::is_empty) {
                return false;
            }
            let mut digits = vec![0usize; vars.len()];
            // Mixed-radix walk over the remaining values of each variable.
            'walk: loop {
                let args: Vec<usize> = slot.iter().map(|&k| values[k][digits[k]]).collect();
                let r = b.act_parts(con.pos, &args);
                let lhs_ok = match lhs_slot {
                    Some(k) => values[k][digits[k]] == r,
                    None => dom[con.lhs][r],
                };
                if lhs_ok {
                    sup_lhs[r] = true;
                    for (k, sv) in sup_vars.iter_mut().enumerate() {
                        sv[values[k][digits[k]]] = true;
                    }
                }
                let mut i = vars.len();
                loop {
                    if i == 0 {
                        break 'walk;
                    }
                    i -= 1;
                    digits[i] += 1;
                    if digits[i] < values[i].len() {
                        break;
                    }
                    digits[i] = 0;
                }
            }
            for (k, &v) in vars.iter().enumerate() {
                for x in 0..nb {
                    if dom[v][x] && !sup_vars[k][x] {
                        dom[v][x] = false;
                        changed = true;
                    }
                }
            }
            for x in 0..nb {
                if dom[con.lhs][x] && !sup_lhs[x] {
                    dom[con.lhs][x] = false;
                    changed = true;
                }
            }
            if dom[con.lhs].iter().all(|&x| !x) {
                return false;
            }
        }
        if !changed {
            return true;
        }
    }
}

/// The candidate measuring from a preinitial algebra, evaluated in any
/// target: `φ(c, a)` is computed along the representative of `a`.
#[derive(Clone, Debug)]
pub struct Candidate<V> {
    pub table: Vec<V>,
    /// First `(state, F(A) element)` where the candidate breaks the square.
    pub violation: Option<(usize, usize)>,
}

impl<V> Candidate<V> {
    pub fn is_measuring(&self) -> bool {
        self.violation.is_none()
    }
}

/// For preinitial `A` the measuring, if any, is forced; this computes it and
/// checks the square. Fails when `A` is not preinitial.
pub fn preinitial_candidate<T: Target>(c: &Coalgebra, a: &Algebra, b: &T) -> Result<Candidate<T::Value>> {
    same_functor(c.functor(), a.functor(), "coalgebra and source algebra")?;
    same_functor(a.functor(), b.functor(), "source and target algebras")?;
    let reach = reachable_set(a);
    if let Some(w) = reach.unreachable_witness() {
        return Err(Error::NotPreinitial { witness: a.carrier().label(w).clone() });
    }
    let na = a.len();
    let mut table: Vec<Option<T::Value>> = vec![None; c.len() * na];
    let shape = a.shape();
    for &x in &reach.order {
        let e = shape.decode(reach.preimage[x].expect("reached"));
        for s in 0..c.len() {
            let (pos, args) = measuring_rhs(c, s, &e);
            let vals: Vec<T::Value> =
                args.iter().map(|&(cc, aa)| table[cc * na + aa].clone().expect("argument first")).collect();
            table[s * na + x] = Some(b.act(pos, &vals));
        }
    }
    let table: Vec<T::Value> = table.into_iter().map(|v| v.expect("all reachable")).collect();
    let mut violation = None;
    'outer: for i in 0..shape.len() {
        let e = shape.decode(i);
        let ax = a.act_index(i);
        for s in 0..c.len() {
            let (pos, args) = measuring_rhs(c, s, &e);
            let vals: Vec<T::Value> = args.iter().map(|&(cc, aa)| table[cc * na + aa].clone()).collect();
            if b.act(pos, &vals) != table[s * na + ax] {
                violation = Some((s, i));
                break 'outer;
            }
        }
    }
    Ok(Candidate { table, violation })
}

/// `(∗, a) ↦ a` in `μ_𝕀(A, A)`.
pub fn identity_measuring(a: &Algebra) -> Result<Measuring> {
    let unit = unit_coalgebra(a.functor());
    Measuring::new(&unit, a, a, (0..a.len()).collect())
}

/// `D ⊗ C` on `D × C` with structure `∇ ∘ (δ × χ)`; the state `(d, c)` has
/// index `d * |C| + c`.
pub fn tensor_coalgebras(d: &Coalgebra, c: &Coalgebra) -> Result<Coalgebra> {
    same_functor(d.functor(), c.functor(), "tensor factors")?;
    let p = mk_product(d.carrier(), c.carrier())?;
    let nc = c.len();
    let f = d.functor().clone();
    Coalgebra::from_fn(&f, p.carrier, |s| f.nabla_elem(&d.step(s / nc), &c.step(s % nc), nc))
}

/// `((d, c), a) ↦ ψ(d, φ(c, a))` in `μ_{D⊗C}(A₁, A₃)`.
pub fn compose_measurings(psi: &Measuring, phi: &Measuring) -> Result<Measuring> {
    if psi.source != phi.target {
        return Err(Error::Invalid("middle algebras of the composite differ".into()));
    }
    let dc = tensor_coalgebras(&psi.coalgebra, &phi.coalgebra)?;
    let nc = phi.coalgebra.len();
    Measuring::from_fn(&dc, &phi.source, &psi.target, |s, a| psi.at(s / nc, phi.at(s % nc, a)))
}

/// `φ ∘ (u × f)` for a coalgebra hom `u : C' → C` and algebra hom
/// `f : A' → A`, followed by an algebra hom `g : B → B'`.
pub fn reindex_measuring(
    phi: &Measuring,
    u: (&Coalgebra, &[usize]),
    f: (&Algebra, &[usize]),
    g: (&Algebra, &[usize]),
) -> Result<Measuring> {
    let (c2, u) = u;
    let (a2, f) = f;
    let (b2, g) = g;
    Measuring::from_fn(c2, a2, b2, |s, x| g[phi.at(u[s], f[x])])
}

/// Whether `φ : C × C₁ → C₂` is a coalgebra hom out of `C ⊗ C₁`; returns the
/// first failing state `(c, c₁)` otherwise.
pub fn coalgebra_measuring_check(
    c: &Coalgebra,
    c1: &Coalgebra,
    c2: &Coalgebra,
    table: &[usize],
) -> Result<Option<(usize, usize)>> {
    let t = tensor_coalgebras(c, c1)?;
    if table.len() != t.len() || table.iter().any(|&v| v >= c2.len()) {
        return Err(Error::Invalid("table does not fit C × C₁ → C₂".into()));
    }
    let viol = crate::algebra::coalgebra_hom_violation(table, &t, c2)?;
    Ok(viol.map(|s| (s / c1.len(), s % c1.len())))
}

/// Checks that the associator `(E⊗D)⊗C ≅ E⊗(D⊗C)`, which is the identity on
/// indices, is a coalgebra isomorphism.
pub fn associator_is_iso(e: &Coalgebra, d: &Coalgebra, c: &Coalgebra) -> Result<bool> {
    let left = tensor_coalgebras(&tensor_coalgebras(e, d)?, c)?;
    let right = tensor_coalgebras(e, &tensor_coalgebras(d, c)?)?;
    let id: Vec<usize> = (0..left.len()).collect();
    Ok(is_coalgebra_hom(&id, &left, &right)? && is_coalgebra_hom(&id, &right, &left)?)
}

/// Checks that the unitor `D ⊗ 𝕀 ≅ D`, the identity on indices, is a
/// coalgebra isomorphism, and likewise for `𝕀 ⊗ D`.
pub fn unitors_are_iso(d: &Coalgebra) -> Result<bool> {
    let unit = unit_coalgebra(d.functor());
    let id: Vec<usize> = (0..d.len()).collect();
    let r = tensor_coalgebras(d, &unit)?;
    let l = tensor_coalgebras(&unit, d)?;
    Ok(is_coalgebra_hom(&id, &r, d)?
        && is_coalgebra_hom(&id, d, &r)?
        && is_coalgebra_hom(&id, &l, d)?
        && is_coalgebra_hom(&id, d, &l)?)
}

/// The swap `D ⊗ C → C ⊗ D` as an index table.
pub fn swap_table(d: &Coalgebra, c: &Coalgebra) -> Vec<usize> {
    let (nd, nc) = (d.len(), c.len());
    (0..nd * nc).map(|s| (s % nc) * nd + s / nc).collect()
}
