//! Polynomial endofunctors with the lax symmetric monoidal structure induced
//! by a commutative monoid of positions and fiber-zip maps.
//!
//! `F(X) = Σ_b X^{fiber(b)}`. Positions form a commutative monoid `(C, ·, e)`
//! and `zip(c, d) = Λ_{c,d} : fiber(c·d) → fiber(c) × fiber(d)`. Then
//! `∇((c,g),(d,h)) = (c·d, (g×h)∘Λ_{c,d})` and `η(*) = (e, const *)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::guard;
use crate::label::Label;
use crate::set::{mk_product, Carrier, FunctionSpace, Map};

/// A commutative monoid on a carrier, given by its multiplication table.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PositionMonoid {
    carrier: Carrier,
    table: Vec<usize>,
    unit: usize,
}

impl PositionMonoid {
    /// `table[a * n + b] = a · b`. Laws are checked by [`validate_functor`].
    pub fn new(carrier: Carrier, table: Vec<usize>, unit: usize) -> Result<PositionMonoid> {
        let n = carrier.len();
        if table.len() != n * n {
            return Err(Error::Invalid(format!("monoid table has {} entries, expected {}", table.len(), n * n)));
        }
        if table.iter().any(|&v| v >= n) || unit >= n {
            return Err(Error::Invalid("monoid table refers to a missing element".into()));
        }
        Ok(PositionMonoid { carrier, table, unit })
    }

    /// Builds a monoid from a multiplication function on indices.
    pub fn from_fn(carrier: Carrier, unit: usize, mul: impl Fn(usize, usize) -> usize) -> PositionMonoid {
        let n = carrier.len();
        let mut table = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                table.push(mul(a, b));
            }
        }
        PositionMonoid { carrier, table, unit }
    }

    /// The one-element monoid.
    pub fn trivial() -> PositionMonoid {
        PositionMonoid { carrier: Carrier::unit(), table: vec![0], unit: 0 }
    }

    /// `Z_n` under addition, elements labelled `0..n`.
    pub fn cyclic(n: usize) -> PositionMonoid {
        Self::from_fn(Carrier::range(n), 0, |a, b| (a + b) % n)
    }

    /// `{0, 1}` under conjunction, unit `1`.
    pub fn boolean_and() -> PositionMonoid {
        Self::from_fn(Carrier::range(2), 1, |a, b| a & b)
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.carrier.len() + b]
    }

    /// The multiplication as a map `carrier × carrier → carrier`.
    pub fn op_map(&self) -> Result<Map> {
        let p = mk_product(&self.carrier, &self.carrier)?;
        Map::from_indices(p.carrier, self.carrier.clone(), self.table.clone())
    }
}

/// An element of `F(X)` in index form: a position and the indices of its
/// arguments, one per fiber element in fiber order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FElem {
    pub pos: usize,
    pub args: Vec<usize>,
}

/// Index arithmetic for `F(X)` with `|X| = n`.
///
/// Elements are ordered by position, then arguments lexicographically; this is
/// the canonical order of their labels.
#[derive(Clone, Debug)]
pub struct FShape {
    n: usize,
    offsets: Vec<usize>,
    arity: Vec<usize>,
    total: usize,
}

impl FShape {
    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn base(&self) -> usize {
        self.n
    }

    pub fn encode(&self, pos: usize, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.arity[pos]);
        let mut idx = 0usize;
        for &a in args {
            idx = idx * self.n + a;
        }
        self.offsets[pos] + idx
    }

    pub fn encode_elem(&self, e: &FElem) -> usize {
        self.encode(e.pos, &e.args)
    }

    /// Position of the element with index `idx`.
    pub fn pos_of(&self, idx: usize) -> usize {
        // The last position whose block starts at or before `idx`; empty
        // blocks share their start with the next block and are skipped.
        self.offsets.partition_point(|&o| o <= idx) - 1
    }

    pub fn decode(&self, idx: usize) -> FElem {
        let pos = self.pos_of(idx);
        let mut rest = idx - self.offsets[pos];
        let k = self.arity[pos];
        let mut args = vec![0; k];
        for slot in args.iter_mut().rev() {
            *slot = rest % self.n;
            rest /= self.n;
        }
        FElem { pos, args }
    }
}

/// A polynomial endofunctor with a lax symmetric monoidal structure.
#[derive(PartialEq, Eq)]
pub struct PolyFunctor {
    name: String,
    positions: PositionMonoid,
    fibers: Vec<Carrier>,
    zip: Vec<Vec<(usize, usize)>>,
}

/// Shared handle to a functor.
pub type Functor = Arc<PolyFunctor>;

impl fmt::Debug for PolyFunctor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyFunctor({})", self.name)
    }
}

impl PolyFunctor {
    /// Builds a functor; `zip[c * n + d]` lists `Λ_{c,d}(u)` for every `u` in
    /// `fiber(c·d)`. Shapes are checked here; laws by [`validate_functor`].
    pub fn new(
        name: &str,
        positions: PositionMonoid,
        fibers: Vec<Carrier>,
        zip: Vec<Vec<(usize, usize)>>,
    ) -> Result<Functor> {
        let n = positions.len();
        if fibers.len() != n {
            return Err(Error::Invalid(format!("{} fibers for {} positions", fibers.len(), n)));
        }
        if zip.len() != n * n {
            return Err(Error::Invalid(format!("{} zip tables for {} position pairs", zip.len(), n * n)));
        }
        for c in 0..n {
            for d in 0..n {
                let cd = positions.mul(c, d);
                let z = &zip[c * n + d];
                if z.len() != fibers[cd].len() {
                    return Err(Error::Invalid(format!(
                        "zip({}, {}) has {} entries, fiber of the product has {}",
                        positions.carrier().label(c),
                        positions.carrier().label(d),
                        z.len(),
                        fibers[cd].len()
                    )));
                }
                if z.iter().any(|&(u, v)| u >= fibers[c].len() || v >= fibers[d].len()) {
                    return Err(Error::Invalid(format!(
                        "zip({}, {}) leaves the factor fibers",
                        positions.carrier().label(c),
                        positions.carrier().label(d)
                    )));
                }
            }
        }
        Ok(Arc::new(PolyFunctor { name: name.to_string(), positions, fibers, zip }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn positions(&self) -> &PositionMonoid {
        &self.positions
    }

    pub fn num_positions(&self) -> usize {
        self.positions.len()
    }

    pub fn position_label(&self, p: usize) -> &Label {
        self.positions.carrier().label(p)
    }

    pub fn position_index(&self, l: &Label) -> Result<usize> {
        self.positions.carrier().require(l)
    }

    pub fn fiber(&self, p: usize) -> &Carrier {
        &self.fibers[p]
    }

    pub fn arity(&self, p: usize) -> usize {
        self.fibers[p].len()
    }

    pub fn unit(&self) -> usize {
        self.positions.unit()
    }

    pub fn mul(&self, c: usize, d: usize) -> usize {
        self.positions.mul(c, d)
    }

    /// `Λ_{c,d}` as a table over `fiber(c·d)`.
    pub fn zip(&self, c: usize, d: usize) -> &[(usize, usize)] {
        &self.zip[c * self.positions.len() + d]
    }

    /// Positions with an empty fiber.
    pub fn nullary_positions(&self) -> Vec<usize> {
        (0..self.num_positions()).filter(|&p| self.arity(p) == 0).collect()
    }

    /// An absorbing position with empty fiber, if any.
    pub fn zero(&self) -> Option<usize> {
        (0..self.num_positions()).find(|&z| {
            self.arity(z) == 0 && (0..self.num_positions()).all(|p| self.mul(z, p) == z && self.mul(p, z) == z)
        })
    }

    /// True when every fiber has at most one element.
    pub fn is_linear(&self) -> bool {
        self.fibers.iter().all(|f| f.len() <= 1)
    }

    /// Structural equality, with a pointer fast path.
    pub fn same(a: &Functor, b: &Functor) -> bool {
        Arc::ptr_eq(a, b) || **a == **b
    }

    /// Index arithmetic for `F(X)` with `|X| = n`, guarded.
    pub fn shape(&self, n: usize) -> Result<FShape> {
        let mut offsets = Vec::with_capacity(self.num_positions());
        let mut arity = Vec::with_capacity(self.num_positions());
        let mut total: u128 = 0;
        for p in 0..self.num_positions() {
            offsets.push(total as usize);
            arity.push(self.arity(p));
            total = total.saturating_add(guard::pow_sat(n, self.arity(p)));
            guard::check_size(&format!("{} applied to a set of {n}", self.name), total)?;
        }
        Ok(FShape { n, offsets, arity, total: total as usize })
    }

    /// The label of an F-element: `(position, [arguments])`.
    pub fn elem_label(&self, e: &FElem, x: &Carrier) -> Label {
        Label::pair(
            self.position_label(e.pos).clone(),
            Label::Tuple(e.args.iter().map(|&a| x.label(a).clone()).collect()),
        )
    }

    /// Inverse of [`elem_label`](Self::elem_label).
    pub fn parse_elem(&self, l: &Label, x: &Carrier) -> Result<FElem> {
        let bad = || Error::Invalid(format!("{l} is not an element of {} over the given carrier", self.name));
        let (p, args) = l.as_pair().ok_or_else(bad)?;
        let pos = self.position_index(p).map_err(|_| bad())?;
        let args = args.as_tuple().ok_or_else(bad)?;
        if args.len() != self.arity(pos) {
            return Err(bad());
        }
        let args = args.iter().map(|a| x.require(a)).collect::<Result<Vec<_>>>()?;
        Ok(FElem { pos, args })
    }

    /// `F(X)` as a carrier of element labels.
    pub fn apply_to_set(&self, x: &Carrier) -> Result<Carrier> {
        let shape = self.shape(x.len())?;
        Ok(Carrier::from_sorted((0..shape.len()).map(|i| self.elem_label(&shape.decode(i), x)).collect()))
    }

    /// `F(f)`: `(b, g) ↦ (b, f∘g)`.
    pub fn apply_to_map(&self, f: &Map) -> Result<Map> {
        let sx = self.shape(f.dom().len())?;
        let sy = self.shape(f.cod().len())?;
        let fx = self.apply_to_set(f.dom())?;
        let fy = self.apply_to_set(f.cod())?;
        let table = (0..sx.len())
            .map(|i| {
                let e = sx.decode(i);
                let args: Vec<usize> = e.args.iter().map(|&a| f.at(a)).collect();
                sy.encode(e.pos, &args)
            })
            .collect();
        Map::from_indices(fx, fy, table)
    }

    /// `∇` on index-form elements; arguments of the result index `X × Y` as
    /// `x * |Y| + y`.
    pub fn nabla_elem(&self, a: &FElem, b: &FElem, ysize: usize) -> FElem {
        let pos = self.mul(a.pos, b.pos);
        let args = self.zip(a.pos, b.pos).iter().map(|&(u, v)| a.args[u] * ysize + b.args[v]).collect();
        FElem { pos, args }
    }

    /// `∇_{X,Y} : F(X) × F(Y) → F(X × Y)`.
    pub fn nabla(&self, x: &Carrier, y: &Carrier) -> Result<Map> {
        let sx = self.shape(x.len())?;
        let sy = self.shape(y.len())?;
        let xy = mk_product(x, y)?.carrier;
        let sxy = self.shape(xy.len())?;
        let dom = mk_product(&self.apply_to_set(x)?, &self.apply_to_set(y)?)?.carrier;
        let cod = self.apply_to_set(&xy)?;
        let mut table = Vec::with_capacity(dom.len());
        for i in 0..sx.len() {
            let a = sx.decode(i);
            for j in 0..sy.len() {
                let b = sy.decode(j);
                table.push(sxy.encode_elem(&self.nabla_elem(&a, &b, y.len())));
            }
        }
        Map::from_indices(dom, cod, table)
    }

    /// `η : 1 → F(1)`, the unit position with constant assignment.
    pub fn eta_elem(&self) -> FElem {
        let e = self.unit();
        FElem { pos: e, args: vec![0; self.arity(e)] }
    }

    pub fn eta(&self) -> Result<Map> {
        let one = Carrier::unit();
        let s1 = self.shape(1)?;
        Map::from_indices(one.clone(), self.apply_to_set(&one)?, vec![s1.encode_elem(&self.eta_elem())])
    }

    /// `∇̃ : F([X,Y]) → [F X, F Y]`, sending `(d, (g_u))` to
    /// `(b, (a_v)) ↦ (d·b, w ↦ g_{π₁Λ(w)}(a_{π₂Λ(w)}))`.
    pub fn nabla_tilde(&self, x: &Carrier, y: &Carrier) -> Result<Map> {
        let xy = FunctionSpace::new(x, y)?;
        let sfun = self.shape(xy.count())?;
        let sx = self.shape(x.len())?;
        let sy = self.shape(y.len())?;
        let fx = self.apply_to_set(x)?;
        let fy = self.apply_to_set(y)?;
        let target = FunctionSpace::new(&fx, &fy)?;
        let dom = self.apply_to_set(&xy.carrier())?;
        let funs: Vec<Vec<usize>> = (0..xy.count()).map(|i| xy.decode(i)).collect();
        let mut table = Vec::with_capacity(sfun.len());
        for i in 0..sfun.len() {
            let d = sfun.decode(i);
            let image: Vec<usize> = (0..sx.len())
                .map(|j| {
                    let b = sx.decode(j);
                    self.nabla_tilde_apply(&d, &funs, &b, &sy)
                })
                .collect();
            table.push(target.encode(&image));
        }
        Map::from_indices(dom, target.carrier(), table)
    }

    /// Applies `∇̃(d)` to `b`, with `d`'s arguments indexing `funs`.
    pub fn nabla_tilde_apply(&self, d: &FElem, funs: &[Vec<usize>], b: &FElem, sy: &FShape) -> usize {
        let pos = self.mul(d.pos, b.pos);
        let args: Vec<usize> =
            self.zip(d.pos, b.pos).iter().map(|&(u, v)| funs[d.args[u]][b.args[v]]).collect();
        sy.encode(pos, &args)
    }
}

/// One law in a validation report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawCheck {
    pub law: String,
    pub passed: bool,
    pub witness: Option<String>,
}

/// Outcome of [`validate_functor`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub functor: String,
    pub checks: Vec<LawCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Checks the monoid laws on positions and the zip coassociativity,
/// counitality and symmetry laws, with a witness for each failure.
pub fn validate_functor(f: &PolyFunctor) -> ValidationReport {
    let n = f.num_positions();
    let pl = |p: usize| f.position_label(p).to_string();
    let mut checks = Vec::new();
    let mut record = |law: &str, witness: Option<String>| {
        checks.push(LawCheck { law: law.to_string(), passed: witness.is_none(), witness });
    };

    let mut w = None;
    'assoc: for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if f.mul(f.mul(a, b), c) != f.mul(a, f.mul(b, c)) {
                    w = Some(format!("({}, {}, {})", pl(a), pl(b), pl(c)));
                    break 'assoc;
                }
            }
        }
    }
    record("monoid associativity", w);

    let mut w = None;
    'comm: for a in 0..n {
        for b in 0..n {
            if f.mul(a, b) != f.mul(b, a) {
                w = Some(format!("({}, {})", pl(a), pl(b)));
                break 'comm;
            }
        }
    }
    record("monoid commutativity", w);

    let e = f.unit();
    let w = (0..n).find(|&a| f.mul(e, a) != a || f.mul(a, e) != a).map(pl);
    record("monoid unit", w);

    // Coassociativity: both bracketings of fiber(a·b·c) → fiber(a)×fiber(b)×fiber(c).
    let mut w = None;
    'coassoc: for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let ab = f.mul(a, b);
                let bc = f.mul(b, c);
                let abc = f.mul(ab, c);
                if abc != f.mul(a, bc) {
                    continue; // reported by the associativity law
                }
                for u in 0..f.arity(abc) {
                    let (u_ab, u_c) = f.zip(ab, c)[u];
                    let (u_a, u_b) = f.zip(a, b)[u_ab];
                    let (v_a, v_bc) = f.zip(a, bc)[u];
                    let (v_b, v_c) = f.zip(b, c)[v_bc];
                    if (u_a, u_b, u_c) != (v_a, v_b, v_c) {
                        w = Some(format!("positions ({}, {}, {}), fiber element {}", pl(a), pl(b), pl(c), f.fiber(abc).label(u)));
                        break 'coassoc;
                    }
                }
            }
        }
    }
    record("zip coassociativity", w);

    let mut w = None;
    'counit: for c in 0..n {
        if f.mul(e, c) != c || f.mul(c, e) != c {
            continue; // reported by the unit law
        }
        for u in 0..f.arity(c) {
            if f.zip(e, c)[u].1 != u || f.zip(c, e)[u].0 != u {
                w = Some(format!("position {}, fiber element {}", pl(c), f.fiber(c).label(u)));
                break 'counit;
            }
        }
    }
    record("zip counitality", w);

    let mut w = None;
    'sym: for c in 0..n {
        for d in 0..n {
            let cd = f.mul(c, d);
            if cd != f.mul(d, c) {
                continue; // reported by the commutativity law
            }
            for u in 0..f.arity(cd) {
                let (x, y) = f.zip(c, d)[u];
                if f.zip(d, c)[u] != (y, x) {
                    w = Some(format!("positions ({}, {}), fiber element {}", pl(c), pl(d), f.fiber(cd).label(u)));
                    break 'sym;
                }
            }
        }
    }
    record("zip symmetry", w);

    ValidationReport { functor: f.name().to_string(), checks }
}
