//! Mixed measurings: an F-coalgebra measuring between G-algebras, given an
//! F-module structure `F(X) × G(Y) → G(X × Y)` on G.

use crate::algebra::{Algebra, Coalgebra};
use crate::error::{Error, Result};
use crate::functor::{FElem, Functor, PolyFunctor};
use crate::guard;
use crate::label::Label;
use crate::set::{Carrier, FunctionSpace, Odometer};

/// A module map presented on positions: `act(d, q)` is the result position
/// and `zip(d, q)[w] = (v, u)` sends its fiber into `fiber_F(d) × fiber_G(q)`.
#[derive(Clone, Debug)]
pub struct ModuleMap {
    pub f: Functor,
    pub g: Functor,
    act: Vec<usize>,
    zip: Vec<Vec<(usize, usize)>>,
}

impl ModuleMap {
    pub fn new(f: &Functor, g: &Functor, act: Vec<usize>, zip: Vec<Vec<(usize, usize)>>) -> Result<ModuleMap> {
        let n = f.num_positions() * g.num_positions();
        if act.len() != n || zip.len() != n {
            return Err(Error::Invalid(format!("module map needs {n} entries")));
        }
        for d in 0..f.num_positions() {
            for q in 0..g.num_positions() {
                let k = d * g.num_positions() + q;
                let r = act[k];
                if r >= g.num_positions() || zip[k].len() != g.arity(r) {
                    return Err(Error::Invalid(format!("module map entry ({d}, {q}) has the wrong fiber")));
                }
                if zip[k].iter().any(|&(v, u)| v >= f.arity(d) || u >= g.arity(q)) {
                    return Err(Error::Invalid(format!("module map entry ({d}, {q}) leaves its fibers")));
                }
            }
        }
        Ok(ModuleMap { f: f.clone(), g: g.clone(), act, zip })
    }

    /// The module structure of F over itself given by `∇`.
    pub fn from_nabla(f: &Functor) -> ModuleMap {
        let n = f.num_positions();
        let mut act = Vec::with_capacity(n * n);
        let mut zip = Vec::with_capacity(n * n);
        for d in 0..n {
            for q in 0..n {
                act.push(f.mul(d, q));
                zip.push(f.zip(d, q).to_vec());
            }
        }
        ModuleMap { f: f.clone(), g: f.clone(), act, zip }
    }

    pub fn act(&self, d: usize, q: usize) -> usize {
        self.act[d * self.g.num_positions() + q]
    }

    pub fn fiber_zip(&self, d: usize, q: usize) -> &[(usize, usize)] {
        &self.zip[d * self.g.num_positions() + q]
    }

    /// Applies the map to index-form elements; result arguments index
    /// `X × Y` as `x * |Y| + y`.
    pub fn apply(&self, x: &FElem, y: &FElem, ysize: usize) -> FElem {
        let pos = self.act(x.pos, y.pos);
        let args = self.fiber_zip(x.pos, y.pos).iter().map(|&(v, u)| x.args[v] * ysize + y.args[u]).collect();
        FElem { pos, args }
    }
}

/// The module map on `G = H ∘ F` (built by `compose(h, f)`), namely
/// `F(X) × H(F(Y)) → H(F(X) × F(Y)) → H(F(X × Y))` by strength then `H(∇)`.
pub fn derive_module_map(f: &Functor, h: &Functor, g: &Functor) -> Result<ModuleMap> {
    let missing = || Error::Invalid(format!("{} is not the composite of {} after {}", g.name(), h.name(), f.name()));
    let mut act = Vec::new();
    let mut zip = Vec::new();
    let mut decomposed = Vec::with_capacity(g.num_positions());
    for q in 0..g.num_positions() {
        let (hl, fls) = match g.position_label(q) {
            Label::Pair(hl, rest) => match rest.as_ref() {
                Label::Tuple(fls) => ((**hl).clone(), fls.clone()),
                _ => return Err(missing()),
            },
            _ => return Err(missing()),
        };
        let hp = h.position_index(&hl).map_err(|_| missing())?;
        let hv = fls.iter().map(|l| f.position_index(l)).collect::<Result<Vec<_>>>().map_err(|_| missing())?;
        if hv.len() != h.arity(hp) {
            return Err(missing());
        }
        decomposed.push((hl, hp, hv));
    }
    for d in 0..f.num_positions() {
        for (q, (hl, hp, hv)) in decomposed.iter().enumerate() {
            let prod: Vec<usize> = hv.iter().map(|&p| f.mul(d, p)).collect();
            let label = Label::pair(hl.clone(), Label::Tuple(prod.iter().map(|&p| f.position_label(p).clone()).collect()));
            let r = g.position_index(&label).map_err(|_| missing())?;
            let mut z = Vec::with_capacity(g.arity(r));
            for w in 0..g.arity(r) {
                let (ul, vl) = match g.fiber(r).label(w) {
                    Label::Pair(ul, vl) => ((**ul).clone(), (**vl).clone()),
                    _ => return Err(missing()),
                };
                let u = h.fiber(*hp).require(&ul)?;
                let v = f.fiber(prod[u]).require(&vl)?;
                let (v1, v2) = f.zip(d, hv[u])[v];
                let inner = Label::pair(ul, f.fiber(hv[u]).label(v2).clone());
                z.push((v1, g.fiber(q).require(&inner)?));
            }
            act.push(r);
            zip.push(z);
        }
    }
    ModuleMap::new(f, g, act, zip)
}

/// A failing instance of a module law.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleLawFailure {
    /// `m(η, y) ≠ y`.
    Unit { y: FElem },
    /// `m(x, m(x', y)) ≠ m(∇(x, x'), y)`.
    Assoc { x: FElem, x2: FElem, y: FElem },
}

/// Checks the unit and associativity squares on carriers of size `n`.
pub fn module_law_check(m: &ModuleMap, n: usize) -> Result<Option<ModuleLawFailure>> {
    let sg = m.g.shape(n)?;
    let eta = m.f.eta_elem();
    for j in 0..sg.len() {
        let y = sg.decode(j);
        if m.apply(&eta, &y, n) != y {
            return Ok(Some(ModuleLawFailure::Unit { y }));
        }
    }
    let sf = m.f.shape(n)?;
    guard::check_size("module associativity", (sf.len() as u128).pow(2) * sg.len() as u128)?;
    for i in 0..sf.len() {
        let x = sf.decode(i);
        for i2 in 0..sf.len() {
            let x2 = sf.decode(i2);
            let xx = m.f.nabla_elem(&x, &x2, n);
            for j in 0..sg.len() {
                let y = sg.decode(j);
                let lhs = m.apply(&x, &m.apply(&x2, &y, n), n * n);
                let rhs = m.apply(&xx, &y, n);
                if lhs != rhs {
                    return Ok(Some(ModuleLawFailure::Assoc { x, x2, y }));
                }
            }
        }
    }
    Ok(None)
}

/// A candidate mixed measuring `C × A → B`, indexed `c * |A| + a`.
#[derive(Clone, Debug)]
pub struct MixedMeasuring {
    pub module: ModuleMap,
    pub coalgebra: Coalgebra,
    pub source: Algebra,
    pub target: Algebra,
    table: Vec<usize>,
}

/// A pair `(c, y)` with `φ(c, α(y)) = lhs` but the module side giving `rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedViolation {
    pub state: usize,
    pub elem: usize,
    pub lhs: usize,
    pub rhs: usize,
}

impl MixedMeasuring {
    pub fn new(module: &ModuleMap, c: &Coalgebra, a: &Algebra, b: &Algebra, table: Vec<usize>) -> Result<MixedMeasuring> {
        if !PolyFunctor::same(c.functor(), &module.f) {
            return Err(Error::FunctorMismatch(format!("coalgebra is over {}, module over {}", c.functor().name(), module.f.name())));
        }
        for (what, x) in [("source", a), ("target", b)] {
            if !PolyFunctor::same(x.functor(), &module.g) {
                return Err(Error::FunctorMismatch(format!("{what} is over {}, module acts on {}", x.functor().name(), module.g.name())));
            }
        }
        if table.len() != c.len() * a.len() || table.iter().any(|&v| v >= b.len()) {
            return Err(Error::Invalid("mixed measuring table has the wrong shape".into()));
        }
        Ok(MixedMeasuring { module: module.clone(), coalgebra: c.clone(), source: a.clone(), target: b.clone(), table })
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn at(&self, c: usize, a: usize) -> usize {
        self.table[c * self.source.len() + a]
    }
}

/// Every `(c, y ∈ G(A))` where `φ(c, α(y)) ≠ β(G(φ)(m(χ(c), y)))`.
pub fn mixed_measuring_check(m: &MixedMeasuring) -> Vec<MixedViolation> {
    let (c, a, b) = (&m.coalgebra, &m.source, &m.target);
    let na = a.len();
    let shape = a.shape();
    let mut out = Vec::new();
    for s in 0..c.len() {
        let chi = c.step(s);
        for i in 0..shape.len() {
            let y = shape.decode(i);
            let lhs = m.at(s, a.act_index(i));
            let e = m.module.apply(&chi, &y, na);
            let args: Vec<usize> = e.args.iter().map(|&k| m.table[k]).collect();
            let rhs = b.act_parts(e.pos, &args);
            if lhs != rhs {
                out.push(MixedViolation { state: s, elem: i, lhs, rhs });
            }
        }
    }
    out
}

/// All mixed measurings by exhaustive search, sorted by table.
pub fn enumerate_mixed(module: &ModuleMap, c: &Coalgebra, a: &Algebra, b: &Algebra) -> Result<Vec<Vec<usize>>> {
    let vars = c.len() * a.len();
    guard::check_size("mixed measuring tables", guard::pow_sat(b.len(), vars))?;
    let mut odo = Odometer::new(vars, b.len());
    let mut out = Vec::new();
    while let Some(t) = odo.next_table() {
        let cand = MixedMeasuring::new(module, c, a, b, t.to_vec())?;
        if mixed_measuring_check(&cand).is_empty() {
            out.push(t.to_vec());
        }
    }
    Ok(out)
}

/// `[C, B]` as a G-algebra: `(q, fs) ↦ (c ↦ β(G(ev)(m(χ(c), (q, fs)))))`.
#[derive(Clone, Debug)]
pub struct MixedConvolution {
    pub algebra: Algebra,
    pub space: FunctionSpace,
}

pub fn mixed_convolution(module: &ModuleMap, c: &Coalgebra, b: &Algebra) -> Result<MixedConvolution> {
    if !PolyFunctor::same(c.functor(), &module.f) || !PolyFunctor::same(b.functor(), &module.g) {
        return Err(Error::FunctorMismatch("mixed convolution needs an F-coalgebra and a G-algebra".into()));
    }
    let space = FunctionSpace::new(c.carrier(), b.carrier())?;
    let carrier: Carrier = space.carrier();
    let n = carrier.len();
    let algebra = Algebra::from_fn(&module.g, carrier, |e: &FElem| {
        let out: Vec<usize> = (0..c.len())
            .map(|s| {
                let z = module.apply(&c.step(s), e, n);
                let args: Vec<usize> = z.args.iter().map(|&k| space.decode(k % n)[k / n]).collect();
                b.act_parts(z.pos, &args)
            })
            .collect();
        space.encode(&out)
    })?;
    Ok(MixedConvolution { algebra, space })
}

/// Curries a mixed table into `a ↦ (c ↦ φ(c, a))` on the convolution carrier.
pub fn curry_into_convolution(conv: &MixedConvolution, table: &[usize], nc: usize, na: usize) -> Vec<usize> {
    (0..na).map(|a| conv.space.encode(&(0..nc).map(|c| table[c * na + a]).collect::<Vec<_>>())).collect()
}

/// The strength `X × G(Y) → G(X × Y)`, making G a module over IdF.
pub fn strength_module(g: &Functor) -> ModuleMap {
    let f = crate::builtin::id_f();
    let n = g.num_positions();
    let act = (0..n).collect();
    let zip = (0..n).map(|q| (0..g.arity(q)).map(|u| (0, u)).collect()).collect();
    ModuleMap::new(&f, g, act, zip).expect("strength is well formed")
}

/// Lifts an IdF-coalgebra to a G-coalgebra along the unit position of G.
pub fn lift_identity_coalgebra(c: &Coalgebra, g: &Functor) -> Result<Coalgebra> {
    let u = g.unit();
    Coalgebra::from_fn(g, c.carrier().clone(), |s| FElem { pos: u, args: vec![c.step(s).args[0]; g.arity(u)] })
}
