//! Built-in functor instances and functor composition.

use crate::error::{Error, Result};
use crate::functor::{Functor, PolyFunctor, PositionMonoid};
use crate::label::Label;
use crate::set::Carrier;

/// `F(X) = 1`.
pub fn unit_f() -> Functor {
    PolyFunctor::new("UnitF", PositionMonoid::trivial(), vec![Carrier::empty()], vec![vec![]])
        .expect("UnitF is well formed")
}

/// `F(X) = X`.
pub fn id_f() -> Functor {
    PolyFunctor::new("IdF", PositionMonoid::trivial(), vec![Carrier::unit()], vec![vec![(0, 0)]])
        .expect("IdF is well formed")
}

/// `F(X) = M` for a commutative monoid `M`.
pub fn const_monoid(m: &PositionMonoid) -> Functor {
    let n = m.len();
    PolyFunctor::new(
        &format!("ConstMonoid({})", m.len()),
        m.clone(),
        vec![Carrier::empty(); n],
        vec![vec![]; n * n],
    )
    .expect("ConstMonoid is well formed")
}

/// `F(X) = 1 + X` with positions `Succ` (unit) and `Zero` (absorbing).
pub fn maybe() -> Functor {
    // Canonical order puts Succ (index 0) before Zero (index 1).
    let carrier = Carrier::symbols(&["Succ", "Zero"]).expect("distinct");
    let monoid = PositionMonoid::from_fn(carrier, 0, |a, b| if a == 0 && b == 0 { 0 } else { 1 });
    PolyFunctor::new("Maybe", monoid, vec![Carrier::unit(), Carrier::empty()], vec![vec![(0, 0)], vec![], vec![], vec![]])
        .expect("Maybe is well formed")
}

/// Position monoid `M` with an absorbing `leaf`/`nil` element adjoined.
/// Element `0` is the zero; `m` maps to `m + 1`.
fn zero_adjoined(zero: &str, tag: &str, m: &PositionMonoid) -> PositionMonoid {
    let mut labels = vec![Label::sym(zero)];
    labels.extend(m.carrier().elements().iter().map(|x| Label::tagged(tag, x.clone())));
    let carrier = Carrier::new(labels).expect("distinct");
    // Sym sorts before Tagged, so index 0 is the zero and the rest keep M's order.
    PositionMonoid::from_fn(carrier, m.unit() + 1, |a, b| if a == 0 || b == 0 { 0 } else { m.mul(a - 1, b - 1) + 1 })
}

fn diagonal_zip(monoid: &PositionMonoid, fibers: &[Carrier]) -> Vec<Vec<(usize, usize)>> {
    let n = monoid.len();
    let mut zip = Vec::with_capacity(n * n);
    for c in 0..n {
        for d in 0..n {
            let k = fibers[monoid.mul(c, d)].len();
            zip.push((0..k).map(|u| (u, u)).collect());
        }
    }
    zip
}

/// `F(A) = 1 + X × A` for a commutative monoid `X`.
pub fn list_f(x: &PositionMonoid) -> Functor {
    let monoid = zero_adjoined("nil", "cons", x);
    let mut fibers = vec![Carrier::empty()];
    fibers.extend((0..x.len()).map(|_| Carrier::unit()));
    let zip = diagonal_zip(&monoid, &fibers);
    PolyFunctor::new(&format!("ListF({})", x.len()), monoid, fibers, zip).expect("ListF is well formed")
}

/// `F(A) = 1 + X × A × A` for a commutative monoid `X`.
pub fn bin_tree_f(x: &PositionMonoid) -> Functor {
    let monoid = zero_adjoined("leaf", "node", x);
    let lr = Carrier::symbols(&["L", "R"]).expect("distinct");
    let mut fibers = vec![Carrier::empty()];
    fibers.extend((0..x.len()).map(|_| lr.clone()));
    let zip = diagonal_zip(&monoid, &fibers);
    PolyFunctor::new(&format!("BinTreeF({})", x.len()), monoid, fibers, zip).expect("BinTreeF is well formed")
}

/// Trees whose nodes carry a value of `X` and at most `k` ordered children:
/// positions are a zero-adjoined `X × {0..k}` with
/// `(x,n)·(x',n') = (x•x', min(n,n'))`, unit `(e,k)`, fiber `{0..n-1}`, and
/// zip restricting indices below the minimum.
pub fn bounded_tree_f(x: &PositionMonoid, k: usize) -> Functor {
    let mut labels = vec![Label::sym("leaf")];
    for xl in x.carrier().elements() {
        for n in 0..=k {
            labels.push(Label::tagged("node", Label::pair(xl.clone(), Label::nat(n as u64))));
        }
    }
    let carrier = Carrier::new(labels).expect("distinct");
    // Index 0 is the zero; (xi, n) sits at 1 + xi * (k + 1) + n.
    let split = |p: usize| ((p - 1) / (k + 1), (p - 1) % (k + 1));
    let unit = 1 + x.unit() * (k + 1) + k;
    let monoid = PositionMonoid::from_fn(carrier, unit, |a, b| {
        if a == 0 || b == 0 {
            0
        } else {
            let (xa, na) = split(a);
            let (xb, nb) = split(b);
            1 + x.mul(xa, xb) * (k + 1) + na.min(nb)
        }
    });
    let mut fibers = vec![Carrier::empty()];
    for p in 1..monoid.len() {
        fibers.push(Carrier::range(split(p).1));
    }
    let zip = diagonal_zip(&monoid, &fibers);
    PolyFunctor::new(&format!("BoundedTreeF({},{})", x.len(), k), monoid, fibers, zip)
        .expect("BoundedTreeF is well formed")
}

/// `F(X) = 2 × X^Σ` with positions `({0,1}, ∧, 1)` and diagonal zip.
pub fn automaton_f(sigma: &Carrier) -> Functor {
    let monoid = PositionMonoid::boolean_and();
    let fibers = vec![sigma.clone(), sigma.clone()];
    let zip = diagonal_zip(&monoid, &fibers);
    PolyFunctor::new(&format!("AutomatonF({})", sigma.len()), monoid, fibers, zip).expect("AutomatonF is well formed")
}

/// The composite `G ∘ F` with its induced lax structure
/// `∇_{GF} = G(∇_F) ∘ ∇_G`.
///
/// A position is `(g, h)` with `h : fiber_G(g) → positions_F`, labelled
/// `(g, [h(u)...])`; its fiber is `Σ_u fiber_F(h(u))`, labelled `(u, v)`.
pub fn compose(g: &Functor, f: &Functor) -> Result<Functor> {
    struct Pos {
        g: usize,
        h: Vec<usize>,
        fiber: Vec<(usize, usize)>,
    }
    let mut positions: Vec<(Label, Pos)> = Vec::new();
    let fp = f.num_positions();
    for gp in 0..g.num_positions() {
        let k = g.arity(gp);
        let total = crate::guard::pow_sat(fp, k);
        crate::guard::check_size("composite positions", total + positions.len() as u128)?;
        for code in 0..total as usize {
            let mut h = vec![0; k];
            let mut rest = code;
            for slot in h.iter_mut().rev() {
                *slot = rest % fp;
                rest /= fp;
            }
            let mut fiber = Vec::new();
            for (u, &hu) in h.iter().enumerate() {
                for v in 0..f.arity(hu) {
                    fiber.push((u, v));
                }
            }
            let label = Label::pair(
                g.position_label(gp).clone(),
                Label::Tuple(h.iter().map(|&p| f.position_label(p).clone()).collect()),
            );
            positions.push((label, Pos { g: gp, h, fiber }));
        }
    }
    positions.sort_by(|a, b| a.0.cmp(&b.0));
    let carrier = Carrier::new(positions.iter().map(|p| p.0.clone()).collect())?;
    let index = |gp: usize, h: &[usize]| -> usize {
        let label = Label::pair(
            g.position_label(gp).clone(),
            Label::Tuple(h.iter().map(|&p| f.position_label(p).clone()).collect()),
        );
        carrier.index_of(&label).expect("composite position exists")
    };
    let n = positions.len();
    let ps: Vec<&Pos> = positions.iter().map(|p| &p.1).collect();
    let mut table = Vec::with_capacity(n * n);
    let mut zip = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let (pa, pb) = (ps[a], ps[b]);
            let gg = g.mul(pa.g, pb.g);
            let gz = g.zip(pa.g, pb.g);
            let h: Vec<usize> = gz.iter().map(|&(u1, u2)| f.mul(pa.h[u1], pb.h[u2])).collect();
            let c = index(gg, &h);
            table.push(c);
            let mut z = Vec::with_capacity(ps[c].fiber.len());
            for &(w, v) in &ps[c].fiber {
                let (u1, u2) = gz[w];
                let (v1, v2) = f.zip(pa.h[u1], pb.h[u2])[v];
                let ia = pa.fiber.iter().position(|&q| q == (u1, v1)).expect("fiber element");
                let ib = pb.fiber.iter().position(|&q| q == (u2, v2)).expect("fiber element");
                z.push((ia, ib));
            }
            zip.push(z);
        }
    }
    let unit_h = vec![f.unit(); g.arity(g.unit())];
    let unit = index(g.unit(), &unit_h);
    let monoid = PositionMonoid::new(carrier, table, unit)?;
    let fibers = ps
        .iter()
        .map(|p| {
            let labels = p
                .fiber
                .iter()
                .map(|&(u, v)| Label::pair(g.fiber(p.g).label(u).clone(), f.fiber(p.h[u]).label(v).clone()))
                .collect();
            Carrier::new(labels)
        })
        .collect::<Result<Vec<_>>>()?;
    // The fiber order above is (u, v) lexicographic, which is also label order.
    for (p, fc) in ps.iter().zip(&fibers) {
        if fc.len() != p.fiber.len() {
            return Err(Error::Invalid("composite fiber labels collide".into()));
        }
    }
    PolyFunctor::new(&format!("{}∘{}", g.name(), f.name()), monoid, fibers, zip)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functor::{validate_functor, FElem};
    use crate::set::{mk_product, FunctionSpace};

    fn all_builtins() -> Vec<Functor> {
        let z2 = PositionMonoid::cyclic(2);
        vec![
            unit_f(),
            id_f(),
            const_monoid(&z2),
            maybe(),
            list_f(&z2),
            bin_tree_f(&z2),
            bounded_tree_f(&z2, 2),
            automaton_f(&Carrier::symbols(&["a", "b"]).unwrap()),
            compose(&maybe(), &automaton_f(&Carrier::symbols(&["a"]).unwrap())).unwrap(),
        ]
    }

    #[test]
    fn builtins_validate() {
        for f in all_builtins() {
            let r = validate_functor(&f);
            assert!(r.passed(), "{}: {:?}", f.name(), r.checks);
        }
    }

    #[test]
    fn broken_associativity_is_reported() {
        // a·a = b, a·b = b, b·b = a: (a·a)·b = a but a·(a·b) = b.
        let carrier = Carrier::symbols(&["a", "b", "e"]).unwrap();
        let m = PositionMonoid::from_fn(carrier, 2, |x, y| match (x, y) {
            (2, y) => y,
            (x, 2) => x,
            (1, 1) => 0,
            _ => 1,
        });
        let f = const_monoid(&m);
        let r = validate_functor(&f);
        let assoc = &r.checks[0];
        assert!(!assoc.passed);
        assert!(assoc.witness.is_some());
    }

    #[test]
    fn apply_to_set_counts() {
        let m = maybe();
        assert_eq!(m.apply_to_set(&Carrier::empty()).unwrap().len(), 1);
        assert_eq!(m.apply_to_set(&Carrier::symbols(&["a", "b"]).unwrap()).unwrap().len(), 3);
        let t = bin_tree_f(&PositionMonoid::cyclic(2));
        assert_eq!(t.apply_to_set(&Carrier::range(2)).unwrap().len(), 9);
    }

    #[test]
    fn shape_round_trips_and_matches_labels() {
        for f in all_builtins() {
            for n in 0..3 {
                let x = Carrier::range(n);
                let shape = f.shape(n).unwrap();
                let set = f.apply_to_set(&x).unwrap();
                assert_eq!(set.len(), shape.len());
                for i in 0..shape.len() {
                    let e = shape.decode(i);
                    assert_eq!(shape.encode_elem(&e), i);
                    assert_eq!(set.label(i), &f.elem_label(&e, &x));
                    assert_eq!(f.parse_elem(set.label(i), &x).unwrap(), e);
                }
            }
        }
    }

    #[test]
    fn functor_laws_on_maps() {
        use crate::set::enumerate_functions;
        for f in all_builtins() {
            let x = Carrier::range(2);
            let id = crate::set::Map::identity(&x);
            assert_eq!(f.apply_to_map(&id).unwrap(), crate::set::Map::identity(&f.apply_to_set(&x).unwrap()));
            let y = Carrier::range(3);
            for g1 in enumerate_functions(&x, &y).unwrap() {
                for g2 in enumerate_functions(&y, &x).unwrap().into_iter().step_by(5) {
                    let lhs = f.apply_to_map(&g1.then(&g2).unwrap()).unwrap();
                    let rhs = f.apply_to_map(&g1).unwrap().then(&f.apply_to_map(&g2).unwrap()).unwrap();
                    assert_eq!(lhs, rhs, "{}", f.name());
                }
            }
        }
    }

    #[test]
    fn maybe_zero_maps_to_zero() {
        let m = maybe();
        let f = crate::set::Map::from_fn(Carrier::range(2), Carrier::range(1), |_| 0);
        let ff = m.apply_to_map(&f).unwrap();
        let zero = Label::pair(Label::sym("Zero"), Label::Tuple(vec![]));
        assert_eq!(ff.apply(&zero).unwrap(), &zero);
    }

    #[test]
    fn nabla_examples() {
        let m = maybe();
        let x = Carrier::symbols(&["x"]).unwrap();
        let y = Carrier::symbols(&["y"]).unwrap();
        let nab = m.nabla(&x, &y).unwrap();
        let succ = |l: Label| Label::pair(Label::sym("Succ"), Label::Tuple(vec![l]));
        let zero = Label::pair(Label::sym("Zero"), Label::Tuple(vec![]));
        let arg = Label::pair(succ(Label::sym("x")), succ(Label::sym("y")));
        assert_eq!(nab.apply(&arg).unwrap(), &succ(Label::pair(Label::sym("x"), Label::sym("y"))));
        let arg = Label::pair(zero.clone(), succ(Label::sym("y")));
        assert_eq!(nab.apply(&arg).unwrap(), &zero);

        let z2 = PositionMonoid::cyclic(2);
        let l = list_f(&z2);
        let a = Carrier::symbols(&["a"]).unwrap();
        let b = Carrier::symbols(&["b"]).unwrap();
        let nab = l.nabla(&a, &b).unwrap();
        let cons = |x: u64, v: Label| Label::pair(Label::tagged("cons", Label::nat(x)), Label::Tuple(vec![v]));
        let arg = Label::pair(cons(1, Label::sym("a")), cons(1, Label::sym("b")));
        assert_eq!(nab.apply(&arg).unwrap(), &cons(0, Label::pair(Label::sym("a"), Label::sym("b"))));
    }

    #[test]
    fn nabla_is_symmetric_associative_unital() {
        for f in all_builtins() {
            let x = Carrier::range(2);
            let sx = f.shape(2).unwrap();
            let sxx = f.shape(4).unwrap();
            // Symmetry: ∇(a, b) swapped equals ∇(b, a).
            for i in 0..sx.len() {
                for j in 0..sx.len() {
                    let a = sx.decode(i);
                    let b = sx.decode(j);
                    let ab = f.nabla_elem(&a, &b, 2);
                    let ba = f.nabla_elem(&b, &a, 2);
                    let swapped = FElem { pos: ab.pos, args: ab.args.iter().map(|&p| (p % 2) * 2 + p / 2).collect() };
                    assert_eq!(swapped, ba, "{}", f.name());
                }
            }
            // Associativity: ∇(∇(a,b),c) and ∇(a,∇(b,c)) agree on triples.
            for i in 0..sx.len() {
                for j in 0..sx.len() {
                    for k in 0..sx.len() {
                        let (a, b, c) = (sx.decode(i), sx.decode(j), sx.decode(k));
                        let left = f.nabla_elem(&f.nabla_elem(&a, &b, 2), &c, 2);
                        let right = f.nabla_elem(&a, &f.nabla_elem(&b, &c, 2), 4);
                        // left args index (x*2+y)*2+z, right args index x*4+(y*2+z): identical.
                        assert_eq!(left, right, "{}", f.name());
                    }
                }
            }
            // Unitality: ∇(η(*), b) relabelled along 1×X ≅ X is b.
            let eta = f.eta_elem();
            for j in 0..sx.len() {
                let b = sx.decode(j);
                let eb = f.nabla_elem(&eta, &b, 2);
                assert_eq!(eb, b, "{}", f.name());
            }
            let _ = (x, sxx);
        }
    }

    #[test]
    fn eta_examples() {
        let m = maybe();
        let eta = m.eta().unwrap();
        assert_eq!(eta.apply(&Label::Unit).unwrap(), &Label::pair(Label::sym("Succ"), Label::Tuple(vec![Label::Unit])));
        let c = const_monoid(&PositionMonoid::cyclic(3));
        assert_eq!(c.eta().unwrap().apply(&Label::Unit).unwrap(), &Label::pair(Label::nat(0), Label::Tuple(vec![])));
        let t = bounded_tree_f(&PositionMonoid::trivial(), 2);
        let e = t.eta().unwrap();
        let img = e.apply(&Label::Unit).unwrap();
        assert_eq!(img.as_pair().unwrap().0, &Label::tagged("node", Label::pair(Label::Unit, Label::nat(2))));
    }

    #[test]
    fn nabla_tilde_examples() {
        // ConstMonoid: ∇̃(x) is the constant function at... r_x on F-elements.
        let z3 = PositionMonoid::cyclic(3);
        let c = const_monoid(&z3);
        let x = Carrier::range(1);
        let nt = c.nabla_tilde(&x, &x).unwrap();
        let s = c.shape(1).unwrap();
        for i in 0..s.len() {
            let img = nt.at(i);
            // image is a function F(1) → F(1), i.e. a map Z3 → Z3: b ↦ i + b.
            let fs = FunctionSpace::new(&c.apply_to_set(&x).unwrap(), &c.apply_to_set(&x).unwrap()).unwrap();
            let table = fs.decode(img);
            for (b, &v) in table.iter().enumerate() {
                assert_eq!(v, (i + b) % 3);
            }
        }
        // Maybe: ∇̃(Zero) is constant Zero.
        let m = maybe();
        let x = Carrier::range(2);
        let nt = m.nabla_tilde(&x, &x).unwrap();
        let fx = m.apply_to_set(&x).unwrap();
        let fs = FunctionSpace::new(&fx, &fx).unwrap();
        let xx = FunctionSpace::new(&x, &x).unwrap();
        let sfun = m.shape(xx.count()).unwrap();
        let zero_idx = sfun.encode(1, &[]);
        let zero_out = m.shape(2).unwrap().encode(1, &[]);
        assert!(fs.decode(nt.at(zero_idx)).iter().all(|&v| v == zero_out));
    }

    #[test]
    fn nabla_tilde_is_the_adjunct() {
        // ev ∘ (∇̃ × id) = F(ev) ∘ ∇ on all inputs of a size-2 instance.
        for f in all_builtins() {
            let x = Carrier::range(2);
            let y = Carrier::range(2);
            let xy = FunctionSpace::new(&x, &y).unwrap();
            let funs: Vec<Vec<usize>> = (0..xy.count()).map(|i| xy.decode(i)).collect();
            let sfun = f.shape(xy.count()).unwrap();
            let sx = f.shape(2).unwrap();
            let sy = f.shape(2).unwrap();
            let prod = mk_product(&xy.carrier(), &x).unwrap().carrier;
            for i in 0..sfun.len() {
                let d = sfun.decode(i);
                for j in 0..sx.len() {
                    let b = sx.decode(j);
                    let lhs = f.nabla_tilde_apply(&d, &funs, &b, &sy);
                    let n = f.nabla_elem(&d, &b, x.len());
                    let ev: Vec<usize> = n.args.iter().map(|&p| funs[p / 2][p % 2]).collect();
                    assert_eq!(lhs, sy.encode(n.pos, &ev), "{}", f.name());
                }
            }
            assert_eq!(prod.len(), 8);
        }
    }

    #[test]
    fn composite_counts() {
        let g = compose(&maybe(), &automaton_f(&Carrier::symbols(&["a"]).unwrap())).unwrap();
        // 1 + 2 × X.
        assert_eq!(g.num_positions(), 3);
        assert_eq!(g.apply_to_set(&Carrier::range(2)).unwrap().len(), 5);
    }
}
