//! Subterminal coalgebras as descriptors: finite coalgebras, the symbolic
//! `1 + X` family and the terminal coalgebra, each with a finite stand-in
//! that is exact for behaviour up to a given depth.

use std::fmt;

use crate::algebra::{coalgebra_homs, Coalgebra};
use crate::error::{Error, Result};
use crate::fixpoints::{is_subterminal, maybe_indices, maybe_positions, Index};
use crate::functor::{FElem, Functor};
use crate::guard;
use crate::label::Label;
use crate::set::Carrier;
use crate::stock::infinity_label;

/// The finite part of a symbolic `1 + X` subterminal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Prefix {
    Empty,
    /// Indices `0..=n`.
    Upto(usize),
    /// Every finite index.
    All,
}

/// A subterminal `1 + X` coalgebra: a downward closed set of finite indices,
/// possibly with the state of index infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MaybeSubterminal {
    pub prefix: Prefix,
    pub infinity: bool,
}

impl MaybeSubterminal {
    pub const EMPTY: MaybeSubterminal = MaybeSubterminal { prefix: Prefix::Empty, infinity: false };
    /// `𝕀`, the single state of index infinity.
    pub const UNIT: MaybeSubterminal = MaybeSubterminal { prefix: Prefix::Empty, infinity: true };
    /// `ℕ⁻`, every finite index.
    pub const NAT_MINUS: MaybeSubterminal = MaybeSubterminal { prefix: Prefix::All, infinity: false };
    /// `ℕ∞`, the terminal coalgebra.
    pub const NAT_INF: MaybeSubterminal = MaybeSubterminal { prefix: Prefix::All, infinity: true };

    /// `𝕟°`.
    pub fn std(n: usize) -> MaybeSubterminal {
        MaybeSubterminal { prefix: Prefix::Upto(n), infinity: false }
    }

    pub fn contains(&self, i: Index) -> bool {
        match i {
            Index::Infinite => self.infinity,
            Index::Finite(k) => match self.prefix {
                Prefix::Empty => false,
                Prefix::Upto(n) => k as usize <= n,
                Prefix::All => true,
            },
        }
    }

    /// Inclusion of index sets.
    pub fn leq(&self, other: &MaybeSubterminal) -> bool {
        self.prefix <= other.prefix && (!self.infinity || other.infinity)
    }
}

impl fmt::Display for MaybeSubterminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.prefix, self.infinity) {
            (Prefix::Empty, false) => write!(f, "empty"),
            (Prefix::Empty, true) => write!(f, "I"),
            (Prefix::Upto(n), false) => write!(f, "std_coalg({n})"),
            (Prefix::Upto(n), true) => write!(f, "std_coalg({n})+I"),
            (Prefix::All, false) => write!(f, "N-"),
            (Prefix::All, true) => write!(f, "Ninf"),
        }
    }
}

/// A subterminal coalgebra.
#[derive(Clone, Debug)]
pub enum Subterminal {
    Finite(Coalgebra),
    Maybe(MaybeSubterminal),
    Terminal,
}

impl PartialEq for Subterminal {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Subterminal::Finite(a), Subterminal::Finite(b)) => a.carrier() == b.carrier() && a.table() == b.table(),
            (Subterminal::Maybe(a), Subterminal::Maybe(b)) => a == b,
            (Subterminal::Terminal, Subterminal::Terminal) => true,
            _ => false,
        }
    }
}

impl fmt::Display for Subterminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subterminal::Finite(c) => write!(f, "finite({} states)", c.len()),
            Subterminal::Maybe(m) => write!(f, "{m}"),
            Subterminal::Terminal => write!(f, "terminal"),
        }
    }
}

impl Subterminal {
    /// Wraps a finite coalgebra after checking it is subterminal.
    pub fn finite(c: &Coalgebra) -> Result<Subterminal> {
        if is_subterminal(c) {
            Ok(Subterminal::Finite(c.clone()))
        } else {
            Err(Error::Invalid("coalgebra has bisimilar distinct states".into()))
        }
    }

    /// Short name used in reports.
    pub fn name(&self) -> String {
        self.to_string()
    }

    pub fn is_terminal_like(&self) -> bool {
        matches!(self, Subterminal::Terminal | Subterminal::Maybe(MaybeSubterminal::NAT_INF))
    }
}

/// Subterminal order: `x ⊑ y` when `x` maps into `y`.
pub fn leq(f: &Functor, x: &Subterminal, y: &Subterminal) -> Result<bool> {
    use Subterminal::*;
    Ok(match (x, y) {
        (_, Terminal) => true,
        (Terminal, Maybe(m)) => *m == MaybeSubterminal::NAT_INF,
        (Terminal, Finite(c)) => {
            let all_nullary = (0..f.num_positions()).all(|p| f.arity(p) == 0);
            all_nullary && (0..f.num_positions()).all(|p| (0..c.len()).any(|s| c.pos(s) == p))
        }
        (Maybe(a), Maybe(b)) => a.leq(b),
        (Finite(a), Finite(b)) => !coalgebra_homs(a, b)?.is_empty(),
        (Maybe(m), Finite(c)) => {
            let idx = maybe_indices(c)?;
            let has = |i: Index| idx.contains(&i);
            let prefix_ok = match m.prefix {
                Prefix::Empty => true,
                Prefix::Upto(n) => (0..=n as u64).all(|k| has(Index::Finite(k))),
                Prefix::All => false,
            };
            prefix_ok && (!m.infinity || has(Index::Infinite))
        }
        (Finite(c), Maybe(m)) => maybe_indices(c)?.into_iter().all(|i| m.contains(i)),
    })
}

/// A finite coalgebra exact for a descriptor up to a behaviour depth.
#[derive(Clone, Debug)]
pub struct StandIn {
    pub descriptor: Subterminal,
    pub coalgebra: Coalgebra,
    pub depth: usize,
    kind: Kind,
}

#[derive(Clone, Debug)]
enum Kind {
    Finite,
    /// States `0..=top` by index, then optionally the infinity state.
    Maybe { top: Option<usize>, inf: Option<usize>, succ: usize, zero: usize },
    /// Offsets of each level of depth-truncated behaviours.
    Terminal { offsets: Vec<usize> },
}

/// Builds the stand-in of `desc` exact for behaviour up to `depth`.
pub fn stand_in(f: &Functor, desc: &Subterminal, depth: usize) -> Result<StandIn> {
    match desc {
        Subterminal::Finite(c) => {
            crate::algebra::same_functor(f, c.functor(), "descriptor")?;
            Ok(StandIn { descriptor: desc.clone(), coalgebra: c.clone(), depth, kind: Kind::Finite })
        }
        Subterminal::Maybe(m) => {
            let (succ, zero) = maybe_positions(f)
                .ok_or_else(|| Error::Unsupported(format!("{} is not a 1 + X functor", f.name())))?;
            let top = match m.prefix {
                Prefix::Empty => None,
                Prefix::Upto(n) => Some(n.min(depth)),
                Prefix::All => Some(depth),
            };
            let nfin = top.map_or(0, |t| t + 1);
            let mut labels: Vec<Label> = (0..nfin as u64).map(Label::Nat).collect();
            if m.infinity {
                labels.push(infinity_label());
            }
            let carrier = Carrier::new(labels)?;
            let inf = m.infinity.then_some(nfin);
            let coalgebra = Coalgebra::from_fn(f, carrier, |s| {
                if Some(s) == inf {
                    FElem { pos: succ, args: vec![s] }
                } else if s == 0 {
                    FElem { pos: zero, args: vec![] }
                } else {
                    FElem { pos: succ, args: vec![s - 1] }
                }
            })?;
            Ok(StandIn { descriptor: desc.clone(), coalgebra, depth, kind: Kind::Maybe { top, inf, succ, zero } })
        }
        Subterminal::Terminal => {
            // Level 0 holds a self-looping state per position; level k holds
            // every F-element over level k - 1.
            let np = f.num_positions();
            let mut offsets = vec![0usize];
            let mut sizes = vec![np];
            for _ in 0..depth {
                let prev = *sizes.last().expect("nonempty");
                let shape = f.shape(prev)?;
                offsets.push(offsets.last().expect("nonempty") + prev);
                sizes.push(shape.len());
                guard::check_size("terminal stand-in", (offsets.last().unwrap() + shape.len()) as u128)?;
            }
            let total: usize = sizes.iter().sum();
            let mut labels = Vec::with_capacity(total);
            for (lvl, &n) in sizes.iter().enumerate() {
                for i in 0..n {
                    labels.push(Label::Tuple(vec![Label::Nat(lvl as u64), Label::Nat(i as u64)]));
                }
            }
            let carrier = Carrier::new(labels)?;
            let shapes: Vec<_> = sizes[..depth].iter().map(|&n| f.shape(n)).collect::<Result<_>>()?;
            let coalgebra = Coalgebra::from_fn(f, carrier, |s| {
                let lvl = offsets.partition_point(|&o| o <= s) - 1;
                let i = s - offsets[lvl];
                if lvl == 0 {
                    FElem { pos: i, args: vec![s; f.arity(i)] }
                } else {
                    let e = shapes[lvl - 1].decode(i);
                    FElem { pos: e.pos, args: e.args.iter().map(|&a| a + offsets[lvl - 1]).collect() }
                }
            })?;
            Ok(StandIn { descriptor: desc.clone(), coalgebra, depth, kind: Kind::Terminal { offsets } })
        }
    }
}

impl StandIn {
    /// Every coalgebra hom from `c` into the descriptor, as maps into the
    /// stand-in states that carry the same behaviour up to `depth`. For
    /// symbolic descriptors there is at most one.
    pub fn homs_into(&self, c: &Coalgebra) -> Result<Vec<Vec<usize>>> {
        crate::algebra::same_functor(self.coalgebra.functor(), c.functor(), "coalgebra")?;
        match &self.kind {
            Kind::Finite => coalgebra_homs(c, &self.coalgebra),
            Kind::Maybe { top, inf, .. } => {
                let Subterminal::Maybe(m) = &self.descriptor else { unreachable!() };
                let idx = maybe_indices(c)?;
                let mut out = Vec::with_capacity(c.len());
                for i in idx {
                    if !m.contains(i) {
                        return Ok(Vec::new());
                    }
                    out.push(match i {
                        Index::Infinite => inf.expect("contains infinity"),
                        Index::Finite(k) => (k as usize).min(top.expect("contains a finite index")),
                    });
                }
                Ok(vec![out])
            }
            Kind::Terminal { offsets } => {
                let f = c.functor();
                let shapes: Vec<_> =
                    (0..self.depth).map(|l| f.shape(offsets[l + 1] - offsets[l])).collect::<Result<_>>()?;
                let mut cur: Vec<usize> = (0..c.len()).map(|s| c.pos(s)).collect();
                for shape in &shapes {
                    let next = (0..c.len())
                        .map(|s| {
                            let e = c.step(s);
                            let args: Vec<usize> = e.args.iter().map(|&x| cur[x]).collect();
                            shape.encode(e.pos, &args)
                        })
                        .collect();
                    cur = next;
                }
                let base = offsets[self.depth];
                Ok(vec![cur.into_iter().map(|i| base + i).collect()])
            }
        }
    }

    /// The stand-in state for a finite index, for `1 + X` descriptors.
    pub fn index_state(&self, i: Index) -> Option<usize> {
        match (&self.kind, &self.descriptor) {
            (Kind::Maybe { top, inf, .. }, Subterminal::Maybe(m)) if m.contains(i) => match i {
                Index::Infinite => *inf,
                Index::Finite(k) => top.map(|t| (k as usize).min(t)),
            },
            _ => None,
        }
    }

    /// Positions of the successor and zero for `1 + X` stand-ins.
    pub fn maybe_positions(&self) -> Option<(usize, usize)> {
        match self.kind {
            Kind::Maybe { succ, zero, .. } => Some((succ, zero)),
            _ => None,
        }
    }
}

/// Names a subcoalgebra of `nat_inf_truncation(k)` (given by its states) as
/// a symbolic subterminal, reading the full prefix `{0..k}` as `ℕ⁻`.
/// Returns `None` when the finite indices are not downward closed.
pub fn classify_truncated(c: &Coalgebra, states: &[usize], k: usize) -> Result<Option<MaybeSubterminal>> {
    let idx = maybe_indices(c)?;
    let mut finite: Vec<u64> = Vec::new();
    let mut infinity = false;
    for &s in states {
        match idx[s] {
            Index::Infinite => infinity = true,
            Index::Finite(i) => finite.push(i),
        }
    }
    finite.sort_unstable();
    if finite.iter().enumerate().any(|(i, &v)| v != i as u64) {
        return Ok(None);
    }
    let prefix = match finite.len() {
        0 => Prefix::Empty,
        n if n == k + 1 => Prefix::All,
        n => Prefix::Upto(n - 1),
    };
    Ok(Some(MaybeSubterminal { prefix, infinity }))
}

/// `∅, 𝕟° (n ≤ max_n), 𝕀, ℕ⁻, ℕ∞`.
pub fn maybe_universe(max_n: usize) -> Vec<Subterminal> {
    let mut u = vec![Subterminal::Maybe(MaybeSubterminal::EMPTY)];
    u.extend((0..=max_n).map(|n| Subterminal::Maybe(MaybeSubterminal::std(n))));
    u.push(Subterminal::Maybe(MaybeSubterminal::UNIT));
    u.push(Subterminal::Maybe(MaybeSubterminal::NAT_MINUS));
    u.push(Subterminal::Maybe(MaybeSubterminal::NAT_INF));
    u
}

/// `∅`, the truncation coalgebras `(F^k 1)°` for `k ≤ n`, and the terminal
/// coalgebra.
pub fn truncation_universe(f: &Functor, n: usize) -> Result<Vec<Subterminal>> {
    let mut u = vec![Subterminal::Finite(crate::stock::empty_coalgebra(f))];
    for k in 0..=n {
        u.push(Subterminal::Finite(crate::stock::truncation_coalgebra(f, k)?));
    }
    u.push(Subterminal::Terminal);
    Ok(u)
}
