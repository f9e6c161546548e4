//! Universal measuring coalgebras, duals, towers of partial measurings and
//! C-initial algebras.

use crate::algebra::{algebra_homs_limited, coalgebras_up_to, same_functor, Algebra, Coalgebra};
use crate::error::{Error, Result};
use crate::fixpoints::{maybe_positions, reachable_set};
use crate::functor::Functor;
use crate::lazy::{LazyInitial, SolveOutcome, TermId};
use crate::measuring::{count_measurings, enumerate_measurings, preinitial_candidate, Candidate, Strategy, Target};
use crate::stock::{truncation_algebra, truncation_coalgebra};
use crate::subterminal::{leq, maybe_universe, stand_in, truncation_universe, StandIn, Subterminal};
use crate::term::Term;

/// Height of the tallest representative term of a preinitial algebra.
pub fn representative_height(a: &Algebra) -> Result<usize> {
    let reach = reachable_set(a);
    if let Some(w) = reach.unreachable_witness() {
        return Err(Error::NotPreinitial { witness: a.carrier().label(w).clone() });
    }
    Ok(reach.heights(a).into_iter().max().unwrap_or(0))
}

/// The default search universe for `Alg(A, -)`: the symbolic family for
/// `1 + X` functors, otherwise the truncation coalgebras up to the height of
/// `A` together with the terminal coalgebra.
pub fn default_universe(a: &Algebra) -> Result<Vec<Subterminal>> {
    let f = a.functor();
    if maybe_positions(f).is_some() {
        Ok(maybe_universe(a.len() + 1))
    } else {
        truncation_universe(f, representative_height(a)?)
    }
}

/// Verdict of one universe member.
#[derive(Clone, Debug)]
pub struct Probe {
    pub descriptor: Subterminal,
    pub measures: bool,
}

/// The universal measuring coalgebra with its evaluation measuring.
#[derive(Clone, Debug)]
pub struct Universal<V> {
    pub descriptor: Subterminal,
    pub stand_in: StandIn,
    /// `ev` on the stand-in states, indexed `s * |A| + a`.
    pub ev: Vec<V>,
    pub probes: Vec<Probe>,
}

/// `Alg(A, B)` for preinitial `A`: the largest member of `universe` that
/// measures `A` into `B`.
pub fn universal_measuring<T: Target>(a: &Algebra, b: &T, universe: &[Subterminal]) -> Result<Universal<T::Value>> {
    let f = a.functor().clone();
    same_functor(&f, b.functor(), "source and target algebras")?;
    let depth = representative_height(a).map_err(|e| match e {
        Error::NotPreinitial { witness } => Error::Unsupported(format!(
            "source algebra is not preinitial ({witness} is unreachable); use verify_universal with a candidate"
        )),
        other => other,
    })? + 1;
    let mut probes = Vec::with_capacity(universe.len());
    let mut found: Vec<(Subterminal, StandIn, Candidate<T::Value>)> = Vec::new();
    for d in universe {
        let s = stand_in(&f, d, depth)?;
        let cand = preinitial_candidate(&s.coalgebra, a, b)?;
        let measures = cand.is_measuring();
        probes.push(Probe { descriptor: d.clone(), measures });
        if measures {
            found.push((d.clone(), s, cand));
        }
    }
    let mut best = None;
    for (i, (d, _, _)) in found.iter().enumerate() {
        let mut top = true;
        for (e, _, _) in &found {
            if !leq(&f, e, d)? {
                top = false;
                break;
            }
        }
        if top {
            best = Some(i);
            break;
        }
    }
    let Some(i) = best else {
        let names: Vec<String> = found.iter().map(|(d, _, _)| d.name()).collect();
        return Err(Error::Invalid(format!(
            "no largest measuring coalgebra in the universe; maximal candidates include {}",
            names.join(", ")
        )));
    };
    let (descriptor, stand_in, cand) = found.swap_remove(i);
    Ok(Universal { descriptor, stand_in, ev: cand.table, probes })
}

/// A failed factorization found by [`verify_universal`].
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub coalgebra: Coalgebra,
    pub measuring: Vec<usize>,
    pub factorizations: usize,
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub coalgebras: usize,
    pub measurings: usize,
    pub counterexample: Option<Counterexample>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Checks terminality of `(U, ev)`: every measuring by a coalgebra on at
/// most `k` states factors through exactly one coalgebra hom into `U`.
pub fn verify_universal(u: &StandIn, ev: &[usize], a: &Algebra, b: &Algebra, k: usize) -> Result<VerifyReport> {
    let na = a.len();
    if ev.len() != u.coalgebra.len() * na {
        return Err(Error::Invalid("evaluation table does not fit U × A".into()));
    }
    let mut report = VerifyReport { coalgebras: 0, measurings: 0, counterexample: None };
    for c in coalgebras_up_to(a.functor(), k)? {
        report.coalgebras += 1;
        let homs = u.homs_into(&c)?;
        for phi in enumerate_measurings(&c, a, b, Strategy::Propagate)? {
            report.measurings += 1;
            let n = homs
                .iter()
                .filter(|h| (0..c.len()).all(|s| (0..na).all(|x| ev[h[s] * na + x] == phi.at(s, x))))
                .count();
            if n != 1 {
                report.counterexample =
                    Some(Counterexample { coalgebra: c.clone(), measuring: phi.table().to_vec(), factorizations: n });
                return Ok(report);
            }
        }
    }
    Ok(report)
}

/// `A°`: the universal measuring coalgebra from `A` into the initial
/// algebra, computed lazily.
pub fn dual_coalgebra(a: &Algebra) -> Result<(Universal<TermId>, LazyInitial)> {
    let n = LazyInitial::new(a.functor());
    let u = universal_measuring(a, &n, &default_universe(a)?)?;
    Ok((u, n))
}

/// Both sides of `Alg(A, [C, N]) ≅ coAlg(C, A°)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingReport {
    /// `unique`, `multiple` or `none`, for measurings `C × A → N`.
    pub measurings: &'static str,
    pub homs: usize,
    pub agree: bool,
}

pub fn dual_pairing_check(c: &Coalgebra, a: &Algebra) -> Result<PairingReport> {
    let (u, n) = dual_coalgebra(a)?;
    let outcome = crate::lazy::solve_into_initial(c, a, &n)?;
    let homs = u.stand_in.homs_into(c)?.len();
    let agree = match &outcome {
        SolveOutcome::Unique(t) => {
            homs == 1 && {
                let h = &u.stand_in.homs_into(c)?[0];
                let na = a.len();
                (0..c.len()).all(|s| (0..na).all(|x| u.ev[h[s] * na + x] == t[s * na + x]))
            }
        }
        SolveOutcome::None { .. } => homs == 0,
        SolveOutcome::Multiple { .. } => homs >= 2,
    };
    Ok(PairingReport { measurings: outcome.count_class(), homs, agree })
}

/// The unique map from a C-initial algebra into the dual algebra `C*`,
/// given as the measuring `C × A → N`.
pub fn map_to_dual_check(a: &Algebra, c: &Coalgebra) -> Result<(SolveOutcome, LazyInitial)> {
    let n = LazyInitial::new(a.functor());
    let out = crate::lazy::solve_into_initial(c, a, &n)?;
    Ok((out, n))
}

/// Renders a measuring into the initial algebra as terms.
pub fn render_terms(n: &LazyInitial, table: &[TermId]) -> Vec<String> {
    table.iter().map(|&t| n.render(t)).collect()
}

/// One stage of a tower of partial measurings.
#[derive(Clone, Debug)]
pub struct TowerStage {
    pub k: usize,
    /// `F^k 1`.
    pub algebra: Algebra,
    /// `(F^k 1)°`.
    pub coalgebra: Coalgebra,
    /// `Alg_k(A, B) = μ_{(F^k 1)°}(A, B)`.
    pub measurings: Vec<Vec<usize>>,
    /// For `k > 0`, the index in stage `k - 1` of each restricted measuring.
    pub restriction: Option<Vec<usize>>,
    /// `a ↦ φ(u_k, a)` per measuring, where `u_k` is the depth-`k` term
    /// built from the unit position.
    pub top_functions: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct Tower {
    pub stages: Vec<TowerStage>,
    /// First `s ≥ 1` whose top functions equal those of stage `s - 1`.
    pub stabilized_at: Option<usize>,
    /// Top functions of the compatible families reaching the last stage.
    pub limit: Vec<Vec<usize>>,
    /// First stage from which every later restriction is bijective.
    pub restrictions_bijective_from: Option<usize>,
}

fn unit_term(f: &Functor, k: usize) -> Term {
    let zero = f.zero().expect("truncations need a zero");
    let mut t = Term::node(zero, vec![]);
    for _ in 0..k {
        let e = f.unit();
        t = Term::node(e, vec![t; f.arity(e)]);
    }
    t
}

/// Builds stages `0..=n_max`, gating each on `F^k 1` being preinitial.
pub fn tower(a: &Algebra, b: &Algebra, n_max: usize) -> Result<Tower> {
    let f = a.functor().clone();
    same_functor(&f, b.functor(), "source and target algebras")?;
    let mut stages: Vec<TowerStage> = Vec::new();
    for k in 0..=n_max {
        let fk = truncation_algebra(&f, k)?;
        let reach = reachable_set(&fk);
        if let Some(w) = reach.unreachable_witness() {
            return Err(Error::Invalid(format!(
                "stage {k}: F^{k} 1 is not preinitial ({} is unreachable)",
                fk.carrier().label(w)
            )));
        }
        let dk = truncation_coalgebra(&f, k)?;
        let measurings: Vec<Vec<usize>> =
            enumerate_measurings(&dk, a, b, Strategy::Propagate)?.iter().map(|m| m.table().to_vec()).collect();
        let na = a.len();
        let top = dk
            .carrier()
            .index_of(&unit_term(&f, k).to_label(&f))
            .ok_or_else(|| Error::Invalid(format!("stage {k}: unit term missing")))?;
        let top_functions = measurings.iter().map(|t| t[top * na..(top + 1) * na].to_vec()).collect();
        let restriction = match stages.last() {
            None => None,
            Some(prev) => {
                // Inclusion of states: terms of depth k - 1 are terms of depth k.
                let incl: Vec<usize> = (0..prev.coalgebra.len())
                    .map(|s| dk.carrier().index_of(prev.coalgebra.carrier().label(s)).expect("nested"))
                    .collect();
                let mut r = Vec::with_capacity(measurings.len());
                for t in &measurings {
                    let restricted: Vec<usize> =
                        incl.iter().flat_map(|&s| t[s * na..(s + 1) * na].iter().copied()).collect();
                    let pos = prev
                        .measurings
                        .binary_search(&restricted)
                        .map_err(|_| Error::Invalid(format!("stage {k}: restriction is not a measuring")))?;
                    r.push(pos);
                }
                Some(r)
            }
        };
        stages.push(TowerStage { k, algebra: fk, coalgebra: dk, measurings, restriction, top_functions });
    }
    let mut stabilized_at = None;
    for s in 1..stages.len() {
        let (p, q) = (&stages[s - 1].top_functions, &stages[s].top_functions);
        if !q.is_empty() && p == q {
            stabilized_at = Some(s);
            break;
        }
    }
    let bijective = |st: &TowerStage, prev: &TowerStage| {
        let r = st.restriction.as_ref().expect("k > 0");
        let mut seen = vec![false; prev.measurings.len()];
        for &i in r {
            if seen[i] {
                return false;
            }
            seen[i] = true;
        }
        seen.into_iter().all(|x| x)
    };
    let mut restrictions_bijective_from = None;
    for s in (1..stages.len()).rev() {
        if bijective(&stages[s], &stages[s - 1]) {
            restrictions_bijective_from = Some(s);
        } else {
            break;
        }
    }
    let mut limit = stages.last().expect("stage 0").top_functions.clone();
    limit.sort();
    limit.dedup();
    Ok(Tower { stages, stabilized_at, limit, restrictions_bijective_from })
}

/// Per-algebra measuring counts for a C-initiality check.
#[derive(Clone, Debug)]
pub struct CInitialReport {
    /// Measurings into each test algebra, capped at 2.
    pub counts: Vec<usize>,
    pub first_violation: Option<usize>,
}

impl CInitialReport {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// `A` is C-initial against `family` when each `μ_C(A, X)` is a singleton.
pub fn c_initial_check(a: &Algebra, c: &Coalgebra, family: &[Algebra]) -> Result<CInitialReport> {
    let mut counts = Vec::with_capacity(family.len());
    let mut first_violation = None;
    for (i, x) in family.iter().enumerate() {
        let n = count_measurings(c, a, x, 2)?;
        if n != 1 && first_violation.is_none() {
            first_violation = Some(i);
        }
        counts.push(n);
    }
    Ok(CInitialReport { counts, first_violation })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchStatus {
    Found(usize),
    /// Several non-isomorphic terminal candidates.
    Ambiguous(Vec<usize>),
    /// None of the C-initial candidates receives a unique hom from all others.
    NoneFound,
    /// No candidate is C-initial.
    NoCInitial,
}

#[derive(Clone, Debug)]
pub struct TerminalSearch {
    pub c_initial: Vec<usize>,
    pub status: SearchStatus,
    /// For a found terminal, the unique hom from each C-initial candidate.
    pub witness_homs: Vec<(usize, Vec<usize>)>,
}

/// Searches `candidates` for a C-initial algebra receiving exactly one
/// algebra hom from every C-initial candidate.
pub fn terminal_c_initial_search(c: &Coalgebra, candidates: &[Algebra], family: &[Algebra]) -> Result<TerminalSearch> {
    let mut c_initial = Vec::new();
    for (i, a) in candidates.iter().enumerate() {
        if c_initial_check(a, c, family)?.passed() {
            c_initial.push(i);
        }
    }
    if c_initial.is_empty() {
        return Ok(TerminalSearch { c_initial, status: SearchStatus::NoCInitial, witness_homs: Vec::new() });
    }
    let mut terminal = Vec::new();
    let mut witnesses = Vec::new();
    for &t in &c_initial {
        let mut homs = Vec::new();
        let mut ok = true;
        for &x in &c_initial {
            let h = algebra_homs_limited(&candidates[x], &candidates[t], 2)?;
            if h.len() != 1 {
                ok = false;
                break;
            }
            homs.push((x, h.into_iter().next().expect("one")));
        }
        if ok {
            terminal.push(t);
            witnesses.push(homs);
        }
    }
    // Terminal candidates are isomorphic to each other when they agree in size.
    let status = match terminal.len() {
        0 => SearchStatus::NoneFound,
        1 => SearchStatus::Found(terminal[0]),
        _ => {
            let sizes: Vec<usize> = terminal.iter().map(|&t| candidates[t].len()).collect();
            if sizes.iter().all(|&s| s == sizes[0]) {
                SearchStatus::Found(terminal[0])
            } else {
                SearchStatus::Ambiguous(terminal.clone())
            }
        }
    };
    let witness_homs = if matches!(status, SearchStatus::Found(_)) { witnesses.swap_remove(0) } else { Vec::new() };
    Ok(TerminalSearch { c_initial, status, witness_homs })
}
