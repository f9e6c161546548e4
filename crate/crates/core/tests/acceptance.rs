//! Acceptance suite: each criterion prints one PASS/FAIL line.
//!
//! Criteria 6 and 9 contain claims that do not hold on small instances; they
//! run unchanged, report FAIL, and the run only errors if the documented
//! counterexample is not the reason.

use std::io::Write;
use std::time::Instant;

use polymeasure::algebra::{algebra_homs, algebras_up_to, coalgebras_up_to, enumerate_algebras, is_algebra_hom};
use polymeasure::builtin::{
    automaton_f, bin_tree_f, bounded_tree_f, compose, const_monoid, id_f, list_f, maybe, unit_f,
};
use polymeasure::convolution::{convolution_act, convolution_algebra};
use polymeasure::fixpoints::{
    adamek, is_preinitial, is_subterminal, lambek_check, maybe_indices, maybe_positions, subcoalgebras, Direction,
    Index,
};
use polymeasure::lazy::{solve_into_initial, LazyInitial, SolveOutcome};
use polymeasure::measuring::{
    associator_is_iso, compose_measurings, count_measurings, enumerate_measurings, identity_measuring,
    preinitial_candidate, unitors_are_iso, Measuring, Strategy,
};
use polymeasure::mixed::{derive_module_map, enumerate_mixed};
use polymeasure::stock::{
    list_alg, list_coalg, nat_inf_truncation, std_alg, std_coalg, terminal_algebra, tree_alg, tree_coalg,
    unit_coalgebra,
};
use polymeasure::subterminal::{
    classify_truncated, maybe_universe, stand_in, MaybeSubterminal, Prefix, Subterminal,
};
use polymeasure::tensor::measuring_tensor;
use polymeasure::universal::{
    c_initial_check, default_universe, dual_coalgebra, dual_pairing_check, terminal_c_initial_search, tower,
    universal_measuring, verify_universal, SearchStatus,
};
use polymeasure::{Algebra, Carrier, Coalgebra, Functor, PositionMonoid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn random_algebra(f: &Functor, n: usize, rng: &mut ChaCha8Rng) -> Algebra {
    let len = f.shape(n).unwrap().len();
    let table = (0..len).map(|_| rng.gen_range(0..n)).collect();
    Algebra::from_table(f, Carrier::range(n), table).unwrap()
}

fn random_coalgebra(f: &Functor, n: usize, rng: &mut ChaCha8Rng) -> Coalgebra {
    let len = f.shape(n).unwrap().len();
    let table = (0..n).map(|_| rng.gen_range(0..len)).collect();
    Coalgebra::from_table(f, Carrier::range(n), table).unwrap()
}

/// `k_B = Succ^k(Zero)` in a `1 + X` algebra.
fn numeral(b: &Algebra, k: usize) -> usize {
    let (succ, zero) = maybe_positions(b.functor()).unwrap();
    (0..k).fold(b.act_parts(zero, &[]), |x, _| b.act_parts(succ, &[x]))
}

fn builtins() -> Vec<Functor> {
    let z2 = PositionMonoid::cyclic(2);
    let z1 = PositionMonoid::cyclic(1);
    vec![
        unit_f(),
        id_f(),
        const_monoid(&z2),
        maybe(),
        list_f(&z2),
        bin_tree_f(&z1),
        bounded_tree_f(&z1, 2),
        automaton_f(&Carrier::symbols(&["a"]).unwrap()),
    ]
}

fn criterion_1() -> Outcome {
    let f = maybe();
    let mut cs: Vec<(String, Coalgebra)> = (0..=5).map(|n| (format!("std_coalg({n})"), std_coalg(n))).collect();
    for d in [MaybeSubterminal::NAT_MINUS, MaybeSubterminal::NAT_INF] {
        let s = stand_in(&f, &Subterminal::Maybe(d), 8).map_err(err)?;
        cs.push((d.to_string(), s.coalgebra));
    }
    let (succ, zero) = maybe_positions(&f).unwrap();
    for (name, c) in &cs {
        let idx = maybe_indices(c).map_err(err)?;
        for m in 0..=5 {
            let b = std_alg(m);
            let mut fun = convolution_act(c, &b, zero, &[]);
            for n in 0..=7 {
                for (s, &i) in idx.iter().enumerate() {
                    let k = match i {
                        Index::Finite(k) => (k as usize).min(n),
                        Index::Infinite => n,
                    };
                    ensure(fun[s] == numeral(&b, k), || format!("C={name} B=std_alg({m}) n={n} state {s}"))?;
                }
                fun = convolution_act(c, &b, succ, &[fun]);
            }
        }
    }
    Ok(())
}

fn criterion_2() -> Outcome {
    for n in 0..=4 {
        for m in 0..=4 {
            let (a, b) = (std_alg(n), std_alg(m));
            let u = universal_measuring(&a, &b, &maybe_universe(n + 1)).map_err(err)?;
            let expect = if m <= n { MaybeSubterminal::NAT_INF } else { MaybeSubterminal::std(n) };
            ensure(numeral(&b, n) == numeral(&b, n + 1) || m > n, || format!("n={n} m={m}: numerals"))?;
            ensure(u.descriptor == Subterminal::Maybe(expect), || {
                format!("n={n} m={m}: got {}, expected {expect}", u.descriptor)
            })?;
            let r = verify_universal(&u.stand_in, &u.ev, &a, &b, 3).map_err(err)?;
            ensure(r.passed(), || format!("n={n} m={m}: verification failed"))?;
        }
    }
    Ok(())
}

fn criterion_3() -> Outcome {
    for n in 0..=4 {
        let a = std_alg(n);
        let (u, lazy) = dual_coalgebra(&a).map_err(err)?;
        ensure(u.descriptor == Subterminal::Maybe(MaybeSubterminal::std(n)), || {
            format!("n={n}: dual is {}", u.descriptor)
        })?;
        ensure(lazy.cardinality().is_none(), || "lazy naturals reported finite".into())?;
        let r = dual_pairing_check(&std_coalg(n), &a).map_err(err)?;
        ensure(r.agree && r.homs == 1, || format!("n={n}: pairing disagrees"))?;
    }
    Ok(())
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for f in builtins() {
        for inst in 0..20 {
            let c = random_coalgebra(&f, rng.gen_range(0..=3), &mut rng);
            let a = random_algebra(&f, rng.gen_range(1..=3), &mut rng);
            let b = random_algebra(&f, rng.gen_range(1..=3), &mut rng);
            let mut sets = Vec::new();
            for s in Strategy::all() {
                match enumerate_measurings(&c, &a, &b, s) {
                    Ok(ms) => sets.push((s, ms)),
                    Err(polymeasure::Error::HomSetTooLarge { .. }) => continue,
                    Err(e) => return Err(format!("{} #{inst}: {e}", f.name())),
                }
            }
            ensure(sets.len() >= 2, || format!("{} #{inst}: too few strategies ran", f.name()))?;
            let tables = |ms: &[Measuring]| ms.iter().map(|m| m.table().to_vec()).collect::<Vec<_>>();
            let first = tables(&sets[0].1);
            for (s, ms) in &sets[1..] {
                ensure(tables(ms) == first, || format!("{} #{inst}: {s} disagrees with {}", f.name(), sets[0].0))?;
            }
            let conv = convolution_algebra(&c, &b).map_err(err)?;
            for phi in &sets[0].1 {
                let p = Measuring::from_partial_hom(&c, &a, &b, &phi.partial_hom().map_err(err)?).map_err(err)?;
                let h = phi.conv_hom().map_err(err)?;
                let q = Measuring::from_conv_hom(&c, &a, &b, &h).map_err(err)?;
                ensure(p.table() == phi.table() && q.table() == phi.table(), || {
                    format!("{} #{inst}: round trip differs", f.name())
                })?;
                ensure(is_algebra_hom(h.table(), &a, &conv.algebra).map_err(err)?, || {
                    format!("{} #{inst}: curried map is not a hom into [C, B]", f.name())
                })?;
            }
        }
    }
    Ok(())
}

fn random_measuring(f: &Functor, a: &Algebra, rng: &mut ChaCha8Rng) -> Option<(Measuring, Algebra)> {
    for _ in 0..50 {
        let c = random_coalgebra(f, rng.gen_range(1..=2), rng);
        let b = random_algebra(f, rng.gen_range(1..=2), rng);
        let ms = enumerate_measurings(&c, a, &b, Strategy::Propagate).ok()?;
        if !ms.is_empty() {
            let k = rng.gen_range(0..ms.len());
            return Some((ms[k].clone(), b));
        }
    }
    None
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for f in builtins() {
        let mut done = 0;
        let mut tries = 0;
        while done < 20 && tries < 400 {
            tries += 1;
            let a = random_algebra(&f, rng.gen_range(1..=2), &mut rng);
            let Some((phi, b)) = random_measuring(&f, &a, &mut rng) else { continue };
            let Some((psi, c3)) = random_measuring(&f, &b, &mut rng) else { continue };
            let Some((chi, _)) = random_measuring(&f, &c3, &mut rng) else { continue };
            let name = f.name().to_string();
            let left = compose_measurings(&identity_measuring(&b).map_err(err)?, &phi).map_err(err)?;
            let right = compose_measurings(&phi, &identity_measuring(&a).map_err(err)?).map_err(err)?;
            ensure(left.validated && right.validated, || format!("{name}: unit composite invalid"))?;
            ensure(left.table() == phi.table() && right.table() == phi.table(), || format!("{name}: unit law"))?;
            ensure(unitors_are_iso(&phi.coalgebra).map_err(err)?, || format!("{name}: unitor"))?;
            let l = compose_measurings(&compose_measurings(&chi, &psi).map_err(err)?, &phi).map_err(err)?;
            let r = compose_measurings(&chi, &compose_measurings(&psi, &phi).map_err(err)?).map_err(err)?;
            ensure(l.validated && r.validated, || format!("{name}: composite invalid"))?;
            ensure(l.table() == r.table(), || format!("{name}: associativity"))?;
            ensure(associator_is_iso(&chi.coalgebra, &psi.coalgebra, &phi.coalgebra).map_err(err)?, || {
                format!("{name}: associator")
            })?;
            done += 1;
        }
        ensure(done == 20, || format!("{}: only {done} composable triples found", f.name()))?;
    }
    Ok(())
}

/// Returns the outcome and whether the documented counterexample was seen:
/// for `|X| ≥ 2`, `A = 1` is preinitial but `μ_𝕀(1, (X, id))` is empty.
fn criterion_6() -> (Outcome, bool) {
    let mut monoids = vec![PositionMonoid::cyclic(1), PositionMonoid::cyclic(2), PositionMonoid::cyclic(3)];
    monoids.push(PositionMonoid::cyclic(4));
    monoids.push(PositionMonoid::boolean_and());
    let klein = Carrier::range(4);
    monoids.push(PositionMonoid::from_fn(klein, 0, |a, b| a ^ b));
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures: Vec<String> = Vec::new();
    let mut documented = false;
    let mut adjunction_checked = 0;
    for m in &monoids {
        let f = const_monoid(m);
        let name = f.name().to_string();
        for c in coalgebras_up_to(&f, 2).unwrap() {
            for a in algebras_up_to(&f, 2).unwrap().iter().filter(|a| !a.is_empty()) {
                let p = match measuring_tensor(&c, a, 6) {
                    Ok(p) => p,
                    Err(e) => return (Err(format!("{name}: {e}")), documented),
                };
                if !p.is_finite() {
                    return (Err(format!("{name}: tensor truncated")), documented);
                }
            }
        }
        for _ in 0..4 {
            let c = random_coalgebra(&f, rng.gen_range(0..=3), &mut rng);
            let a = random_algebra(&f, rng.gen_range(1..=3), &mut rng);
            let b = random_algebra(&f, rng.gen_range(1..=3), &mut rng);
            let p = measuring_tensor(&c, &a, 6).unwrap();
            let homs = algebra_homs(p.algebra.as_ref().unwrap(), &b).unwrap().len();
            let ms = count_measurings(&c, &a, &b, usize::MAX).unwrap();
            if homs != ms {
                return (Err(format!("{name}: |Alg(C▷A,B)| = {homs} but |μ| = {ms}")), documented);
            }
            adjunction_checked += 1;
        }
        let family = algebras_up_to(&f, 2).unwrap();
        let preinitial: Vec<Algebra> = family.iter().filter(|a| is_preinitial(a).0).cloned().collect();
        let identity = Algebra::from_fn(&f, m.carrier().clone(), |e| e.pos).unwrap();
        for c in coalgebras_up_to(&f, 3).unwrap() {
            for a in &preinitial {
                let r = c_initial_check(a, &c, &family).unwrap();
                if let Some(i) = r.first_violation {
                    failures.push(format!(
                        "{name}: preinitial A (|A|={}) not C-initial for |C|={}; {} measurings into a test algebra",
                        a.len(),
                        c.len(),
                        r.counts[i]
                    ));
                }
            }
            let s = terminal_c_initial_search(&c, &family, &family).unwrap();
            let ok = matches!(s.status, SearchStatus::Found(t) if family[t].len() == 1);
            if !ok {
                failures.push(format!("{name}: terminal algebra not terminal C-initial for |C|={}", c.len()));
            }
        }
        if m.len() >= 2 {
            let unit = unit_coalgebra(&f);
            let one = terminal_algebra(&f);
            documented |= is_preinitial(&one).0 && count_measurings(&unit, &one, &identity, 2).unwrap() == 0;
        }
    }
    if adjunction_checked < 20 {
        return (Err("fewer than 20 adjunction instances".into()), documented);
    }
    if failures.is_empty() {
        (Ok(()), documented)
    } else {
        let n = failures.len();
        (Err(format!("{n} C-initiality failures, first: {}", failures[0])), documented)
    }
}

fn criterion_7() -> Outcome {
    let x = PositionMonoid::cyclic(2);
    let f = list_f(&x);
    let n = 2;
    let c = list_coalg(&f, n).map_err(err)?;
    let a = list_alg(&f, n).map_err(err)?;
    let lazy = LazyInitial::new(&f);
    let decode = |carrier: &Carrier, i: usize| -> Vec<usize> {
        carrier.label(i).as_tuple().unwrap().iter().map(|l| x.carrier().index_of(l).unwrap()).collect()
    };
    let formula = |s: usize, t: usize| -> Vec<usize> {
        let (xs1, xs) = (decode(c.carrier(), s), decode(a.carrier(), t));
        xs1.iter().zip(&xs).map(|(&p, &q)| x.mul(p, q)).collect()
    };
    // (a) against a finite fragment and against the lazy initial algebra.
    let frag = list_alg(&f, 2 * n + 1).map_err(err)?;
    let phi = Measuring::from_fn(&c, &a, &frag, |s, t| {
        polymeasure::stock::list_index(frag.carrier(), x.carrier(), &formula(s, t)).unwrap()
    })
    .map_err(err)?;
    ensure(phi.validated, || "(a) formula is not a measuring into the fragment".into())?;
    let cand = preinitial_candidate(&c, &a, &lazy).map_err(err)?;
    ensure(cand.is_measuring(), || "(b) no measuring by the dual into X*".into())?;
    let nil = lazy.intern(0, &[]);
    for s in 0..c.len() {
        for t in 0..a.len() {
            let want = formula(s, t).iter().rev().fold(nil, |acc, &v| lazy.intern(v + 1, &[acc]));
            ensure(cand.table[s * a.len() + t] == want, || format!("(a) entry ({s}, {t}) differs"))?;
        }
    }
    // (b) no total hom.
    match solve_into_initial(&unit_coalgebra(&f), &a, &lazy).map_err(err)? {
        SolveOutcome::None { .. } => {}
        other => return Err(format!("(b) expected no total hom, got {}", other.count_class())),
    }
    // (c) classification over every algebra on at most 3 elements.
    let universe = default_universe(&a).map_err(err)?;
    let dual = list_coalg(&f, n).map_err(err)?;
    for b in algebras_up_to(&f, 3).map_err(err)?.iter().filter(|b| !b.is_empty()) {
        let fold: Vec<usize> = {
            // `!_B` on X*_n, computed by recursion on the list.
            let mut out = vec![0; a.len()];
            for i in 0..a.len() {
                let xs = decode(a.carrier(), i);
                out[i] = xs.iter().rev().fold(b.act_parts(0, &[]), |acc, &v| b.act_parts(v + 1, &[acc]));
            }
            out
        };
        let take_ok = (0..a.len()).all(|i| {
            let xs = decode(a.carrier(), i);
            let short = polymeasure::stock::list_index(a.carrier(), x.carrier(), &xs[..xs.len().min(n - 1)]).unwrap();
            (0..x.len()).all(|v| b.act_parts(v + 1, &[fold[i]]) == b.act_parts(v + 1, &[fold[short]]))
        });
        let u = universal_measuring(&a, b, &universe).map_err(err)?;
        let got_terminal = u.descriptor.is_terminal_like();
        ensure(got_terminal == take_ok, || {
            format!("(c) B={:?}: universal {} but take condition {}", b.table(), u.descriptor, take_ok)
        })?;
        if !take_ok {
            let Subterminal::Finite(d) = &u.descriptor else {
                return Err(format!("(c) B={:?}: expected a finite dual, got {}", b.table(), u.descriptor));
            };
            let there = polymeasure::algebra::coalgebra_homs(&dual, d).map_err(err)?;
            let back = polymeasure::algebra::coalgebra_homs(d, &dual).map_err(err)?;
            ensure(d.len() == dual.len() && !there.is_empty() && !back.is_empty(), || {
                format!("(c) B={:?}: universal is not (X*_n)°", b.table())
            })?;
        }
    }
    Ok(())
}

fn criterion_8() -> Outcome {
    for f in [const_monoid(&PositionMonoid::cyclic(3)), unit_f()] {
        let run = adamek(&f, Direction::Forward, 10).map_err(err)?;
        ensure(run.stabilized_at.is_some(), || format!("{}: forward run did not stabilize", f.name()))?;
        let l = lambek_check(&run, 3).map_err(err)?;
        ensure(l.passed(), || format!("{}: Lambek check failed", f.name()))?;
    }
    let f = maybe();
    let fwd = adamek(&f, Direction::Forward, 6).map_err(err)?;
    ensure(fwd.truncated() && fwd.stage_sizes() == (0..=6).collect::<Vec<_>>(), || {
        format!("Maybe forward stages {:?}", fwd.stage_sizes())
    })?;
    let bwd = adamek(&f, Direction::Backward, 6).map_err(err)?;
    ensure(bwd.truncated() && bwd.stage_sizes() == (1..=7).collect::<Vec<_>>(), || {
        format!("Maybe backward stages {:?}", bwd.stage_sizes())
    })?;
    for k in 0..=4 {
        let c = nat_inf_truncation(k);
        let subs = subcoalgebras(&c).map_err(err)?;
        let mut seen = Vec::new();
        for s in &subs {
            let d = classify_truncated(&c, &s.states, k)
                .map_err(err)?
                .ok_or_else(|| format!("K={k}: subcoalgebra {:?} is not a family member", s.states))?;
            ensure(is_subterminal(&s.coalgebra), || format!("K={k}: subcoalgebra not subterminal"))?;
            seen.push(d);
        }
        let mut expect = Vec::new();
        let prefixes = std::iter::once(Prefix::Empty).chain((0..k).map(Prefix::Upto)).chain(std::iter::once(Prefix::All));
        for p in prefixes {
            for inf in [false, true] {
                expect.push(MaybeSubterminal { prefix: p, infinity: inf });
            }
        }
        seen.sort_by_key(|d| (d.prefix, d.infinity));
        expect.sort_by_key(|d| (d.prefix, d.infinity));
        ensure(seen == expect, || format!("K={k}: classification {seen:?}"))?;
    }
    Ok(())
}

/// Returns the outcome and whether every failure is the documented one:
/// for `m > n` no total hom `𝕟 → 𝕞` exists, so the limit is empty.
fn criterion_9() -> (Outcome, bool) {
    let mut failures = Vec::new();
    let mut only_documented = true;
    for n in 0..=4 {
        for m in 0..=4 {
            let (a, b) = (std_alg(n), std_alg(m));
            let t = match tower(&a, &b, 6) {
                Ok(t) => t,
                Err(e) => return (Err(e.to_string()), false),
            };
            if m < n && n >= 1 && t.stabilized_at != Some(m + 1) {
                failures.push(format!("n={n} m={m}: stabilized at {:?}", t.stabilized_at));
                only_documented = false;
            }
            if m >= n {
                let homs = algebra_homs(&a, &b).unwrap();
                if t.limit.len() != 1 || t.limit != homs {
                    failures.push(format!("n={n} m={m}: limit has {} elements", t.limit.len()));
                    only_documented &= m > n && homs.is_empty() && t.limit.is_empty();
                }
            }
        }
    }
    if failures.is_empty() {
        (Ok(()), true)
    } else {
        (Err(format!("{} cases, first: {}", failures.len(), failures[0])), only_documented)
    }
}

fn test_family(f: &Functor, rng: &mut ChaCha8Rng) -> Vec<Algebra> {
    let mut fam = Vec::new();
    for k in 1..=3 {
        match enumerate_algebras(f, k) {
            Ok(all) if all.len() <= 600 => fam.extend(all),
            _ => fam.extend((0..150).map(|_| random_algebra(f, k, rng))),
        }
    }
    fam
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut functors = vec![bin_tree_f(&PositionMonoid::cyclic(1)), bin_tree_f(&PositionMonoid::cyclic(2))];
    functors.push(bounded_tree_f(&PositionMonoid::cyclic(1), 2));
    for f in functors {
        let family = test_family(&f, &mut rng);
        for n in 0..=2 {
            let t = tree_alg(&f, n).map_err(err)?;
            let c = tree_coalg(&f, n).map_err(err)?;
            let r = c_initial_check(&t, &c, &family).map_err(err)?;
            ensure(r.passed(), || format!("{} n={n}: not C-initial", f.name()))?;
            let mut candidates: Vec<Algebra> = (0..=n).map(|k| tree_alg(&f, k).unwrap()).collect();
            candidates.extend((0..30).map(|_| random_algebra(&f, rng.gen_range(1..=2), &mut rng)));
            for cand in candidates.iter().filter(|a| is_preinitial(a).0) {
                if c_initial_check(cand, &c, &family).map_err(err)?.passed() {
                    let homs = algebra_homs(cand, &t).map_err(err)?;
                    ensure(homs.len() == 1, || {
                        format!("{} n={n}: C-initial candidate with {} homs into T", f.name(), homs.len())
                    })?;
                }
            }
        }
    }
    Ok(())
}

fn criterion_11() -> Outcome {
    let fa = automaton_f(&Carrier::symbols(&["a"]).map_err(err)?);
    let h = maybe();
    let g = compose(&h, &fa).map_err(err)?;
    let module = derive_module_map(&fa, &h, &g).map_err(err)?;
    let unit = unit_coalgebra(&fa);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for inst in 0..10 {
        let a = random_algebra(&g, rng.gen_range(1..=2), &mut rng);
        let b = random_algebra(&g, rng.gen_range(1..=2), &mut rng);
        let mixed = enumerate_mixed(&module, &unit, &a, &b).map_err(err)?;
        let homs = algebra_homs(&a, &b).map_err(err)?;
        ensure(mixed == homs, || format!("#{inst}: {} mixed vs {} homs", mixed.len(), homs.len()))?;
    }
    Ok(())
}

fn line(n: usize, name: &str, outcome: &Outcome, note: &str, ms: u128) {
    let status = match outcome {
        Ok(()) => "PASS".to_string(),
        Err(e) => format!("FAIL ({e})"),
    };
    let mut out = std::io::stdout().lock();
    writeln!(out, "criterion {n:>2} {name:<28} {status}{note} [{ms} ms]").unwrap();
}

fn main() {
    let plain: Vec<(usize, &str, fn() -> Outcome)> = vec![
        (1, "convolution formula", criterion_1),
        (2, "universal classification", criterion_2),
        (3, "dual of std_alg", criterion_3),
        (4, "three representations", criterion_4),
        (5, "enrichment laws", criterion_5),
        (7, "list type", criterion_7),
        (8, "fixed points", criterion_8),
        (10, "tree theorems", criterion_10),
        (11, "mixed enrichment", criterion_11),
    ];
    let mut unexpected = Vec::new();
    let mut results: Vec<(usize, String, Outcome, String, u128)> = Vec::new();
    for (n, name, run) in plain {
        let t = Instant::now();
        let o = run();
        if o.is_err() {
            unexpected.push(n);
        }
        results.push((n, name.into(), o, String::new(), t.elapsed().as_millis()));
    }
    let t = Instant::now();
    let (o, documented) = criterion_6();
    let note = if o.is_err() && documented { " [documented counterexample reproduced]" } else { "" };
    if o.is_err() && !documented {
        unexpected.push(6);
    }
    results.push((6, "monoid type".into(), o, note.into(), t.elapsed().as_millis()));
    let t = Instant::now();
    let (o, documented) = criterion_9();
    let note = if o.is_err() && documented { " [documented counterexample reproduced]" } else { "" };
    if o.is_err() && !documented {
        unexpected.push(9);
    }
    results.push((9, "towers".into(), o, note.into(), t.elapsed().as_millis()));
    results.sort_by_key(|r| r.0);
    for (n, name, o, note, ms) in &results {
        line(*n, name, o, note, *ms);
    }
    let passed = results.iter().filter(|r| r.2.is_ok()).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
