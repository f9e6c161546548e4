//! Command definitions and their reports.

use clap::{Args, Subcommand, ValueEnum};
use serde_json::{json, Value};

use polymeasure::algebra::{
    algebra_hom_violation, algebras_up_to, coalgebra_hom_violation,
};
use polymeasure::builtin::compose;
use polymeasure::convolution::convolution_algebra;
use polymeasure::fixpoints::{
    adamek, bisim_partition, is_preinitial, lambek_check, reachable_set, subcoalgebras, unfold, quotient_algebra,
    Direction,
};
use polymeasure::functor::validate_functor;
use polymeasure::lazy::SolveOutcome;
use polymeasure::measuring::{enumerate_measurings, measuring_violations, Strategy};
use polymeasure::mixed::{derive_module_map, enumerate_mixed, module_law_check, ModuleLawFailure};
use polymeasure::subterminal::Subterminal;
use polymeasure::tensor::{measuring_tensor, TensorStatus};
use polymeasure::universal::{
    c_initial_check, default_universe, dual_coalgebra, map_to_dual_check, render_terms, terminal_c_initial_search,
    tower, universal_measuring, verify_universal, SearchStatus,
};
use polymeasure::{Algebra, Coalgebra, Functor, Label, Term};

use crate::error::CliError;
use crate::expr::Expr;
use crate::resolve;
use crate::workspace::Workspace;

/// A finished command: its report and whether every check passed.
pub struct Report {
    pub value: Value,
    pub passed: bool,
}

impl Report {
    fn new(command: &str, passed: bool, summary: String, mut body: Value) -> Report {
        let obj = body.as_object_mut().expect("report bodies are objects");
        obj.insert("command".into(), json!(command));
        obj.insert("passed".into(), json!(passed));
        obj.insert("summary".into(), json!(summary));
        Report { value: body, passed }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DirectionArg {
    Forward,
    Backward,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum StrategyArg {
    Brute,
    Convolution,
    Propagate,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Brute => Strategy::Brute,
            StrategyArg::Convolution => Strategy::Convolution,
            StrategyArg::Propagate => Strategy::Propagate,
        }
    }
}

/// Object arguments; each is an expression or a workspace name.
#[derive(Args, Clone, Debug, Default)]
pub struct Objects {
    /// Source algebra.
    #[arg(long = "A")]
    pub a: Option<String>,
    /// Target algebra.
    #[arg(long = "B")]
    pub b: Option<String>,
    /// Coalgebra.
    #[arg(long = "C")]
    pub c: Option<String>,
}

#[derive(Subcommand, Clone, Debug)]
pub enum Command {
    /// Check the lax monoidal laws of a functor.
    ValidateFunctor,
    /// List F(X) for a finite set X.
    Apply {
        /// The set X, e.g. `[a, b]`.
        #[arg(long)]
        set: String,
    },
    /// Evaluate a closed term in an algebra.
    Cata {
        #[command(flatten)]
        obj: Objects,
        /// The term, e.g. `(Succ, [(Zero, [])])`.
        #[arg(long)]
        term: String,
    },
    /// Unfold a coalgebra state to a bounded depth.
    Unfold {
        #[command(flatten)]
        obj: Objects,
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 5)]
        depth: usize,
    },
    /// Run the initial or terminal chain of a functor.
    Adamek {
        #[arg(long, value_enum, default_value_t = DirectionArg::Forward)]
        direction: DirectionArg,
        #[arg(long, default_value_t = 6)]
        budget: usize,
    },
    /// Check that every element of an algebra is reachable.
    Preinitial {
        #[command(flatten)]
        obj: Objects,
    },
    /// Check that a coalgebra has no distinct bisimilar states.
    Subterminal {
        #[command(flatten)]
        obj: Objects,
    },
    /// List the subcoalgebras of a coalgebra.
    Subcoalgebras {
        #[command(flatten)]
        obj: Objects,
    },
    /// Quotient an algebra by the congruence generated by pairs.
    Quotient {
        #[command(flatten)]
        obj: Objects,
        /// Pairs of elements, e.g. `[(0, 1)]`.
        #[arg(long)]
        pairs: String,
    },
    /// Check an algebra hom A -> B or a coalgebra hom C -> D.
    CheckHom {
        #[command(flatten)]
        obj: Objects,
        /// Target coalgebra of a coalgebra hom.
        #[arg(long = "D")]
        d: Option<String>,
        /// The map as pairs, e.g. `[(0, 1), (1, 1)]`.
        #[arg(long)]
        map: String,
    },
    /// Check a named measuring from the workspace.
    CheckMeasuring {
        #[arg(long)]
        measuring: String,
    },
    /// Enumerate the measurings C x A -> B.
    EnumerateMeasurings {
        #[command(flatten)]
        obj: Objects,
        #[arg(long, value_enum, default_value_t = StrategyArg::Propagate)]
        strategy: StrategyArg,
        /// Cap on the number of tables listed in the report.
        #[arg(long, default_value_t = 50)]
        show: usize,
    },
    /// Build the convolution algebra [C, B].
    Convolution {
        #[command(flatten)]
        obj: Objects,
    },
    /// Present the measuring tensor C |> A.
    Tensor {
        #[command(flatten)]
        obj: Objects,
    },
    /// Compute the universal measuring coalgebra for a preinitial A and B.
    Universal {
        #[command(flatten)]
        obj: Objects,
        /// Verify terminality against coalgebras of at most this size.
        #[arg(long, default_value_t = 3)]
        verify: usize,
    },
    /// Compute the dual coalgebra of a preinitial algebra.
    Dual {
        #[command(flatten)]
        obj: Objects,
        /// Also solve the measurings from C into the initial algebra.
        #[arg(long)]
        pairing: bool,
    },
    /// Build the tower of partial measurings.
    Tower {
        #[command(flatten)]
        obj: Objects,
        #[arg(long = "n-max", default_value_t = 4)]
        n_max: usize,
    },
    /// Check that A is C-initial against all algebras up to a size.
    CInitial {
        #[command(flatten)]
        obj: Objects,
        #[arg(long = "family-size", default_value_t = 2)]
        family_size: usize,
    },
    /// Search candidates for a terminal C-initial algebra.
    TerminalCInitial {
        #[command(flatten)]
        obj: Objects,
        /// Candidate algebras, e.g. `[terminal, std_alg(2)]`.
        #[arg(long)]
        candidates: String,
        #[arg(long = "family-size", default_value_t = 2)]
        family_size: usize,
    },
    /// Check the module laws of H o F acting on F and count mixed measurings.
    MixedCheck {
        /// Outer functor H.
        #[arg(long)]
        outer: String,
        /// Inner functor F.
        #[arg(long)]
        inner: String,
        /// Carrier size for the law checks.
        #[arg(long, default_value_t = 2)]
        size: usize,
        #[command(flatten)]
        obj: Objects,
    },
    /// Compose two functors and validate the composite.
    Compose {
        #[arg(long)]
        outer: String,
        #[arg(long)]
        inner: String,
    },
    /// Run the workspace command list.
    Run,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::ValidateFunctor => "validate-functor",
            Command::Apply { .. } => "apply",
            Command::Cata { .. } => "cata",
            Command::Unfold { .. } => "unfold",
            Command::Adamek { .. } => "adamek",
            Command::Preinitial { .. } => "preinitial",
            Command::Subterminal { .. } => "subterminal",
            Command::Subcoalgebras { .. } => "subcoalgebras",
            Command::Quotient { .. } => "quotient",
            Command::CheckHom { .. } => "check-hom",
            Command::CheckMeasuring { .. } => "check-measuring",
            Command::EnumerateMeasurings { .. } => "enumerate-measurings",
            Command::Convolution { .. } => "convolution",
            Command::Tensor { .. } => "tensor",
            Command::Universal { .. } => "universal",
            Command::Dual { .. } => "dual",
            Command::Tower { .. } => "tower",
            Command::CInitial { .. } => "c-initial",
            Command::TerminalCInitial { .. } => "terminal-c-initial",
            Command::MixedCheck { .. } => "mixed-check",
            Command::Compose { .. } => "compose",
            Command::Run => "run",
        }
    }
}

/// Resolution context for one command.
pub struct Ctx<'a> {
    pub ws: &'a Workspace,
    pub functor: Option<Functor>,
    pub budget: usize,
}

fn expr(s: &str) -> Result<Expr, CliError> {
    Expr::parse(s)
}

fn label(s: &str) -> Result<Label, CliError> {
    Ok(Label::parse(s)?)
}

impl Ctx<'_> {
    fn functor(&self) -> Result<Functor, CliError> {
        self.functor.clone().ok_or_else(|| CliError::Usage("this command needs --functor".into()))
    }

    fn need<'b>(&self, v: &'b Option<String>, flag: &str) -> Result<&'b str, CliError> {
        v.as_deref().ok_or_else(|| CliError::Usage(format!("missing --{flag}")))
    }

    fn algebra(&self, s: &str, ctx: Option<&Functor>) -> Result<Algebra, CliError> {
        resolve::algebra(self.ws, &expr(s)?, ctx.or(self.functor.as_ref()))
    }

    fn coalgebra(&self, s: &str, ctx: Option<&Functor>) -> Result<Coalgebra, CliError> {
        resolve::coalgebra(self.ws, &expr(s)?, ctx.or(self.functor.as_ref()))
    }

    /// Resolves `--A`, then `--B` and `--C` in the functor of `A`.
    fn abc(&self, o: &Objects) -> Result<(Algebra, Algebra, Coalgebra), CliError> {
        let a = self.algebra(self.need(&o.a, "A")?, None)?;
        let b = self.algebra(self.need(&o.b, "B")?, Some(a.functor()))?;
        let c = self.coalgebra(self.need(&o.c, "C")?, Some(a.functor()))?;
        Ok((a, b, c))
    }

    fn ab(&self, o: &Objects) -> Result<(Algebra, Algebra), CliError> {
        let a = self.algebra(self.need(&o.a, "A")?, None)?;
        let b = self.algebra(self.need(&o.b, "B")?, Some(a.functor()))?;
        Ok((a, b))
    }
}

fn labels_of(c: &polymeasure::Carrier) -> Vec<String> {
    c.elements().iter().map(Label::to_string).collect()
}

fn table_json(c: &Coalgebra, a: &Algebra, b: &Algebra, t: &[usize]) -> Value {
    let na = a.len();
    Value::Array(
        t.iter()
            .enumerate()
            .map(|(k, &v)| {
                json!([c.carrier().label(k / na).to_string(), a.carrier().label(k % na).to_string(), b.carrier().label(v).to_string()])
            })
            .collect(),
    )
}

fn algebra_json(a: &Algebra) -> Value {
    json!({
        "functor": a.functor().name(),
        "carrier": labels_of(a.carrier()),
        "structure": a.pairs().iter().map(|(x, y)| json!([x.to_string(), y.to_string()])).collect::<Vec<_>>(),
    })
}

fn coalgebra_json(c: &Coalgebra) -> Value {
    json!({
        "functor": c.functor().name(),
        "carrier": labels_of(c.carrier()),
        "structure": c.pairs().iter().map(|(x, y)| json!([x.to_string(), y.to_string()])).collect::<Vec<_>>(),
    })
}

fn map_from(s: &str, dom: &polymeasure::Carrier, cod: &polymeasure::Carrier) -> Result<Vec<usize>, CliError> {
    let l = label(s)?;
    let items = l.as_tuple().ok_or_else(|| CliError::Usage("--map must be a list of pairs".into()))?;
    let mut table = vec![None; dom.len()];
    for item in items {
        let (x, y) = item.as_pair().ok_or_else(|| CliError::Usage(format!("expected a pair, found {item}")))?;
        table[dom.require(x)?] = Some(cod.require(y)?);
    }
    table
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| CliError::Usage(format!("--map has no value for {}", dom.label(i)))))
        .collect()
}

fn descriptor_json(d: &Subterminal) -> Value {
    match d {
        Subterminal::Finite(c) => json!({"kind": "finite", "coalgebra": coalgebra_json(c)}),
        Subterminal::Maybe(m) => json!({"kind": "symbolic", "name": m.to_string()}),
        Subterminal::Terminal => json!({"kind": "terminal"}),
    }
}

pub fn execute(cmd: &Command, cx: &Ctx) -> Result<Report, CliError> {
    let name = cmd.name();
    match cmd {
        Command::ValidateFunctor => {
            let f = cx.functor()?;
            let r = validate_functor(&f);
            let checks: Vec<Value> =
                r.checks.iter().map(|c| json!({"law": c.law, "passed": c.passed, "witness": c.witness})).collect();
            let failed = r.checks.iter().filter(|c| !c.passed).count();
            let summary = format!("{}: {} laws checked, {} failed", f.name(), r.checks.len(), failed);
            Ok(Report::new(name, r.passed(), summary, json!({"functor": f.name(), "checks": checks})))
        }
        Command::Apply { set } => {
            let f = cx.functor()?;
            let items = label(set)?;
            let items = items.as_tuple().ok_or_else(|| CliError::Usage("--set must be a list".into()))?;
            let x = polymeasure::Carrier::new(items.to_vec())?;
            let fx = f.apply_to_set(&x)?;
            let summary = format!("{}: |F(X)| = {} for |X| = {}", f.name(), fx.len(), x.len());
            Ok(Report::new(name, true, summary, json!({"functor": f.name(), "size": fx.len(), "elements": labels_of(&fx)})))
        }
        Command::Cata { obj, term } => {
            let a = cx.algebra(cx.need(&obj.a, "A")?, None)?;
            let t = Term::from_label(&label(term)?, a.functor())?;
            let v = polymeasure::cata(&t, &a)?;
            let rendered = t.render(a.functor());
            let value = a.carrier().label(v).to_string();
            let summary = format!("{rendered} evaluates to {value}");
            Ok(Report::new(name, true, summary, json!({"term": rendered, "value": value})))
        }
        Command::Unfold { obj, state, depth } => {
            let c = cx.coalgebra(cx.need(&obj.c, "C")?, None)?;
            let s = c.carrier().require(&label(state)?)?;
            let b = unfold(&c, s, *depth);
            let tree = b.tree.render(c.functor());
            let summary = format!("{state} unfolds to {tree}");
            Ok(Report::new(
                name,
                true,
                summary,
                json!({"state": state, "depth": depth, "tree": tree, "total": b.total, "index": b.index.map(|i| i.to_string())}),
            ))
        }
        Command::Adamek { direction, budget } => {
            let f = cx.functor()?;
            let dir = match direction {
                DirectionArg::Forward => Direction::Forward,
                DirectionArg::Backward => Direction::Backward,
            };
            let run = adamek(&f, dir, *budget)?;
            let mut body = json!({
                "functor": f.name(),
                "direction": format!("{dir:?}").to_lowercase(),
                "stage_sizes": run.stage_sizes(),
                "stabilized_at": run.stabilized_at,
                "truncated": run.truncated(),
                "stopped": run.stopped,
            });
            let mut passed = true;
            if run.stabilized_at.is_some() {
                let l = lambek_check(&run, 2)?;
                passed = l.passed();
                body["lambek"] = json!({"bijective": l.bijective, "witness": l.witness, "uniqueness_witness": l.uniqueness_witness, "checked_up_to": l.checked_up_to});
            }
            let summary = match run.stabilized_at {
                Some(k) => format!("{} {} chain stabilized at stage {k}", f.name(), body["direction"].as_str().unwrap_or("")),
                None => format!("{} {} chain truncated after {} stages", f.name(), body["direction"].as_str().unwrap_or(""), run.stages.len()),
            };
            Ok(Report::new(name, passed, summary, body))
        }
        Command::Preinitial { obj } => {
            let a = cx.algebra(cx.need(&obj.a, "A")?, None)?;
            let (ok, w) = is_preinitial(&a);
            let reach = reachable_set(&a);
            let reps: Vec<Value> = (0..a.len())
                .map(|x| json!([a.carrier().label(x).to_string(), reach.representative(&a, x).map(|t| t.render(a.functor()))]))
                .collect();
            let witness = w.map(|x| a.carrier().label(x).to_string());
            let summary = match &witness {
                None => "every element is reachable".to_string(),
                Some(x) => format!("{x} is unreachable"),
            };
            Ok(Report::new(name, ok, summary, json!({"witness": witness, "representatives": reps})))
        }
        Command::Subterminal { obj } => {
            let c = cx.coalgebra(cx.need(&obj.c, "C")?, None)?;
            let p = bisim_partition(&c);
            let classes: Vec<Vec<String>> =
                p.classes.iter().map(|cl| cl.iter().map(|&s| c.carrier().label(s).to_string()).collect()).collect();
            let ok = p.is_discrete();
            let witness = p.classes.iter().find(|cl| cl.len() > 1).map(|cl| {
                json!([c.carrier().label(cl[0]).to_string(), c.carrier().label(cl[1]).to_string()])
            });
            let summary = if ok {
                format!("subterminal: {} states pairwise distinguishable", c.len())
            } else {
                format!("not subterminal: {} bisimilarity classes on {} states", classes.len(), c.len())
            };
            Ok(Report::new(name, ok, summary, json!({"classes": classes, "witness": witness})))
        }
        Command::Subcoalgebras { obj } => {
            let c = cx.coalgebra(cx.need(&obj.c, "C")?, None)?;
            let subs = subcoalgebras(&c)?;
            let list: Vec<Vec<String>> =
                subs.iter().map(|s| s.states.iter().map(|&x| c.carrier().label(x).to_string()).collect()).collect();
            let summary = format!("{} subcoalgebras", subs.len());
            Ok(Report::new(name, true, summary, json!({"count": subs.len(), "subcoalgebras": list})))
        }
        Command::Quotient { obj, pairs } => {
            let a = cx.algebra(cx.need(&obj.a, "A")?, None)?;
            let l = label(pairs)?;
            let items = l.as_tuple().ok_or_else(|| CliError::Usage("--pairs must be a list of pairs".into()))?;
            let mut ps = Vec::new();
            for item in items {
                let (x, y) = item.as_pair().ok_or_else(|| CliError::Usage(format!("expected a pair, found {item}")))?;
                ps.push((a.carrier().require(x)?, a.carrier().require(y)?));
            }
            let q = quotient_algebra(&a, &ps)?;
            let summary = format!("quotient has {} elements", q.algebra.len());
            let proj: Vec<Value> = q.projection.pairs().iter().map(|(x, y)| json!([x.to_string(), y.to_string()])).collect();
            Ok(Report::new(name, true, summary, json!({"algebra": algebra_json(&q.algebra), "projection": proj})))
        }
        Command::CheckHom { obj, d, map } => {
            if let Some(cs) = &obj.c {
                let c = cx.coalgebra(cs, None)?;
                let d = cx.coalgebra(cx.need(d, "D")?, Some(c.functor()))?;
                let h = map_from(map, c.carrier(), d.carrier())?;
                let v = coalgebra_hom_violation(&h, &c, &d)?;
                let witness = v.map(|s| c.carrier().label(s).to_string());
                let summary = match &witness {
                    None => "coalgebra hom".to_string(),
                    Some(s) => format!("not a coalgebra hom: square fails at state {s}"),
                };
                Ok(Report::new(name, v.is_none(), summary, json!({"kind": "coalgebra", "witness": witness})))
            } else {
                let (a, b) = cx.ab(obj)?;
                let h = map_from(map, a.carrier(), b.carrier())?;
                let v = algebra_hom_violation(&h, &a, &b)?;
                let witness = v.map(|i| a.functor().elem_label(&a.shape().decode(i), a.carrier()).to_string());
                let summary = match &witness {
                    None => "algebra hom".to_string(),
                    Some(x) => format!("not an algebra hom: square fails at {x}"),
                };
                Ok(Report::new(name, v.is_none(), summary, json!({"kind": "algebra", "witness": witness})))
            }
        }
        Command::CheckMeasuring { measuring } => {
            let m = cx
                .ws
                .measurings
                .get(measuring)
                .ok_or_else(|| CliError::Unknown { kind: "measuring", name: measuring.clone() })?;
            let vs = measuring_violations(&m.coalgebra, &m.source, &m.target, m.table())?;
            let f = m.source.functor();
            let list: Vec<Value> = vs
                .iter()
                .map(|v| {
                    json!({
                        "state": m.coalgebra.carrier().label(v.state).to_string(),
                        "element": f.elem_label(&m.source.shape().decode(v.elem), m.source.carrier()).to_string(),
                        "lhs": m.target.carrier().label(v.lhs).to_string(),
                        "rhs": m.target.carrier().label(v.rhs).to_string(),
                    })
                })
                .collect();
            let summary = if vs.is_empty() {
                format!("{measuring} is a measuring")
            } else {
                format!("{measuring} fails {} square(s)", vs.len())
            };
            Ok(Report::new(name, vs.is_empty(), summary, json!({"measuring": measuring, "violations": list})))
        }
        Command::EnumerateMeasurings { obj, strategy, show } => {
            let (a, b, c) = cx.abc(obj)?;
            let ms = enumerate_measurings(&c, &a, &b, (*strategy).into())?;
            let tables: Vec<Value> = ms.iter().take(*show).map(|m| table_json(&c, &a, &b, m.table())).collect();
            let summary = format!("{} measurings", ms.len());
            Ok(Report::new(
                name,
                true,
                summary,
                json!({"strategy": format!("{strategy:?}").to_lowercase(), "count": ms.len(), "measurings": tables}),
            ))
        }
        Command::Convolution { obj } => {
            let b = cx.algebra(cx.need(&obj.b, "B")?, None)?;
            let c = cx.coalgebra(cx.need(&obj.c, "C")?, Some(b.functor()))?;
            let conv = convolution_algebra(&c, &b)?;
            let summary = format!("[C, B] has {} elements", conv.algebra.len());
            Ok(Report::new(name, true, summary, json!({"algebra": algebra_json(&conv.algebra)})))
        }
        Command::Tensor { obj } => {
            let a = cx.algebra(cx.need(&obj.a, "A")?, None)?;
            let c = cx.coalgebra(cx.need(&obj.c, "C")?, Some(a.functor()))?;
            let p = measuring_tensor(&c, &a, cx.budget)?;
            let (status, summary) = match p.status {
                TensorStatus::Finite { levels } => {
                    (json!({"finite": true, "levels": levels}), format!("finite tensor with {} elements", p.num_classes()))
                }
                TensorStatus::Truncated { budget } => (
                    json!({"finite": false, "budget": budget}),
                    format!("truncated after {budget} levels with {} classes so far", p.num_classes()),
                ),
            };
            let mut body = json!({"status": status, "class_counts": p.class_counts});
            if let Some(t) = &p.algebra {
                body["algebra"] = algebra_json(t);
            }
            Ok(Report::new(name, true, summary, body))
        }
        Command::Universal { obj, verify } => {
            let (a, b) = cx.ab(obj)?;
            let u = universal_measuring(&a, &b, &default_universe(&a)?)?;
            let probes: Vec<Value> =
                u.probes.iter().map(|p| json!({"descriptor": p.descriptor.name(), "measures": p.measures})).collect();
            let rep = verify_universal(&u.stand_in, &u.ev, &a, &b, *verify)?;
            let cx_json = rep.counterexample.as_ref().map(|ce| {
                json!({"coalgebra": coalgebra_json(&ce.coalgebra), "factorizations": ce.factorizations})
            });
            let summary = format!(
                "universal measuring coalgebra is {}; terminality {} on {} coalgebras",
                u.descriptor.name(),
                if rep.passed() { "verified" } else { "refuted" },
                rep.coalgebras
            );
            Ok(Report::new(
                name,
                rep.passed(),
                summary,
                json!({
                    "descriptor": descriptor_json(&u.descriptor),
                    "probes": probes,
                    "stand_in": coalgebra_json(&u.stand_in.coalgebra),
                    "verify": {"max_size": verify, "coalgebras": rep.coalgebras, "measurings": rep.measurings, "counterexample": cx_json},
                }),
            ))
        }
        Command::Dual { obj, pairing } => {
            let a = cx.algebra(cx.need(&obj.a, "A")?, None)?;
            let (u, n) = dual_coalgebra(&a)?;
            let na = a.len();
            let ev: Vec<Value> = render_terms(&n, &u.ev)
                .into_iter()
                .enumerate()
                .map(|(k, t)| {
                    json!([u.stand_in.coalgebra.carrier().label(k / na).to_string(), a.carrier().label(k % na).to_string(), t])
                })
                .collect();
            let mut body = json!({"descriptor": descriptor_json(&u.descriptor), "stand_in": coalgebra_json(&u.stand_in.coalgebra), "ev": ev});
            let mut passed = true;
            if *pairing {
                let c = cx.coalgebra(cx.need(&obj.c, "C")?, Some(a.functor()))?;
                let (out, n) = map_to_dual_check(&a, &c)?;
                let detail = match &out {
                    SolveOutcome::Unique(t) => json!({"class": "unique", "table": render_terms(&n, t)}),
                    SolveOutcome::Multiple { .. } => json!({"class": "multiple"}),
                    SolveOutcome::None { reason, .. } => json!({"class": "none", "reason": reason}),
                };
                passed = matches!(out, SolveOutcome::Unique(_));
                body["pairing"] = detail;
            }
            let summary = format!("dual coalgebra is {}", u.descriptor.name());
            Ok(Report::new(name, passed, summary, body))
        }
        Command::Tower { obj, n_max } => {
            let (a, b) = cx.ab(obj)?;
            let t = tower(&a, &b, *n_max)?;
            let stages: Vec<Value> = t
                .stages
                .iter()
                .map(|s| json!({"k": s.k, "measurings": s.measurings.len(), "top_functions": s.top_functions}))
                .collect();
            let summary = match t.stabilized_at {
                Some(s) => format!("tower stabilizes at stage {s}; limit has {} element(s)", t.limit.len()),
                None => format!("tower did not stabilize by stage {n_max}; limit has {} element(s)", t.limit.len()),
            };
            Ok(Report::new(
                name,
                true,
                summary,
                json!({"stages": stages, "stabilized_at": t.stabilized_at, "limit": t.limit, "restrictions_bijective_from": t.restrictions_bijective_from}),
            ))
        }
        Command::CInitial { obj, family_size } => {
            let a = cx.algebra(cx.need(&obj.a, "A")?, None)?;
            let c = cx.coalgebra(cx.need(&obj.c, "C")?, Some(a.functor()))?;
            let family = algebras_up_to(a.functor(), *family_size)?;
            let r = c_initial_check(&a, &c, &family)?;
            let witness = r.first_violation.map(|i| json!({"algebra": algebra_json(&family[i]), "measurings": r.counts[i]}));
            let summary = match r.first_violation {
                None => format!("C-initial against {} algebras", family.len()),
                Some(i) => format!("not C-initial: {} measurings into test algebra {i}", r.counts[i]),
            };
            Ok(Report::new(name, r.passed(), summary, json!({"family": family.len(), "counts": r.counts, "witness": witness})))
        }
        Command::TerminalCInitial { obj, candidates, family_size } => {
            let c = cx.coalgebra(cx.need(&obj.c, "C")?, None)?;
            let cands = match expr(candidates)? {
                Expr::List(items) => items
                    .iter()
                    .map(|e| resolve::algebra(cx.ws, e, Some(c.functor())))
                    .collect::<Result<Vec<_>, _>>()?,
                other => vec![resolve::algebra(cx.ws, &other, Some(c.functor()))?],
            };
            let family = algebras_up_to(c.functor(), *family_size)?;
            let s = terminal_c_initial_search(&c, &cands, &family)?;
            let (status, passed, summary) = match &s.status {
                SearchStatus::Found(i) => (json!({"found": i}), true, format!("candidate {i} is terminal C-initial")),
                SearchStatus::Ambiguous(v) => (json!({"ambiguous": v}), false, format!("{} terminal candidates", v.len())),
                SearchStatus::NoneFound => (json!("none found among candidates"), false, "none found among candidates".to_string()),
                SearchStatus::NoCInitial => (json!("no C-initial candidate"), false, "no candidate is C-initial".to_string()),
            };
            let homs: Vec<Value> = s.witness_homs.iter().map(|(i, h)| json!([i, h])).collect();
            Ok(Report::new(name, passed, summary, json!({"c_initial": s.c_initial, "status": status, "witness_homs": homs})))
        }
        Command::MixedCheck { outer, inner, size, obj } => {
            let h = resolve::functor(cx.ws, &expr(outer)?)?;
            let f = resolve::functor(cx.ws, &expr(inner)?)?;
            let g = compose(&h, &f)?;
            let m = derive_module_map(&f, &h, &g)?;
            let law = module_law_check(&m, *size)?;
            let law_json = law.as_ref().map(|l| match l {
                ModuleLawFailure::Unit { y } => json!({"law": "unit", "y": g.elem_label(y, &polymeasure::Carrier::range(*size)).to_string()}),
                ModuleLawFailure::Assoc { .. } => json!({"law": "associativity"}),
            });
            let mut body = json!({"composite": g.name(), "positions": g.num_positions(), "law_failure": law_json});
            let mut summary = format!("module laws {} on carriers of size {size}", if law.is_none() { "hold" } else { "fail" });
            if let (Some(cs), Some(as_), Some(bs)) = (&obj.c, &obj.a, &obj.b) {
                let c = cx.coalgebra(cs, Some(&g))?;
                let a = cx.algebra(as_, Some(&f))?;
                let b = cx.algebra(bs, Some(&h))?;
                let all = enumerate_mixed(&m, &c, &a, &b)?;
                body["mixed_measurings"] = json!(all.len());
                summary.push_str(&format!("; {} mixed measurings", all.len()));
            }
            Ok(Report::new(name, law.is_none(), summary, body))
        }
        Command::Compose { outer, inner } => {
            let h = resolve::functor(cx.ws, &expr(outer)?)?;
            let f = resolve::functor(cx.ws, &expr(inner)?)?;
            let g = compose(&h, &f)?;
            let r = validate_functor(&g);
            let positions: Vec<Value> = (0..g.num_positions())
                .map(|p| json!({"position": g.position_label(p).to_string(), "fiber": labels_of(g.fiber(p))}))
                .collect();
            let summary = format!("{} has {} positions; laws {}", g.name(), g.num_positions(), if r.passed() { "hold" } else { "fail" });
            Ok(Report::new(name, r.passed(), summary, json!({"functor": g.name(), "positions": positions})))
        }
        Command::Run => Err(CliError::Usage("run cannot be nested".into())),
    }
}
