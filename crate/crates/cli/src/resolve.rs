//! Turns expressions into monoids, functors, algebras and coalgebras.

use polymeasure::builtin::{automaton_f, bin_tree_f, bounded_tree_f, compose, const_monoid, id_f, list_f, maybe, unit_f};
use polymeasure::stock::{
    empty_coalgebra, infinity_coalgebra, lasso_alg, list_alg, list_coalg, nat_inf_truncation, std_alg_for, std_coalg_for,
    terminal_algebra, tree_alg, tree_coalg, truncation_algebra, truncation_coalgebra, unit_coalgebra,
};
use polymeasure::{Algebra, Carrier, Coalgebra, Functor, PositionMonoid};

use crate::error::CliError;
use crate::expr::Expr;
use crate::workspace::Workspace;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn num(e: &Expr) -> Result<usize, CliError> {
    e.as_num().ok_or_else(|| usage(format!("expected a number, found {e}")))
}

fn arity(name: &str, args: &[Expr], n: usize) -> Result<(), CliError> {
    if args.len() == n {
        Ok(())
    } else {
        Err(usage(format!("{name} takes {n} argument(s), {} given", args.len())))
    }
}

pub fn monoid(ws: &Workspace, e: &Expr) -> Result<PositionMonoid, CliError> {
    match e {
        Expr::Name(n) => {
            if let Some(m) = ws.monoids.get(n) {
                return Ok(m.clone());
            }
            match n.as_str() {
                "trivial" => Ok(PositionMonoid::trivial()),
                "bool" => Ok(PositionMonoid::boolean_and()),
                _ => match n.strip_prefix('Z').and_then(|k| k.parse::<usize>().ok()) {
                    Some(k) if k >= 1 => Ok(PositionMonoid::cyclic(k)),
                    _ => Err(CliError::Unknown { kind: "monoid", name: n.clone() }),
                },
            }
        }
        Expr::Call(h, args) if h == "Z" => {
            arity(h, args, 1)?;
            let k = num(&args[0])?;
            if k == 0 {
                return Err(usage("Z(n) needs n >= 1"));
            }
            Ok(PositionMonoid::cyclic(k))
        }
        other => Err(CliError::Unknown { kind: "monoid", name: other.to_string() }),
    }
}

pub fn functor(ws: &Workspace, e: &Expr) -> Result<Functor, CliError> {
    match e {
        Expr::Name(n) => {
            if let Some(f) = ws.functors.get(n) {
                return Ok(f.clone());
            }
            match n.as_str() {
                "unit" => Ok(unit_f()),
                "id" => Ok(id_f()),
                "maybe" => Ok(maybe()),
                _ => Err(CliError::Unknown { kind: "functor", name: n.clone() }),
            }
        }
        Expr::Call(h, args) => match h.as_str() {
            "const" => {
                arity(h, args, 1)?;
                Ok(const_monoid(&monoid(ws, &args[0])?))
            }
            "list" => {
                arity(h, args, 1)?;
                Ok(list_f(&monoid(ws, &args[0])?))
            }
            "bintree" => {
                arity(h, args, 1)?;
                Ok(bin_tree_f(&monoid(ws, &args[0])?))
            }
            "btree" => {
                arity(h, args, 2)?;
                Ok(bounded_tree_f(&monoid(ws, &args[0])?, num(&args[1])?))
            }
            "automaton" => {
                let names = args
                    .iter()
                    .map(|a| match a {
                        Expr::Name(s) => Ok(s.as_str()),
                        other => Err(usage(format!("automaton letters must be names, found {other}"))),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(automaton_f(&Carrier::symbols(&names)?))
            }
            "compose" => {
                arity(h, args, 2)?;
                Ok(compose(&functor(ws, &args[0])?, &functor(ws, &args[1])?)?)
            }
            _ => Err(CliError::Unknown { kind: "functor", name: h.clone() }),
        },
        other => Err(CliError::Unknown { kind: "functor", name: other.to_string() }),
    }
}

fn context<'a>(ctx: Option<&'a Functor>, what: &str) -> Result<&'a Functor, CliError> {
    ctx.ok_or_else(|| usage(format!("{what} needs a functor; pass --functor")))
}

/// Splits an optional leading functor argument off `args`.
fn functor_prefix<'a>(
    ws: &Workspace,
    args: &'a [Expr],
    rest: usize,
    ctx: Option<&Functor>,
    what: &str,
) -> Result<(Functor, &'a [Expr]), CliError> {
    if args.len() == rest + 1 {
        Ok((functor(ws, &args[0])?, &args[1..]))
    } else if args.len() == rest {
        Ok((context(ctx, what)?.clone(), args))
    } else {
        Err(usage(format!("{what} takes {rest} argument(s) after an optional functor")))
    }
}

/// List and tree families take a monoid and parameters, or use the context functor.
fn family_functor<'a>(
    ws: &Workspace,
    h: &str,
    args: &'a [Expr],
    ctx: Option<&Functor>,
) -> Result<(Functor, &'a [Expr]), CliError> {
    let (kind, params) = match h.trim_end_matches("_alg").trim_end_matches("_coalg") {
        "list" => ("list", 0),
        "tree" => ("bintree", 0),
        "btree" => ("btree", 1),
        _ => ("trunc", 0),
    };
    if kind == "trunc" {
        return functor_prefix(ws, args, 1, ctx, h);
    }
    if args.len() == 1 {
        return Ok((context(ctx, h)?.clone(), args));
    }
    arity(h, args, params + 2)?;
    let head = Expr::Call(kind.to_string(), args[..params + 1].to_vec());
    Ok((functor(ws, &head)?, &args[params + 1..]))
}

pub fn algebra(ws: &Workspace, e: &Expr, ctx: Option<&Functor>) -> Result<Algebra, CliError> {
    match e {
        Expr::Name(n) => {
            if let Some(a) = ws.algebras.get(n) {
                return Ok(a.clone());
            }
            match n.as_str() {
                "terminal" => Ok(terminal_algebra(context(ctx, n)?)),
                _ => Err(CliError::Unknown { kind: "algebra", name: n.clone() }),
            }
        }
        Expr::Call(h, args) => match h.as_str() {
            "std_alg" => {
                let (f, rest) = match ctx {
                    Some(_) if args.len() == 1 => functor_prefix(ws, args, 1, ctx, h)?,
                    None if args.len() == 1 => (maybe(), &args[..]),
                    _ => functor_prefix(ws, args, 1, ctx, h)?,
                };
                Ok(std_alg_for(&f, num(&rest[0])?)?)
            }
            "lasso_alg" => {
                arity(h, args, 2)?;
                Ok(lasso_alg(num(&args[0])?, num(&args[1])?)?)
            }
            "list_alg" => {
                let (f, rest) = family_functor(ws, h, args, ctx)?;
                Ok(list_alg(&f, num(&rest[0])?)?)
            }
            "tree_alg" | "btree_alg" | "trunc_alg" => {
                let (f, rest) = family_functor(ws, h, args, ctx)?;
                let n = num(&rest[0])?;
                Ok(if h == "trunc_alg" { truncation_algebra(&f, n)? } else { tree_alg(&f, n)? })
            }
            _ => Err(CliError::Unknown { kind: "algebra", name: h.clone() }),
        },
        other => Err(CliError::Unknown { kind: "algebra", name: other.to_string() }),
    }
}

pub fn coalgebra(ws: &Workspace, e: &Expr, ctx: Option<&Functor>) -> Result<Coalgebra, CliError> {
    match e {
        Expr::Name(n) => {
            if let Some(c) = ws.coalgebras.get(n) {
                return Ok(c.clone());
            }
            match n.as_str() {
                "unit" => Ok(unit_coalgebra(context(ctx, n)?)),
                "empty" => Ok(empty_coalgebra(context(ctx, n)?)),
                "inf" => Ok(infinity_coalgebra()),
                _ => Err(CliError::Unknown { kind: "coalgebra", name: n.clone() }),
            }
        }
        Expr::Call(h, args) => match h.as_str() {
            "std_coalg" => {
                let (f, rest) = match ctx {
                    None if args.len() == 1 => (maybe(), &args[..]),
                    _ => functor_prefix(ws, args, 1, ctx, h)?,
                };
                Ok(std_coalg_for(&f, num(&rest[0])?)?)
            }
            "nat_inf" => {
                arity(h, args, 1)?;
                Ok(nat_inf_truncation(num(&args[0])?))
            }
            "list_coalg" => {
                let (f, rest) = family_functor(ws, h, args, ctx)?;
                Ok(list_coalg(&f, num(&rest[0])?)?)
            }
            "tree_coalg" | "btree_coalg" | "trunc_coalg" => {
                let (f, rest) = family_functor(ws, h, args, ctx)?;
                let n = num(&rest[0])?;
                Ok(if h == "trunc_coalg" { truncation_coalgebra(&f, n)? } else { tree_coalg(&f, n)? })
            }
            _ => Err(CliError::Unknown { kind: "coalgebra", name: h.clone() }),
        },
        other => Err(CliError::Unknown { kind: "coalgebra", name: other.to_string() }),
    }
}
