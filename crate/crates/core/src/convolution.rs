//! The convolution algebra `[C, B]`.

use crate::algebra::{is_algebra_hom, same_functor, Algebra, Coalgebra};
use crate::error::Result;
use crate::measuring::measuring_rhs;
use crate::functor::FElem;
use crate::set::FunctionSpace;

/// `[C, B]` with its function space indexing.
#[derive(Clone, Debug)]
pub struct Convolution {
    pub algebra: Algebra,
    pub space: FunctionSpace,
}

/// Applies the convolution structure pointwise: the element `(p, (f_v))`
/// goes to `c ↦ β(q·p, w ↦ f_v(cs[u]))` with `χ(c) = (q, cs)` and
/// `(u, v) = Λ_{q,p}(w)`. Each `funs[v]` is a table over the states of `C`.
pub fn convolution_act(c: &Coalgebra, b: &Algebra, pos: usize, funs: &[Vec<usize>]) -> Vec<usize> {
    let x = FElem { pos, args: (0..funs.len()).collect() };
    (0..c.len())
        .map(|s| {
            let (q, args) = measuring_rhs(c, s, &x);
            let vals: Vec<usize> = args.iter().map(|&(cc, v)| funs[v][cc]).collect();
            b.act_parts(q, &vals)
        })
        .collect()
}

/// Materializes `[C, B]` as an algebra on the function space.
pub fn convolution_algebra(c: &Coalgebra, b: &Algebra) -> Result<Convolution> {
    same_functor(c.functor(), b.functor(), "coalgebra and algebra")?;
    let space = FunctionSpace::new(c.carrier(), b.carrier())?;
    let funs: Vec<Vec<usize>> = (0..space.count()).map(|i| space.decode(i)).collect();
    let algebra = Algebra::from_fn(c.functor(), space.carrier(), |e| {
        let args: Vec<Vec<usize>> = e.args.iter().map(|&i| funs[i].clone()).collect();
        space.encode(&convolution_act(c, b, e.pos, &args))
    })?;
    Ok(Convolution { algebra, space })
}

/// Checks that `[𝕀, B] → B`, `f ↦ f(*)`, is an algebra isomorphism.
pub fn unit_convolution_is_iso(b: &Algebra) -> Result<bool> {
    let unit = crate::stock::unit_coalgebra(b.functor());
    let conv = convolution_algebra(&unit, b)?;
    let id: Vec<usize> = (0..b.len()).collect();
    Ok(conv.algebra.len() == b.len() && is_algebra_hom(&id, &conv.algebra, b)? && is_algebra_hom(&id, b, &conv.algebra)?)
}
