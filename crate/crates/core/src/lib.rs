//! Measurings between algebras of lax symmetric monoidal polynomial
//! endofunctors on finite sets.

pub mod algebra;
pub mod builtin;
pub mod convolution;
pub mod error;
pub mod fixpoints;
pub mod functor;
pub mod guard;
pub mod label;
pub mod lazy;
pub mod measuring;
pub mod mixed;
pub mod set;
pub mod stock;
pub mod subterminal;
pub mod tensor;
pub mod term;
pub mod universal;

pub use algebra::{Algebra, Coalgebra};
pub use error::{Error, Result};
pub use functor::{FElem, FShape, Functor, PolyFunctor, PositionMonoid};
pub use label::Label;
pub use set::{Carrier, Map};
pub use term::{cata, Term};
