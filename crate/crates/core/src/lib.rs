//! Numerical verification of almost paracontact structures induced on
//! affine hypersurfaces of `R^{2n+2}` by a `J̃`-tangent transversal field.

// `!(x > t)` comparisons are deliberate: they reject NaN along with small values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Tensor code reads best with explicit indices.
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod error;
pub mod hypersurface;
pub mod jet;
pub mod paracomplex;
pub mod paracontact;
pub mod tensor;
pub mod theorems;

pub use error::{Error, Result};
