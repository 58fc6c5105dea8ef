//! Derivatives of periodic-orbit multipliers for polynomials and rational
//! maps, computed from the Ruelle transfer operator acting on finite pole
//! sums, with contour-integral and finite-difference cross-checks.
//!
//! The guide in `book/` walks through the modules; its code blocks run as
//! doctests of this crate.

// Tolerance checks are written `!(x <= tol)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bfunc;
pub mod corpus;
pub mod cpoly;
pub mod derivs;
pub mod error;
pub mod linalg;
pub mod orbits;
mod series;
pub mod spaces;
pub mod transfer;

pub use error::{Error, Result};

// Each chapter is its own module so a failing snippet names its chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/maps.md")]
    mod maps {}
    #[doc = include_str!("../../../book/src/orbits.md")]
    mod orbits {}
    #[doc = include_str!("../../../book/src/bfunc.md")]
    mod bfunc {}
    #[doc = include_str!("../../../book/src/transfer.md")]
    mod transfer {}
    #[doc = include_str!("../../../book/src/derivatives.md")]
    mod derivatives {}
    #[doc = include_str!("../../../book/src/rational.md")]
    mod rational {}
    #[doc = include_str!("../../../book/src/cusps.md")]
    mod cusps {}
    #[doc = include_str!("../../../book/src/rank.md")]
    mod rank {}
}
