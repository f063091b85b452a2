//! Geodesics of warped product metrics `g = g₁ − k·g₂` on `M₁ × M₂`.
//!
//! Geodesics of `g` are obtained from geodesics of the Riemannian products
//! `G_r + g₂`, with `G_r = (1/k + r)·g₁`, by reparametrizing both factors.
//! The crate integrates and measures these constructions and solves the
//! two-point connection problem through the shooting function `β(r)`.

// `!(x > 0.0)` style checks deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Tensor contractions read best as index loops.
#![allow(clippy::needless_range_loop)]

pub mod connect;
pub mod dsl;
pub mod error;
pub mod integrate;
pub mod manifold;
pub mod numeric;
pub mod reparam;
pub mod warp;

pub use error::{GeoError, Result};
