//! Sign-changing solutions of the one-dimensional mean-curvature eigenvalue
//! problem
//!
//! ```text
//! -(u' / √(1 + κ u'²))' = λ u,   u(0) = u(1) = 0,
//! ```
//!
//! for κ > 0 (Euclidean curvature) and κ < 0 (Minkowski curvature).
//!
//! Solutions are built from the time map of a single symmetric hump
//! ([`timemap`]), tiled into nodal solutions by reflection ([`spectrum`]),
//! and cross-checked by direct shooting ([`shooting`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod par;
pub mod quadrature;
pub mod roots;
pub mod shooting;
pub mod spectrum;
pub mod timemap;
pub mod validate;

pub use error::{Error, Result};
