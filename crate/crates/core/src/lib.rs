//! Gradient sliding for variational inequalities `VI(Z; G, H, J)` with a
//! smooth convex `G`, a Lipschitz monotone `H` and a simple convex `J`.
//!
//! The sliding methods evaluate `grad G` once per outer iteration and reuse
//! it across `T_k` cheap inner steps on `H`, reaching an `eps`-solution with
//! `O(sqrt(L/eps))` gradient calls and `O(sqrt(L/eps) + M/eps)` operator calls.

pub mod algorithms;
pub mod error;
pub mod evaluation;
pub mod experiment;
pub mod geometry;
pub mod problems;
pub mod space;

pub use error::{Error, Result};
