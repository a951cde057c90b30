//! Gap function `Q(z_tilde, z)`, sup-gap oracles, theoretical bounds and
//! convergence-rate fitting.

mod bounds;
mod gap;

pub use bounds::{fit_loglog_slope, theoretical_bound, BoundKind, SlopeFit};
pub use gap::{gap_q, sup_gap_ascent, sup_gap_saddle, GapMethod, GapReport, GAP_FEASIBILITY_TOL};
