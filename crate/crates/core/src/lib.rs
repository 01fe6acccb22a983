//! Rising rested bandits with known horizons.
//!
//! A rested "rising" bandit is a multi-armed bandit whose expected reward per
//! arm is a non-decreasing function of how many times that arm has been
//! pulled. When the horizon `T` is known in advance, the optimal policy is to
//! commit to the single arm with the largest cumulative mean over `T` pulls,
//! and which arm that is depends on `T` itself. This crate provides:
//!
//! - [`env`]: mean-reward curves, noise models, instance validation, and
//!   seeded random instance generators (linear-then-flat and concave
//!   families).
//! - [`policy`]: the horizon-aware CURE-UCB index policy, its deterministic
//!   variant, a deterministic slope-tracking baseline, sliding-window UCB,
//!   Rexp3, and a fixed-arm oracle.
//! - [`eval`]: episode execution, exact optimal-policy computation, a
//!   brute-force allocation oracle for small horizons, and sweep aggregation
//!   (mean regret with confidence intervals, average ranks, pairwise win
//!   rates).
//! - [`theory`]: environment complexity measures, a closed-form regret upper
//!   bound, and empirical certification suites for the dominance and
//!   concentration properties the index policy is built on.
//!
//! Everything is deterministic given explicit seeds; parallel sweeps derive
//! per-episode seeds from cell identity so results are independent of the
//! degree of parallelism.

pub mod env;
pub mod eval;
pub mod policy;
pub mod theory;
pub mod util;
