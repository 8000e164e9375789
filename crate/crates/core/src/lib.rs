//! Strongly adaptive regret minimization with limited bandit feedback.
//!
//! * [`online`]: arm distributions, importance-weighted estimates, EXP3.
//! * [`stabl`]: the multi-armed bandit learner, its ablations and the
//!   classic EXP3 baseline.
//! * [`bco`]: the bandit convex optimization learner (three-query and
//!   two-query surrogate modes).
//! * [`environments`]: oblivious synthetic adversaries and the query protocol.
//! * [`evaluation`]: static and strongly adaptive regret, moving averages.
//! * [`experiment`]: config parsing and the seeded, parallel runner.

pub mod bco;
pub mod environments;
pub mod error;
pub mod evaluation;
pub mod experiment;
pub mod online;
pub mod rng;
pub mod stabl;

pub use error::{Error, Result};
