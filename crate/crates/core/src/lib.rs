//! Hazard-rate (HR) upper bounds on cache hit probability.
//!
//! The crate is organised around six pieces:
//!
//! - [`hazard_models`]: inter-request-time laws with exact hazard rates, Zipf
//!   popularity and Generalized-Pareto fitting.
//! - [`traffic_gen`]: seeded renewal, on-off, MMPP and shot-noise trace
//!   generators plus the canonical trace CSV format.
//! - [`bounds`]: per-request hazard ranking (HR-E, HR-VB, HR-VC), the knapsack
//!   solvers behind them, and the offline Bélády bound.
//! - [`policies`]: online replacement policies (LRU, FIFO, RANDOM, STATIC, LFU,
//!   GDSF) simulated request by request.
//! - [`analytic`]: closed-form HR hit probabilities for Poisson, on-off and
//!   MMPP traffic.
//! - [`experiment`]: configuration-driven sweeps, result rows and summaries.

pub mod analytic;
pub mod bounds;
pub mod error;
pub mod experiment;
pub mod hazard_models;
pub mod policies;
pub mod stats;
pub mod traffic_gen;

pub use error::{Error, Result};
