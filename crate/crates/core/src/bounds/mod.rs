//! Hazard-rate upper bounds scored on request traces, the knapsack problems
//! behind the variable-size rules, and Bélády's offline bound.

mod belady;
mod knapsack;
mod score;
mod tracker;

pub use belady::{belady_score, brute_force_offline_optimal, BRUTE_FORCE_MAX_OBJECTS, BRUTE_FORCE_MAX_REQUESTS};
pub use knapsack::{brute_force_knapsack01, solve_fractional_knapsack, KnapsackSolution, KNAPSACK01_MAX_ITEMS};
pub use score::{
    hr_e_indicators, hr_e_score, hr_e_sweep, hr_vb_score, hr_vb_sweep, hr_vc_score, hr_vc_sweep, score_hazard_rules,
    warmup_count, BoundScore, RuleSweeps,
};
pub use tracker::HazardTracker;
