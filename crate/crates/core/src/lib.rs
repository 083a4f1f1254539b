//! Deterministic simulator and solver library for QoS-aware joint spectrum and
//! power allocation in a D2D-underlay cellular uplink where several D2D pairs
//! may reuse the resource block of one cellular user.
//!
//! The crate is organized around the stages of one cell realization:
//!
//! * [`topology`] samples cell geometry (cellular users, clustered D2D pairs),
//! * [`channel`] turns geometry into link gains (pathloss, shadowing, fading),
//! * [`radio`] evaluates SINRs, rates and constraint feasibility,
//! * [`power`] solves per-RB power control (closed form, equal-active minimum
//!   power, and the power maximization walk),
//! * [`allocation`] runs the distance/power guided admission heuristic,
//! * [`baselines`] provides the single-pair, full-CSI greedy and exhaustive
//!   comparison algorithms,
//! * [`harness`] runs seeded Monte Carlo experiments and writes CSV results.
//!
//! Everything is deterministic under a fixed seed: the same seed reproduces
//! layouts, gain tables and allocation results bit for bit.

pub mod allocation;
pub mod baselines;
pub mod channel;
pub mod harness;
pub mod power;
pub mod radio;
pub mod topology;

pub use allocation::{allocate, AllocationResult};
pub use baselines::{all_csi_greedy, exhaustive, three_step, AllCsiScoring};
pub use channel::{compute_gains, GainTable, NoiseModel};
pub use harness::{
    build_scenario, emit_results, predicted_counters, run_experiment, trial_seed, Algorithm,
    CounterVariant, EffortCounters, ExperimentConfig, TrialRecord,
};
pub use power::{
    first_pair_powers, max_power_walk, min_power_solve, spectral_feasibility, PowerSolveOutcome,
    RbGroup,
};
pub use radio::{check_feasible, sinr_cue, sinr_d2d, sum_rate, Assignment, PowerVector, QosProfile, Scenario};
pub use topology::{distance, generate_layout, CellLayout, Position};
