//! Shared fixtures for the criterion benchmarks: seeded scenarios at the
//! default parameter scale and feasible single-RB groups of a given size.

use d2dsim_core::{build_scenario, min_power_solve, ExperimentConfig, PowerSolveOutcome, RbGroup, Scenario};

/// Seeded scenario with the default cell (400 m) and the given cluster
/// radius; only the user counts and seed vary between fixtures.
pub fn scenario(n_cues: usize, n_d2d: usize, cluster_radius: f64, seed: u64) -> Scenario {
    let cfg = ExperimentConfig { n_cues, n_d2d, ..ExperimentConfig::default() };
    build_scenario(&cfg, cluster_radius, seed)
}

/// First seed whose full group (one CUE plus all `k` pairs in one RB) is
/// feasible, together with its minimum-power solution. Keeps power-control
/// benchmarks measuring the feasible path rather than early-out rejections.
pub fn feasible_group(k: usize) -> (Scenario, RbGroup, PowerSolveOutcome) {
    for seed in 0..1000 {
        let scn = scenario(1, k, 50.0, seed);
        let group = RbGroup::new(0, (0..k).collect());
        let solved = min_power_solve(&group, &scn);
        if solved.feasible {
            return (scn, group, solved);
        }
    }
    panic!("no feasible group of size {k} in 1000 seeds");
}
