//! Seeded Monte Carlo runner: per-trial seed derivation, scenario assembly
//! from a config, and the parallel trial loop.
//!
//! Seed discipline: `trial_seed` maps (master seed, trial index) through a
//! bijective mixer, so distinct indices can never collide; layout, gain and
//! QoS streams then derive from the trial seed by fixed tag mixes. A trial
//! index yields the same scenario family across configs, which pairs trials
//! for cross-config comparisons (common random numbers).

use crate::allocation::{allocate, AllocationResult};
use crate::baselines::{all_csi_greedy, exhaustive, three_step};
use crate::channel::{compute_gains, NoiseModel};
use crate::harness::config::{Algorithm, ConfigError, ExperimentConfig};
use crate::radio::{db_to_linear, dbm_to_watt, QosProfile, Scenario};
use crate::topology::generate_layout;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// One algorithm run on one trial scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub n_cues: usize,
    pub n_d2d: usize,
    pub cell_radius: f64,
    pub cluster_radius: f64,
    pub sum_rate: f64,
    pub admitted: usize,
    pub matching_states: u64,
    pub signaling_gains: u64,
    /// Wall-clock milliseconds; informational only and excluded from the
    /// raw CSV so output stays byte-reproducible.
    pub wall_ms: f64,
}

/// SplitMix64 finalizer; bijective on u64.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-trial seed: a bijective mix of the master seed and the trial index,
/// so seeds never collide across indices.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    mix(master ^ mix(index))
}

/// Headroom factor applied when a CUE's drawn QoS threshold exceeds its
/// interference-free SINR at full power. The paper assumes every scheduled
/// CUE is serviceable alone (Algorithm 1 falls back to the CUE at P_C,max);
/// a deep-faded cell-edge draw would make even that infeasible, so the
/// threshold clamps just below the achievable ceiling.
const CUE_QOS_HEADROOM: f64 = 0.999;

/// Builds the complete trial scenario for one (config, cluster radius,
/// trial seed) triple. Draw order: layout, gains, then QoS thresholds
/// (all CUEs, then all pairs, uniform in dB).
pub fn build_scenario(cfg: &ExperimentConfig, cluster_radius: f64, seed: u64) -> Scenario {
    let layout = generate_layout(
        cfg.n_cues,
        cfg.n_d2d,
        cfg.cell_radius,
        cluster_radius,
        mix(seed ^ 0x01),
    )
    .expect("config validation guarantees layout parameters");
    let gains = compute_gains(
        &layout,
        cfg.pathloss_exponent,
        cfg.shadowing_sigma_db,
        cfg.fading,
        mix(seed ^ 0x02),
    );
    let noise = NoiseModel::new(
        dbm_to_watt(cfg.noise_dbm),
        cfg.sigma_s2_dbm.map(dbm_to_watt).unwrap_or(0.0),
    );
    let p_c_max = dbm_to_watt(cfg.p_c_max_dbm);
    let p_d_max = dbm_to_watt(cfg.p_d_max_dbm);

    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed ^ 0x03));
    let (lo, hi) = cfg.qos_range_db;
    let mut draw = |n: usize| -> Vec<f64> {
        (0..n).map(|_| db_to_linear(rng.random_range(lo..=hi))).collect()
    };
    let mut gamma_c_min = draw(cfg.n_cues);
    let gamma_d_min = draw(cfg.n_d2d);
    for (gamma, &g) in gamma_c_min.iter_mut().zip(&gains.g_cb) {
        let ceiling = CUE_QOS_HEADROOM * p_c_max * g / noise.total();
        if *gamma > ceiling {
            *gamma = ceiling;
        }
    }

    Scenario::new(
        layout,
        gains,
        noise,
        QosProfile { gamma_c_min, gamma_d_min },
        p_c_max,
        p_d_max,
        cfg.total_bandwidth / cfg.n_cues as f64,
    )
    .expect("dimensions consistent by construction")
}

fn run_algorithm(
    alg: Algorithm,
    scn: &Scenario,
    cfg: &ExperimentConfig,
    proposed: &AllocationResult,
) -> AllocationResult {
    match alg {
        Algorithm::Proposed => proposed.clone(),
        Algorithm::ThreeStep => three_step(scn),
        Algorithm::AllCsi => all_csi_greedy(scn, cfg.all_csi_scoring),
        Algorithm::Exhaustive => exhaustive(scn, proposed),
    }
}

/// Runs every requested algorithm on every (cluster radius, trial) scenario.
/// Records are ordered by sweep position, then trial, then the config's
/// algorithm order, independent of worker scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>, ConfigError> {
    cfg.validate()?;
    let combos: Vec<(f64, usize)> = cfg
        .cluster_radius_sweep
        .iter()
        .flat_map(|&r| (0..cfg.trials).map(move |t| (r, t)))
        .collect();

    let nested: Vec<Vec<TrialRecord>> = combos
        .par_iter()
        .map(|&(cluster_radius, trial)| {
            let seed = trial_seed(cfg.seed, trial as u64);
            let scn = build_scenario(cfg, cluster_radius, seed);
            let proposed = allocate(&scn);
            cfg.algorithms
                .iter()
                .map(|&alg| {
                    let started = std::time::Instant::now();
                    let result = run_algorithm(alg, &scn, cfg, &proposed);
                    let wall_ms = started.elapsed().as_secs_f64() * 1e3;
                    TrialRecord {
                        trial,
                        seed,
                        algorithm: alg,
                        n_cues: cfg.n_cues,
                        n_d2d: cfg.n_d2d,
                        cell_radius: cfg.cell_radius,
                        cluster_radius,
                        sum_rate: result.sum_rate,
                        admitted: result.assignment.admitted_count(),
                        matching_states: result.counters.matching_states,
                        signaling_gains: result.counters.signaling_gains,
                        wall_ms,
                    }
                })
                .collect()
        })
        .collect();

    Ok(nested.into_iter().flatten().collect())
}
