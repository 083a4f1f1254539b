//! Command-line front end for the D2D underlay allocation simulator.
//!
//! `run` executes a seeded Monte Carlo experiment and writes CSV and plot
//! data, `counters` prints the predicted complexity and signaling figures,
//! and `verify` exercises the library's core invariants on small random
//! instances as a quick self-check.

use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use clap::{Parser, Subcommand};
use d2dsim_core::{
    all_csi_greedy, allocate, build_scenario, check_feasible, emit_results, exhaustive,
    predicted_counters, run_experiment, three_step, Algorithm, CounterVariant, ExperimentConfig,
};

#[derive(Parser)]
#[command(
    name = "d2dsim",
    version,
    about = "QoS-aware spectrum and power allocation for D2D pairs reusing cellular uplink RBs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo experiment and write result files.
    Run {
        /// Config file of `key=value` lines; built-in defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the number of trials per cluster radius.
        #[arg(long)]
        trials: Option<usize>,
        /// Override the master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the algorithm list, comma separated
        /// (proposed, three_step, all_csi, exhaustive).
        #[arg(long)]
        algorithms: Option<String>,
        /// Directory for trials.csv, aggregate.csv and fig*.dat.
        #[arg(long, default_value = "results")]
        out_dir: PathBuf,
    },
    /// Print predicted matching-state and signaling-gain counts for N CUEs
    /// and M D2D pairs.
    Counters { n_cues: usize, n_d2d: usize },
    /// Check core invariants on small random instances.
    Verify {
        /// Scenarios per check.
        #[arg(long, default_value_t = 25)]
        trials: u64,
        /// Master seed for the generated scenarios.
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { config, trials, seed, algorithms, out_dir } => {
            cmd_run(config, trials, seed, algorithms, out_dir)
        }
        Command::Counters { n_cues, n_d2d } => {
            cmd_counters(n_cues, n_d2d);
            Ok(())
        }
        Command::Verify { trials, seed } => cmd_verify(trials, seed),
    }
}

fn cmd_run(
    config: Option<PathBuf>,
    trials: Option<usize>,
    seed: Option<u64>,
    algorithms: Option<String>,
    out_dir: PathBuf,
) -> Result<()> {
    let mut cfg = match &config {
        Some(path) => ExperimentConfig::from_file(path)
            .with_context(|| format!("loading config {}", path.display()))?,
        None => ExperimentConfig::default(),
    };
    if let Some(t) = trials {
        cfg.trials = t;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(list) = algorithms {
        cfg.algorithms = list
            .split(',')
            .map(Algorithm::parse)
            .collect::<Result<Vec<_>, _>>()
            .context("parsing --algorithms")?;
    }

    let records = run_experiment(&cfg).context("running experiment")?;
    let files = emit_results(&records, &out_dir).context("writing results")?;

    println!(
        "{} records ({} algorithms x {} radii x {} trials)",
        records.len(),
        cfg.algorithms.len(),
        cfg.cluster_radius_sweep.len(),
        cfg.trials
    );
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn cmd_counters(n_cues: usize, n_d2d: usize) {
    println!("N = {n_cues} CUEs, M = {n_d2d} D2D pairs");
    for (label, variant) in
        [("optimal ", CounterVariant::Optimal), ("proposed", CounterVariant::Proposed)]
    {
        let c = predicted_counters(n_cues, n_d2d, variant);
        println!(
            "{label}  matching_states = {}  signaling_gains = {}",
            c.matching_states, c.signaling_gains
        );
    }
}

/// Invariant suite over generated scenarios: every algorithm's output must
/// satisfy all QoS and cap constraints, tallied effort must respect the
/// predicted bounds, and the exhaustive oracle must dominate the heuristic.
fn cmd_verify(trials: u64, seed: u64) -> Result<()> {
    ensure!(trials >= 1, "verify needs at least one trial");

    let feas_cfg =
        ExperimentConfig { n_cues: 3, n_d2d: 8, ..ExperimentConfig::default() };
    let scoring = feas_cfg.all_csi_scoring;
    for t in 0..trials {
        let scn = build_scenario(&feas_cfg, 30.0, seed.wrapping_add(t));
        let proposed = allocate(&scn);
        for (name, out) in [
            ("proposed", &proposed),
            ("three_step", &three_step(&scn)),
            ("all_csi", &all_csi_greedy(&scn, scoring)),
        ] {
            let report = check_feasible(&scn, &out.assignment, &out.powers);
            if !report.violations.is_empty() {
                bail!("{name} violates constraints on trial {t}: {:?}", report.violations);
            }
        }
        let flat = predicted_counters(feas_cfg.n_cues, feas_cfg.n_d2d, CounterVariant::Optimal);
        ensure!(
            proposed.counters.signaling_gains <= flat.signaling_gains,
            "proposed signaling exceeds the full-CSI figure on trial {t}"
        );
        ensure!(
            proposed.counters.matching_states <= (feas_cfg.n_cues + feas_cfg.n_d2d) as u64,
            "proposed matching states exceed M + N on trial {t}"
        );
    }
    println!("feasibility and counters: ok ({trials} scenarios, N=3, M=8)");

    let oracle_cfg = ExperimentConfig { n_cues: 2, n_d2d: 4, ..ExperimentConfig::default() };
    let oracle_trials = trials.min(10);
    for t in 0..oracle_trials {
        let scn = build_scenario(&oracle_cfg, 30.0, seed.wrapping_add(t));
        let proposed = allocate(&scn);
        let oracle = exhaustive(&scn, &proposed);
        ensure!(
            oracle.sum_rate >= proposed.sum_rate,
            "exhaustive fell below the heuristic on trial {t}: {} < {}",
            oracle.sum_rate,
            proposed.sum_rate
        );
    }
    println!("exhaustive dominance: ok ({oracle_trials} scenarios, N=2, M=4)");

    println!("all checks passed");
    Ok(())
}
