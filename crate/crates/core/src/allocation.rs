//! The proposed admission heuristic: CUEs are served in descending order of
//! distance from the base station; each RB first admits the D2D pair farthest
//! from its CUE, then keeps admitting the candidate with the best
//! power-normalized distance metric until a candidate's minimum-power system
//! turns infeasible, and finally maximizes the group's powers with the walk.
//!
//! Only distances and the gains of already-tested links are consumed, which
//! is what the signaling tally counts: each channel gain is charged at most
//! once, when a computation first reads it.

use crate::harness::EffortCounters;
use crate::power::{first_pair_powers, max_power_walk, min_power_solve, PowerSolveOutcome, RbGroup};
use crate::radio::{
    check_feasible, sinr_cue, sinr_d2d, sum_rate, watt_to_dbm, Assignment, PowerVector, Scenario,
};
use crate::topology::distance;
use serde::Serialize;
use std::collections::BTreeSet;

/// CUE processing order: descending distance from the BS, ties by ascending
/// CUE index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CuePriority {
    pub order: Vec<usize>,
}

/// Why a candidate was scored: the first pair of an RB uses plain distance
/// from the CUE, later candidates the power-normalized distance metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ScoreKind {
    FirstPair,
    Subsequent,
}

/// A selected candidate pair and its winning score (meters for the first
/// pair, meters per watt afterwards).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CandidateScore {
    pub pair: usize,
    pub score: f64,
    pub kind: ScoreKind,
}

/// Complete output of one allocation algorithm on one scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AllocationResult {
    pub assignment: Assignment,
    pub powers: PowerVector,
    pub sum_rate: f64,
    pub counters: EffortCounters,
}

/// Channel gain identity for charge-once signaling accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum GainId {
    Gcb(usize),
    Gd(usize),
    Hdb(usize),
    Hcd(usize, usize),
    Hdd(usize, usize),
}

pub fn cue_priority(scn: &Scenario) -> CuePriority {
    let bs = scn.layout.bs_position;
    let mut order: Vec<usize> = (0..scn.n_cues()).collect();
    order.sort_by(|&a, &b| {
        let da = distance(scn.layout.cue_positions[a], bs);
        let db = distance(scn.layout.cue_positions[b], bs);
        db.partial_cmp(&da).unwrap().then(a.cmp(&b))
    });
    CuePriority { order }
}

/// Pair whose receiver lies farthest from the CUE, among the denied set.
/// Ties break to the lowest pair index. `None` when `denied` is empty.
pub fn select_first_pair(
    scn: &Scenario,
    cue: usize,
    denied: &BTreeSet<usize>,
) -> Option<CandidateScore> {
    let cue_pos = scn.layout.cue_positions[cue];
    let mut best: Option<CandidateScore> = None;
    for &j in denied {
        let score = distance(cue_pos, scn.layout.d2d_rx_positions[j]);
        if best.is_none_or(|b| score > b.score) {
            best = Some(CandidateScore { pair: j, score, kind: ScoreKind::FirstPair });
        }
    }
    best
}

/// Candidate with the largest power-normalized distance metric: for each
/// denied pair, the minimum over in-RB transmitters of distance to the
/// candidate's receiver divided by that transmitter's current power.
/// Zero-power transmitters cause no interference and are excluded from the
/// minimum. Ties break to the lowest pair index; `None` when empty.
pub fn select_next_pair(
    scn: &Scenario,
    group: &RbGroup,
    powers: &PowerSolveOutcome,
    denied: &BTreeSet<usize>,
) -> Option<CandidateScore> {
    let tx_positions: Vec<(crate::topology::Position, f64)> =
        std::iter::once((scn.layout.cue_positions[group.cue], powers.powers[0]))
            .chain(
                group
                    .pairs
                    .iter()
                    .enumerate()
                    .map(|(a, &k)| (scn.layout.d2d_tx_positions[k], powers.powers[1 + a])),
            )
            .collect();

    let mut best: Option<CandidateScore> = None;
    for &j in denied {
        let rx = scn.layout.d2d_rx_positions[j];
        let score = tx_positions
            .iter()
            .filter(|(_, p)| *p > 0.0)
            .map(|(pos, p)| distance(*pos, rx) / p)
            .fold(f64::INFINITY, f64::min);
        if best.is_none_or(|b| score > b.score) {
            best = Some(CandidateScore { pair: j, score, kind: ScoreKind::Subsequent });
        }
    }
    best
}

/// Runs the full admission heuristic on one scenario.
///
/// Per CUE, in priority order: the first-pair test uses the closed form; on
/// infeasibility the CUE transmits alone at its cap and the pair stays
/// denied but eligible for later RBs. Otherwise candidates join one at a
/// time until the first infeasible minimum-power solve (or the denied set
/// empties), after which the group's powers are maximized by the walk.
pub fn allocate(scn: &Scenario) -> AllocationResult {
    let n = scn.n_cues();
    let m = scn.n_d2d();
    let mut asg = Assignment::all_denied(n, m);
    let mut pw = PowerVector::zeros(n, m);
    let mut denied: BTreeSet<usize> = (0..m).collect();
    let mut states: u64 = 0;
    let mut charged: BTreeSet<GainId> = BTreeSet::new();

    for &cue in &cue_priority(scn).order {
        let Some(first) = select_first_pair(scn, cue, &denied) else {
            pw.p_c[cue] = scn.p_c_max;
            continue;
        };
        states += 1;
        charged.insert(GainId::Gcb(cue));
        charged.insert(GainId::Gd(first.pair));
        charged.insert(GainId::Hdb(first.pair));
        charged.insert(GainId::Hcd(cue, first.pair));

        let seed = first_pair_powers(scn, cue, first.pair);
        if !seed.feasible {
            pw.p_c[cue] = scn.p_c_max;
            continue;
        }

        let mut group = RbGroup::new(cue, vec![first.pair]);
        denied.remove(&first.pair);
        let mut solved = seed;

        while let Some(cand) = select_next_pair(scn, &group, &solved, &denied) {
            states += 1;
            charged.insert(GainId::Gd(cand.pair));
            charged.insert(GainId::Hdb(cand.pair));
            charged.insert(GainId::Hcd(cue, cand.pair));
            for &k in &group.pairs {
                charged.insert(GainId::Hdd(k, cand.pair));
                charged.insert(GainId::Hdd(cand.pair, k));
            }

            let mut enlarged = group.pairs.clone();
            enlarged.push(cand.pair);
            let trial_group = RbGroup::new(cue, enlarged);
            let trial = min_power_solve(&trial_group, scn);
            if !trial.feasible {
                break;
            }
            group = trial_group;
            solved = trial;
            denied.remove(&cand.pair);
        }

        let walked = max_power_walk(&group, scn, &solved);
        pw.p_c[cue] = walked.powers[0];
        for (a, &j) in group.pairs.iter().enumerate() {
            pw.p_d[j] = walked.powers[1 + a];
            asg.denied.remove(&j);
        }
        asg.per_rb[cue] = group.pairs;
    }

    let sum_rate = sum_rate(scn, &asg, &pw);
    AllocationResult {
        assignment: asg,
        powers: pw,
        sum_rate,
        counters: EffortCounters { matching_states: states, signaling_gains: charged.len() as u64 },
    }
}

/// Flat, serialization-friendly view of an [`AllocationResult`]: powers in
/// dBm (`None` for a silent transmitter), SINRs in dB, rates in bits/s/Hz.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRecord {
    pub per_rb: Vec<Vec<usize>>,
    pub denied: Vec<usize>,
    pub p_c_dbm: Vec<f64>,
    pub p_d_dbm: Vec<Option<f64>>,
    pub sinr_c_db: Vec<f64>,
    pub sinr_d_db: Vec<Option<f64>>,
    pub rate_c: Vec<f64>,
    pub rate_d: Vec<f64>,
    pub sum_rate: f64,
    pub matching_states: u64,
    pub signaling_gains: u64,
}

impl AllocationResult {
    /// Builds the flat record; `scn` must be the scenario this result was
    /// computed on.
    pub fn to_record(&self, scn: &Scenario) -> ResultRecord {
        let db = crate::radio::linear_to_db;
        let sinr_c: Vec<f64> =
            (0..scn.n_cues()).map(|i| sinr_cue(scn, &self.assignment, &self.powers, i)).collect();
        let sinr_d: Vec<f64> =
            (0..scn.n_d2d()).map(|j| sinr_d2d(scn, &self.assignment, &self.powers, j)).collect();
        ResultRecord {
            per_rb: self.assignment.per_rb.clone(),
            denied: self.assignment.denied.iter().copied().collect(),
            p_c_dbm: self.powers.p_c.iter().map(|&p| watt_to_dbm(p)).collect(),
            p_d_dbm: self
                .powers
                .p_d
                .iter()
                .map(|&p| if p > 0.0 { Some(watt_to_dbm(p)) } else { None })
                .collect(),
            sinr_c_db: sinr_c.iter().map(|&s| db(s)).collect(),
            sinr_d_db: sinr_d
                .iter()
                .map(|&s| if s > 0.0 { Some(db(s)) } else { None })
                .collect(),
            rate_c: sinr_c.iter().map(|&s| (1.0 + s).log2()).collect(),
            rate_d: sinr_d.iter().map(|&s| (1.0 + s).log2()).collect(),
            sum_rate: self.sum_rate,
            matching_states: self.counters.matching_states,
            signaling_gains: self.counters.signaling_gains,
        }
    }

    /// JSON text of [`Self::to_record`].
    pub fn to_json(&self, scn: &Scenario) -> String {
        serde_json::to_string(&self.to_record(scn)).expect("record serialization cannot fail")
    }

    /// Asserts the structural and radio-level feasibility contract; used by
    /// tests and the verification CLI.
    pub fn assert_valid(&self, scn: &Scenario) {
        self.assignment.validate(scn.n_d2d()).expect("assignment structure");
        let report = check_feasible(scn, &self.assignment, &self.powers);
        assert!(report.feasible, "violations: {:?}", report.violations);
    }
}
