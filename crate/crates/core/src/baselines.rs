//! Comparison algorithms: the 3-step single-pair-per-RB method, the AllCSI
//! greedy method, and the exhaustive-matching oracle for small instances.
//!
//! All three return the same [`AllocationResult`] shape as the proposed
//! heuristic so the harness can treat algorithms uniformly. Power control
//! inside an RB is always the minimum-power solve followed by the
//! maximization walk; the algorithms differ only in how pairs are matched
//! to RBs and in their effort counters.

use std::collections::BTreeSet;

use ordered_float::OrderedFloat;
use pathfinding::matrix::Matrix;
use pathfinding::prelude::kuhn_munkres;
use serde::Serialize;

use crate::allocation::{cue_priority, AllocationResult, CandidateScore, ScoreKind};
use crate::harness::{predicted_counters, CounterVariant, EffortCounters};
use crate::power::{
    first_pair_powers, max_power_walk, min_power_solve, PowerSolveOutcome, RbGroup,
};
use crate::radio::{sum_rate, Assignment, PowerVector, Scenario};

/// Candidate scoring rule for the AllCSI greedy algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AllCsiScoring {
    /// Minimize the worst actual received interference at the candidate's
    /// receiver: max over in-RB transmitters of P_u times the link gain.
    PowerWeighted,
    /// Minimize the worst raw link gain into the candidate's receiver,
    /// ignoring transmit powers.
    GainOnly,
}

/// Rate of a CUE transmitting alone at its cap on an otherwise empty RB.
fn solo_rate(scn: &Scenario, cue: usize) -> f64 {
    (1.0 + scn.p_c_max * scn.gains.g_cb[cue] / scn.noise.total()).log2()
}

/// Rate gain of pairing one CUE with one D2D pair over the CUE alone at its
/// cap, with powers from the closed form pushed outward by the walk. `None`
/// when the two-user group cannot meet both QoS minima.
fn pair_weight(scn: &Scenario, cue: usize, pair: usize) -> Option<(f64, PowerSolveOutcome)> {
    let seed = first_pair_powers(scn, cue, pair);
    if !seed.feasible {
        return None;
    }
    let group = RbGroup::new(cue, vec![pair]);
    let walked = max_power_walk(&group, scn, &seed);
    let noise = scn.noise.total();
    let (p_c, p_d) = (walked.powers[0], walked.powers[1]);
    let cue_rate =
        (1.0 + p_c * scn.gains.g_cb[cue] / (noise + p_d * scn.gains.h_db[pair])).log2();
    let pair_rate =
        (1.0 + p_d * scn.gains.g_d[pair] / (noise + p_c * scn.gains.h_cd[cue][pair])).log2();
    Some((cue_rate + pair_rate - solo_rate(scn, cue), walked))
}

/// 3-step baseline: at most one D2D pair per RB. Every (CUE, pair)
/// combination is priced at its walk-maximized rate gain, and the best
/// single-pair-per-RB matching is picked by maximum-weight bipartite
/// matching; a CUE whose best use is staying alone keeps its cap power.
///
/// Effort counters: the matching prices all N*M two-user states, which needs
/// every cross gain of those states (N*M CUE-to-pair gains plus the N + 2M
/// direct and pair-to-BS gains) but no pair-to-pair gain.
pub fn three_step(scn: &Scenario) -> AllocationResult {
    let n = scn.n_cues();
    let m = scn.n_d2d();
    let mut asg = Assignment::all_denied(n, m);
    let mut pw = PowerVector::zeros(n, m);

    if m == 0 {
        for i in 0..n {
            pw.p_c[i] = scn.p_c_max;
        }
        let rate = sum_rate(scn, &asg, &pw);
        return AllocationResult {
            assignment: asg,
            powers: pw,
            sum_rate: rate,
            counters: EffortCounters::default(),
        };
    }

    let weights: Vec<Vec<Option<(f64, PowerSolveOutcome)>>> = (0..n)
        .map(|i| (0..m).map(|j| pair_weight(scn, i, j)).collect())
        .collect();

    // Columns 0..m are real pairs; the n trailing dummy columns let any CUE
    // stay alone at zero gain. Infeasible states sink far below every real
    // weight so the matching can never be forced onto one.
    const INFEASIBLE: f64 = -1e9;
    let rows = (0..n).map(|i| {
        (0..m)
            .map(|j| OrderedFloat(weights[i][j].as_ref().map_or(INFEASIBLE, |(w, _)| *w)))
            .chain(std::iter::repeat_n(OrderedFloat(0.0), n))
            .collect::<Vec<_>>()
    });
    let matrix = Matrix::from_rows(rows).expect("rows share one length");
    let (_, cols) = kuhn_munkres(&matrix);

    for (i, &col) in cols.iter().enumerate() {
        // A zero-gain real pair ties the dummy column; treat it as denial so
        // admission always means a strict improvement.
        if col < m {
            if let Some((w, walked)) = &weights[i][col] {
                if *w > 0.0 {
                    asg.per_rb[i] = vec![col];
                    asg.denied.remove(&col);
                    pw.p_c[i] = walked.powers[0];
                    pw.p_d[col] = walked.powers[1];
                    continue;
                }
            }
        }
        pw.p_c[i] = scn.p_c_max;
    }

    let rate = sum_rate(scn, &asg, &pw);
    AllocationResult {
        assignment: asg,
        powers: pw,
        sum_rate: rate,
        counters: EffortCounters {
            matching_states: (n * m) as u64,
            signaling_gains: (n * (m + 1) + 2 * m) as u64,
        },
    }
}

/// Worst interference term the candidate receiver of pair `j` would see
/// from the group's current transmitters, under the chosen scoring rule.
fn all_csi_score(
    scn: &Scenario,
    group: &RbGroup,
    powers: &PowerSolveOutcome,
    j: usize,
    scoring: AllCsiScoring,
) -> f64 {
    let weight = |p: f64, h: f64| match scoring {
        AllCsiScoring::PowerWeighted => p * h,
        AllCsiScoring::GainOnly => h,
    };
    let mut worst = weight(powers.powers[0], scn.gains.h_cd[group.cue][j]);
    for (a, &k) in group.pairs.iter().enumerate() {
        worst = worst.max(weight(powers.powers[1 + a], scn.gains.h_dd[k][j]));
    }
    worst
}

/// First-pair choice with full CSI: the candidate whose receiver has the
/// smallest gain from the CUE. Only the CUE will transmit in the RB, so a
/// power weight would scale all candidates equally; the raw gain decides
/// under both scoring rules.
fn select_all_csi_first(
    scn: &Scenario,
    cue: usize,
    denied: &BTreeSet<usize>,
) -> Option<CandidateScore> {
    let mut best: Option<CandidateScore> = None;
    for &j in denied {
        let score = scn.gains.h_cd[cue][j];
        if best.is_none_or(|b| score < b.score) {
            best = Some(CandidateScore { pair: j, score, kind: ScoreKind::FirstPair });
        }
    }
    best
}

/// Later-candidate choice with full CSI: minimize the worst interference
/// seen by the candidate's receiver. Ties break to the lowest pair index.
fn select_all_csi_next(
    scn: &Scenario,
    group: &RbGroup,
    powers: &PowerSolveOutcome,
    denied: &BTreeSet<usize>,
    scoring: AllCsiScoring,
) -> Option<CandidateScore> {
    let mut best: Option<CandidateScore> = None;
    for &j in denied {
        let score = all_csi_score(scn, group, powers, j, scoring);
        if best.is_none_or(|b| score < b.score) {
            best = Some(CandidateScore { pair: j, score, kind: ScoreKind::Subsequent });
        }
    }
    best
}

/// AllCSI greedy baseline: the proposed algorithm's skeleton with candidate
/// selection driven by measured interference links instead of distances.
/// Its signaling cost is the full-CSI figure regardless of how admissions
/// unfold, since every cross gain must reach the BS before selection starts.
pub fn all_csi_greedy(scn: &Scenario, scoring: AllCsiScoring) -> AllocationResult {
    let n = scn.n_cues();
    let m = scn.n_d2d();
    let mut asg = Assignment::all_denied(n, m);
    let mut pw = PowerVector::zeros(n, m);
    let mut denied: BTreeSet<usize> = (0..m).collect();
    let mut states: u64 = 0;

    for &cue in &cue_priority(scn).order {
        let Some(first) = select_all_csi_first(scn, cue, &denied) else {
            pw.p_c[cue] = scn.p_c_max;
            continue;
        };
        states += 1;

        let seed = first_pair_powers(scn, cue, first.pair);
        if !seed.feasible {
            pw.p_c[cue] = scn.p_c_max;
            continue;
        }

        let mut group = RbGroup::new(cue, vec![first.pair]);
        denied.remove(&first.pair);
        let mut solved = seed;

        while let Some(cand) = select_all_csi_next(scn, &group, &solved, &denied, scoring) {
            states += 1;
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

    let rate = sum_rate(scn, &asg, &pw);
    AllocationResult {
        assignment: asg,
        powers: pw,
        sum_rate: rate,
        counters: EffortCounters {
            matching_states: states,
            signaling_gains: predicted_counters(n, m, CounterVariant::Optimal).signaling_gains,
        },
    }
}

/// Enumeration of every mapping of D2D pairs to an RB or to denial:
/// (N+1)^M assignments, exhaustive and duplicate-free.
#[derive(Debug, Clone, Copy)]
pub struct MatchingEnumeration {
    n_cues: usize,
    n_d2d: usize,
}

impl MatchingEnumeration {
    pub fn new(n_cues: usize, n_d2d: usize) -> Self {
        MatchingEnumeration { n_cues, n_d2d }
    }

    /// Total number of assignments, (N+1)^M.
    pub fn count(&self) -> u128 {
        (self.n_cues as u128 + 1).pow(self.n_d2d as u32)
    }

    /// Iterates digit vectors `a` of length M with `a[j] <= N`; `a[j] < N`
    /// assigns pair j to RB `a[j]`, `a[j] == N` denies it.
    pub fn iter(&self) -> AssignmentIter {
        AssignmentIter { base: self.n_cues + 1, digits: Some(vec![0; self.n_d2d]) }
    }
}

/// Odometer over base-(N+1) digit vectors; see [`MatchingEnumeration::iter`].
pub struct AssignmentIter {
    base: usize,
    digits: Option<Vec<usize>>,
}

impl Iterator for AssignmentIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let digits = self.digits.as_mut()?;
        let out = digits.clone();
        let mut pos = 0;
        loop {
            if pos == digits.len() {
                self.digits = None;
                break;
            }
            digits[pos] += 1;
            if digits[pos] < self.base {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
        Some(out)
    }
}

/// Powers and rate for one full assignment, with pairs admitted to each RB
/// in ascending index order. `None` when any RB's group is infeasible.
fn evaluate_assignment(
    scn: &Scenario,
    digits: &[usize],
) -> Option<(Assignment, PowerVector, f64)> {
    let n = scn.n_cues();
    let m = digits.len();
    let mut asg = Assignment::all_denied(n, m);
    let mut pw = PowerVector::zeros(n, m);
    for (j, &d) in digits.iter().enumerate() {
        if d < n {
            asg.per_rb[d].push(j);
            asg.denied.remove(&j);
        }
    }
    for i in 0..n {
        if asg.per_rb[i].is_empty() {
            pw.p_c[i] = scn.p_c_max;
            continue;
        }
        let group = RbGroup::new(i, asg.per_rb[i].clone());
        let solved = min_power_solve(&group, scn);
        if !solved.feasible {
            return None;
        }
        let walked = max_power_walk(&group, scn, &solved);
        pw.p_c[i] = walked.powers[0];
        for (a, &j) in group.pairs.iter().enumerate() {
            pw.p_d[j] = walked.powers[1 + a];
        }
    }
    let rate = sum_rate(scn, &asg, &pw);
    Some((asg, pw, rate))
}

/// Exhaustive oracle: evaluates every (N+1)^M assignment plus the supplied
/// hint and keeps the best, so its sum-rate is an upper bound on the hint's
/// by construction. Guarded to small instances; the state count explodes
/// beyond them.
///
/// The hint wins ties, and an enumerated assignment replaces the incumbent
/// only on a strict improvement, keeping the result deterministic.
pub fn exhaustive(scn: &Scenario, hint: &AllocationResult) -> AllocationResult {
    let n = scn.n_cues();
    let m = scn.n_d2d();
    assert!(
        n <= 3 && m <= 8,
        "exhaustive search is limited to N <= 3 and M <= 8, got N = {n}, M = {m}"
    );

    let mut best_asg = hint.assignment.clone();
    let mut best_pw = hint.powers.clone();
    let mut best_rate = hint.sum_rate;
    let mut evaluated: u64 = 0;

    for digits in MatchingEnumeration::new(n, m).iter() {
        evaluated += 1;
        let Some((asg, pw, rate)) = evaluate_assignment(scn, &digits) else {
            continue;
        };
        if rate > best_rate {
            best_rate = rate;
            best_asg = asg;
            best_pw = pw;
        }
    }

    AllocationResult {
        assignment: best_asg,
        powers: best_pw,
        sum_rate: best_rate,
        counters: EffortCounters {
            matching_states: evaluated + 1,
            signaling_gains: predicted_counters(n, m, CounterVariant::Optimal).signaling_gains,
        },
    }
}
