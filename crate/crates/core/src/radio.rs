//! SINR evaluation, per-UE rates, the network sum-rate objective, and the
//! feasibility check over QoS and power-cap constraints.
//!
//! All SINRs are linear ratios; rates are `log2(1 + sinr)` in bits/s/Hz. A
//! denied D2D pair transmits nothing and contributes exactly zero rate.

use crate::channel::{GainTable, NoiseModel};
use crate::topology::CellLayout;
use serde::Serialize;
use std::collections::BTreeSet;
use thiserror::Error;

/// Relative tolerance for treating a QoS or cap constraint as satisfied or
/// equal-active. Shared by the power solvers and the feasibility check.
pub const FEASIBILITY_REL_TOL: f64 = 1e-9;

/// dB value to linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Linear power ratio to dB.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// dBm to watts: `10^((dBm - 30) / 10)`.
pub fn dbm_to_watt(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Watts to dBm.
pub fn watt_to_dbm(watt: f64) -> f64 {
    10.0 * watt.log10() + 30.0
}

/// Which D2D pairs reuse which resource block.
///
/// `per_rb[i]` lists the pairs admitted to CUE `i`'s RB in admission order;
/// `denied` holds every pair admitted nowhere. Together they partition the
/// pair index set: a pair appears in at most one RB list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Assignment {
    pub per_rb: Vec<Vec<usize>>,
    pub denied: BTreeSet<usize>,
}

impl Assignment {
    /// All pairs denied: the starting state of every allocation algorithm.
    pub fn all_denied(n_cues: usize, n_d2d: usize) -> Self {
        Assignment {
            per_rb: vec![Vec::new(); n_cues],
            denied: (0..n_d2d).collect(),
        }
    }

    /// RB index hosting pair `j`, or `None` when denied.
    pub fn rb_of(&self, j: usize) -> Option<usize> {
        self.per_rb.iter().position(|rb| rb.contains(&j))
    }

    pub fn admitted_count(&self) -> usize {
        self.per_rb.iter().map(Vec::len).sum()
    }

    /// Structural check of the reuse constraints: every pair index below
    /// `n_d2d` appears exactly once across RB lists or the denied set.
    pub fn validate(&self, n_d2d: usize) -> Result<(), AssignmentError> {
        let mut seen = BTreeSet::new();
        for (rb, list) in self.per_rb.iter().enumerate() {
            for &j in list {
                if j >= n_d2d {
                    return Err(AssignmentError::UnknownPair { pair: j, rb });
                }
                if !seen.insert(j) {
                    return Err(AssignmentError::Duplicated { pair: j });
                }
            }
        }
        for &j in &self.denied {
            if j >= n_d2d {
                return Err(AssignmentError::UnknownPair { pair: j, rb: usize::MAX });
            }
            if seen.contains(&j) {
                return Err(AssignmentError::Duplicated { pair: j });
            }
        }
        let covered = seen.len() + self.denied.len();
        if covered != n_d2d {
            return Err(AssignmentError::Uncovered { covered, n_d2d });
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AssignmentError {
    #[error("pair {pair} appears more than once")]
    Duplicated { pair: usize },
    #[error("pair {pair} out of range (rb {rb})")]
    UnknownPair { pair: usize, rb: usize },
    #[error("{covered} of {n_d2d} pairs covered by RB lists plus denied set")]
    Uncovered { covered: usize, n_d2d: usize },
}

/// Transmit powers in linear watts. Denied pairs carry zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerVector {
    pub p_c: Vec<f64>,
    pub p_d: Vec<f64>,
}

impl PowerVector {
    pub fn zeros(n_cues: usize, n_d2d: usize) -> Self {
        PowerVector { p_c: vec![0.0; n_cues], p_d: vec![0.0; n_d2d] }
    }
}

/// Per-UE minimum SINR thresholds, linear.
#[derive(Debug, Clone, PartialEq)]
pub struct QosProfile {
    pub gamma_c_min: Vec<f64>,
    pub gamma_d_min: Vec<f64>,
}

/// One immutable cell realization: geometry, gains, noise, QoS minima and
/// power caps. Everything downstream reads from this snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub layout: CellLayout,
    pub gains: GainTable,
    pub noise: NoiseModel,
    pub qos: QosProfile,
    /// Cap on every CUE transmit power, watts.
    pub p_c_max: f64,
    /// Cap on every D2D transmit power, watts.
    pub p_d_max: f64,
    /// Bandwidth of one RB in hertz; carried for reporting only, the rate
    /// objective is per-hertz.
    pub rb_bandwidth: f64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScenarioError {
    #[error("dimension mismatch: {what}")]
    DimensionMismatch { what: String },
    #[error("nonpositive parameter: {what}")]
    NonPositive { what: String },
}

impl Scenario {
    pub fn new(
        layout: CellLayout,
        gains: GainTable,
        noise: NoiseModel,
        qos: QosProfile,
        p_c_max: f64,
        p_d_max: f64,
        rb_bandwidth: f64,
    ) -> Result<Self, ScenarioError> {
        let n = layout.n_cues();
        let m = layout.n_d2d();
        let dims = [
            ("gains.g_cb", gains.g_cb.len(), n),
            ("gains.g_d", gains.g_d.len(), m),
            ("gains.h_db", gains.h_db.len(), m),
            ("gains.h_cd rows", gains.h_cd.len(), n),
            ("gains.h_dd rows", gains.h_dd.len(), m),
            ("qos.gamma_c_min", qos.gamma_c_min.len(), n),
            ("qos.gamma_d_min", qos.gamma_d_min.len(), m),
        ];
        for (what, got, want) in dims {
            if got != want {
                return Err(ScenarioError::DimensionMismatch {
                    what: format!("{what}: got {got}, want {want}"),
                });
            }
        }
        if gains.h_cd.iter().any(|r| r.len() != m) || gains.h_dd.iter().any(|r| r.len() != m) {
            return Err(ScenarioError::DimensionMismatch { what: "gain matrix row length".into() });
        }
        for (what, v) in [("p_c_max", p_c_max), ("p_d_max", p_d_max)] {
            if !(v > 0.0) {
                return Err(ScenarioError::NonPositive { what: what.into() });
            }
        }
        if qos.gamma_c_min.iter().chain(qos.gamma_d_min.iter()).any(|g| !(*g > 0.0)) {
            return Err(ScenarioError::NonPositive { what: "QoS threshold".into() });
        }
        Ok(Scenario { layout, gains, noise, qos, p_c_max, p_d_max, rb_bandwidth })
    }

    pub fn n_cues(&self) -> usize {
        self.layout.n_cues()
    }

    pub fn n_d2d(&self) -> usize {
        self.layout.n_d2d()
    }
}

/// SINR of CUE `i`: desired power over the interference from D2D pairs
/// admitted to its RB plus the noise floor.
pub fn sinr_cue(scn: &Scenario, asg: &Assignment, pw: &PowerVector, i: usize) -> f64 {
    let interference: f64 = asg.per_rb[i]
        .iter()
        .map(|&j| pw.p_d[j] * scn.gains.h_db[j])
        .sum();
    pw.p_c[i] * scn.gains.g_cb[i] / (interference + scn.noise.total())
}

/// SINR of D2D pair `j`: zero when denied, otherwise desired power over the
/// CUE's interference, the other co-RB pairs' interference and noise.
pub fn sinr_d2d(scn: &Scenario, asg: &Assignment, pw: &PowerVector, j: usize) -> f64 {
    let Some(rb) = asg.rb_of(j) else {
        return 0.0;
    };
    let mut interference = pw.p_c[rb] * scn.gains.h_cd[rb][j];
    for &k in &asg.per_rb[rb] {
        if k != j {
            interference += pw.p_d[k] * scn.gains.h_dd[k][j];
        }
    }
    pw.p_d[j] * scn.gains.g_d[j] / (interference + scn.noise.total())
}

/// Network objective: the sum over all UEs of `log2(1 + sinr)` in bits/s/Hz.
/// Denied pairs contribute exactly zero.
pub fn sum_rate(scn: &Scenario, asg: &Assignment, pw: &PowerVector) -> f64 {
    let cue: f64 = (0..scn.n_cues())
        .map(|i| (1.0 + sinr_cue(scn, asg, pw, i)).log2())
        .sum();
    let d2d: f64 = (0..scn.n_d2d())
        .filter(|j| !asg.denied.contains(j))
        .map(|j| (1.0 + sinr_d2d(scn, asg, pw, j)).log2())
        .sum();
    cue + d2d
}

/// One violated constraint, with the signed slack (negative means violated).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    CueQos { cue: usize, sinr: f64, min: f64, slack: f64 },
    D2dQos { pair: usize, sinr: f64, min: f64, slack: f64 },
    CueCap { cue: usize, power: f64, cap: f64 },
    D2dCap { pair: usize, power: f64, cap: f64 },
    NegativePower { who: String, power: f64 },
}

/// Outcome of [`check_feasible`]: overall verdict plus every violation found.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

/// Checks every QoS constraint (CUEs always, D2D pairs only when admitted)
/// and every power bound, within [`FEASIBILITY_REL_TOL`] relative slack.
pub fn check_feasible(scn: &Scenario, asg: &Assignment, pw: &PowerVector) -> FeasibilityReport {
    let tol = FEASIBILITY_REL_TOL;
    let mut violations = Vec::new();

    for (i, &p) in pw.p_c.iter().enumerate() {
        if p < 0.0 {
            violations.push(Violation::NegativePower { who: format!("cue {i}"), power: p });
        }
        if p > scn.p_c_max * (1.0 + tol) {
            violations.push(Violation::CueCap { cue: i, power: p, cap: scn.p_c_max });
        }
    }
    for (j, &p) in pw.p_d.iter().enumerate() {
        if p < 0.0 {
            violations.push(Violation::NegativePower { who: format!("d2d {j}"), power: p });
        }
        if p > scn.p_d_max * (1.0 + tol) {
            violations.push(Violation::D2dCap { pair: j, power: p, cap: scn.p_d_max });
        }
    }
    for i in 0..scn.n_cues() {
        let sinr = sinr_cue(scn, asg, pw, i);
        let min = scn.qos.gamma_c_min[i];
        if sinr < min * (1.0 - tol) {
            violations.push(Violation::CueQos { cue: i, sinr, min, slack: sinr - min });
        }
    }
    for j in 0..scn.n_d2d() {
        if asg.denied.contains(&j) {
            continue;
        }
        let sinr = sinr_d2d(scn, asg, pw, j);
        let min = scn.qos.gamma_d_min[j];
        if sinr < min * (1.0 - tol) {
            violations.push(Violation::D2dQos { pair: j, sinr, min, slack: sinr - min });
        }
    }

    FeasibilityReport { feasible: violations.is_empty(), violations }
}
