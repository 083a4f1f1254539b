//! Link gains from geometry: distance pathloss, log-normal shadowing and
//! Rayleigh fast fading.
//!
//! A gain is `d^(-alpha) * 10^(X/10) * F` with `X ~ Normal(0, sigma_db^2)`
//! and `F ~ Exp(1)` (unit-mean exponential power, i.e. Rayleigh amplitude).
//! With fading disabled the gain is the pure pathloss `d^(-alpha)`.
//!
//! Draw order over the table is fixed (CUE-to-BS, D2D desired, D2D-to-BS,
//! CUE-to-D2D rows, D2D-to-D2D rows), one shadowing then one fading draw per
//! link, so a seed reproduces the whole table bit for bit.

use crate::topology::{distance, CellLayout};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Normal};
use std::fmt::Write as _;

/// All link gains of one cell realization, dimensionless linear power ratios.
///
/// Indexing convention: `i` ranges over CUEs, `j`/`k` over D2D pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct GainTable {
    /// CUE i to base station (desired cellular link).
    pub g_cb: Vec<f64>,
    /// D2D pair j transmitter to its own receiver (desired D2D link).
    pub g_d: Vec<f64>,
    /// D2D pair j transmitter to base station (interference to cellular).
    pub h_db: Vec<f64>,
    /// CUE i to receiver of D2D pair j (interference to D2D), `[i][j]`.
    pub h_cd: Vec<Vec<f64>>,
    /// Transmitter of pair k to receiver of pair j, `[k][j]`. The diagonal is
    /// the pair's own desired link and is never read as interference.
    pub h_dd: Vec<Vec<f64>>,
}

impl GainTable {
    pub fn n_cues(&self) -> usize {
        self.g_cb.len()
    }

    pub fn n_d2d(&self) -> usize {
        self.g_d.len()
    }
}

/// Receiver noise terms in watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    /// AWGN power per RB.
    pub sigma_n2: f64,
    /// Signal-processing noise power at the receiver.
    pub sigma_s2: f64,
}

impl NoiseModel {
    pub fn new(sigma_n2: f64, sigma_s2: f64) -> Self {
        assert!(sigma_n2 > 0.0, "AWGN power must be positive");
        assert!(sigma_s2 >= 0.0, "signal-processing noise must be nonnegative");
        NoiseModel { sigma_n2, sigma_s2 }
    }

    /// Total noise floor entering every SINR denominator.
    pub fn total(&self) -> f64 {
        self.sigma_n2 + self.sigma_s2
    }
}

fn link_gain<R: Rng>(
    d: f64,
    pathloss_exponent: f64,
    shadow: &Option<Normal<f64>>,
    fading: bool,
    rng: &mut R,
) -> f64 {
    let base = d.powf(-pathloss_exponent);
    if !fading {
        return base;
    }
    let shadow_db: f64 = match shadow {
        Some(n) => n.sample(rng),
        None => 0.0,
    };
    let fade: f64 = Exp1.sample(rng);
    base * 10f64.powf(shadow_db / 10.0) * fade
}

/// Computes the full gain table for a layout.
///
/// `pathloss_exponent` is the positive exponent `alpha` of `d^(-alpha)`.
/// With `fading = false` the table is the deterministic pathloss and the seed
/// is unused. Distances are clamped by the topology floor, so every gain is
/// finite and positive.
pub fn compute_gains(
    layout: &CellLayout,
    pathloss_exponent: f64,
    shadowing_sigma_db: f64,
    fading: bool,
    rng_seed: u64,
) -> GainTable {
    assert!(pathloss_exponent > 2.0, "pathloss exponent must exceed 2");
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let shadow = if shadowing_sigma_db > 0.0 {
        Some(Normal::new(0.0, shadowing_sigma_db).expect("valid shadowing sigma"))
    } else {
        None
    };
    let bs = layout.bs_position;
    let gain = |d: f64, rng: &mut ChaCha8Rng| link_gain(d, pathloss_exponent, &shadow, fading, rng);

    let g_cb: Vec<f64> = layout
        .cue_positions
        .iter()
        .map(|p| gain(distance(*p, bs), &mut rng))
        .collect();
    let g_d: Vec<f64> = (0..layout.n_d2d())
        .map(|j| gain(distance(layout.d2d_tx_positions[j], layout.d2d_rx_positions[j]), &mut rng))
        .collect();
    let h_db: Vec<f64> = layout
        .d2d_tx_positions
        .iter()
        .map(|p| gain(distance(*p, bs), &mut rng))
        .collect();
    let h_cd: Vec<Vec<f64>> = layout
        .cue_positions
        .iter()
        .map(|c| {
            layout
                .d2d_rx_positions
                .iter()
                .map(|r| gain(distance(*c, *r), &mut rng))
                .collect()
        })
        .collect();
    let mut h_dd = vec![vec![0.0; layout.n_d2d()]; layout.n_d2d()];
    for (k, row) in h_dd.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = if k == j {
                // Own tx-to-rx link; identical to the desired gain and never
                // used as interference. No RNG draw is consumed.
                g_d[k]
            } else {
                gain(distance(layout.d2d_tx_positions[k], layout.d2d_rx_positions[j]), &mut rng)
            };
        }
    }

    GainTable { g_cb, g_d, h_db, h_cd, h_dd }
}

/// Serializes a gain table to CSV (`link_type,i,j,gain`), RFC 4180 with CRLF.
///
/// Unary links leave `j` empty; `h_dd` rows omit the unused diagonal. Gains
/// use scientific notation to stay compact at pathloss scales.
pub fn gains_to_csv(gains: &GainTable) -> String {
    let mut out = String::new();
    out.push_str("link_type,i,j,gain\r\n");
    for (i, g) in gains.g_cb.iter().enumerate() {
        let _ = write!(out, "cue_bs,{i},,{g:e}\r\n");
    }
    for (j, g) in gains.g_d.iter().enumerate() {
        let _ = write!(out, "d2d_desired,{j},,{g:e}\r\n");
    }
    for (j, g) in gains.h_db.iter().enumerate() {
        let _ = write!(out, "d2d_bs,{j},,{g:e}\r\n");
    }
    for (i, row) in gains.h_cd.iter().enumerate() {
        for (j, g) in row.iter().enumerate() {
            let _ = write!(out, "cue_d2d,{i},{j},{g:e}\r\n");
        }
    }
    for (k, row) in gains.h_dd.iter().enumerate() {
        for (j, g) in row.iter().enumerate() {
            if k != j {
                let _ = write!(out, "d2d_d2d,{k},{j},{g:e}\r\n");
            }
        }
    }
    out
}
