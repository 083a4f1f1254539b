//! Matching-state and signaling-overhead accounting.
//!
//! Tallied counters are exact counts collected while an algorithm runs; the
//! predictions here evaluate closed-form complexity expressions so both can
//! be reported side by side.

use serde::Serialize;

/// Exact effort tallies of one algorithm run: candidate mappings examined
/// and channel gains the BS had to learn.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct EffortCounters {
    pub matching_states: u64,
    pub signaling_gains: u64,
}

/// Which closed-form prediction to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CounterVariant {
    /// Exhaustive matching: `N 2^M` states, full-CSI signaling.
    Optimal,
    /// The proposed heuristic: about `M` states, partial-CSI signaling.
    Proposed,
}

/// Closed-form complexity predictions.
///
/// Optimal: states `N 2^M` (saturating), signaling `N(M+1) + 2M + M(M-1)`.
/// Proposed: states `M`, signaling `N(M+1) + 2M + M(M/N - 1)` with `M/N`
/// evaluated exactly and the product rounded to the nearest integer; the
/// sharing term is only integral when `M` is a multiple of `N`.
pub fn predicted_counters(n: usize, m: usize, variant: CounterVariant) -> EffortCounters {
    assert!(n >= 1, "at least one CUE");
    let nf = n as f64;
    let mf = m as f64;
    let base = n as u64 * (m as u64 + 1) + 2 * m as u64;
    match variant {
        CounterVariant::Optimal => {
            let states = if m >= 64 {
                u64::MAX
            } else {
                (n as u64).saturating_mul(1u64 << m)
            };
            EffortCounters {
                matching_states: states,
                signaling_gains: base + (m as u64) * (m as u64).saturating_sub(1),
            }
        }
        CounterVariant::Proposed => {
            // Negative for M < N; the total stays positive.
            let sharing = (mf * (mf / nf - 1.0)).round() as i64;
            EffortCounters {
                matching_states: m as u64,
                signaling_gains: (base as i64 + sharing) as u64,
            }
        }
    }
}
