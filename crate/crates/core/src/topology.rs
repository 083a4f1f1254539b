//! Cell geometry: uniformly distributed cellular users and clustered D2D pairs.
//!
//! All randomness is owned per call through an explicit seed, so layouts are
//! reproducible bit for bit. Distances carry a floor of
//! [`MIN_LINK_DISTANCE_M`] because the `d^(-alpha)` pathloss model diverges at
//! zero separation.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use thiserror::Error;

/// Lower clamp for every link distance, in meters.
pub const MIN_LINK_DISTANCE_M: f64 = 1.0;

/// A point in the cell plane, coordinates in meters. The base station sits at
/// the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const ORIGIN: Position = Position { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Position { x, y }
    }
}

/// Euclidean distance between two positions, clamped below by
/// [`MIN_LINK_DISTANCE_M`].
pub fn distance(a: Position, b: Position) -> f64 {
    let d = ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt();
    d.max(MIN_LINK_DISTANCE_M)
}

/// One sampled cell realization: cellular user positions plus the transmitter
/// and receiver of every D2D pair, each pair confined to its own cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct CellLayout {
    pub cell_radius: f64,
    pub bs_position: Position,
    pub cue_positions: Vec<Position>,
    pub d2d_tx_positions: Vec<Position>,
    pub d2d_rx_positions: Vec<Position>,
    pub cluster_centers: Vec<Position>,
    pub cluster_radius: f64,
}

impl CellLayout {
    pub fn n_cues(&self) -> usize {
        self.cue_positions.len()
    }

    pub fn n_d2d(&self) -> usize {
        self.d2d_tx_positions.len()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TopologyError {
    #[error("at least one cellular user is required")]
    NoCues,
    #[error("radii must satisfy cell_radius > cluster_radius > 0 (got cell {cell}, cluster {cluster})")]
    InvalidRadii { cell: String, cluster: String },
}

/// Samples a point uniformly over the disc of `radius` around `center`.
///
/// Uses the area-exact inverse transform `r = radius * sqrt(u)`; two uniform
/// draws are consumed per point (radius then angle).
fn uniform_disc<R: Rng>(rng: &mut R, center: Position, radius: f64) -> Position {
    let u: f64 = rng.random();
    let v: f64 = rng.random();
    let r = radius * u.sqrt();
    let theta = 2.0 * std::f64::consts::PI * v;
    Position::new(center.x + r * theta.cos(), center.y + r * theta.sin())
}

/// Generates a random cell layout.
///
/// Cellular users are uniform over the cell disc. Each D2D pair lives in its
/// own cluster of radius `cluster_radius`; cluster centers are uniform over
/// the shrunk disc of radius `cell_radius - cluster_radius` so no cluster
/// crosses the cell edge. Transmitter and receiver of a pair are uniform over
/// the cluster disc.
///
/// Draw order is fixed (CUEs, then cluster centers, then per pair tx and rx),
/// so a given seed always reproduces the identical layout.
pub fn generate_layout(
    n_cues: usize,
    n_d2d: usize,
    cell_radius: f64,
    cluster_radius: f64,
    rng_seed: u64,
) -> Result<CellLayout, TopologyError> {
    if n_cues == 0 {
        return Err(TopologyError::NoCues);
    }
    if !(cluster_radius > 0.0 && cell_radius > cluster_radius) {
        return Err(TopologyError::InvalidRadii {
            cell: format!("{cell_radius}"),
            cluster: format!("{cluster_radius}"),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let cue_positions: Vec<Position> = (0..n_cues)
        .map(|_| uniform_disc(&mut rng, Position::ORIGIN, cell_radius))
        .collect();
    let cluster_centers: Vec<Position> = (0..n_d2d)
        .map(|_| uniform_disc(&mut rng, Position::ORIGIN, cell_radius - cluster_radius))
        .collect();
    let mut d2d_tx_positions = Vec::with_capacity(n_d2d);
    let mut d2d_rx_positions = Vec::with_capacity(n_d2d);
    for center in &cluster_centers {
        d2d_tx_positions.push(uniform_disc(&mut rng, *center, cluster_radius));
        d2d_rx_positions.push(uniform_disc(&mut rng, *center, cluster_radius));
    }

    Ok(CellLayout {
        cell_radius,
        bs_position: Position::ORIGIN,
        cue_positions,
        d2d_tx_positions,
        d2d_rx_positions,
        cluster_centers,
        cluster_radius,
    })
}

/// Serializes a layout to a flat CSV (`entity,index,x,y`), RFC 4180 with CRLF
/// line endings. Intended for debugging and golden tests.
pub fn layout_to_csv(layout: &CellLayout) -> String {
    let mut out = String::new();
    out.push_str("entity,index,x,y\r\n");
    let mut push = |entity: &str, index: usize, p: Position| {
        let _ = write!(out, "{entity},{index},{},{}\r\n", p.x, p.y);
    };
    push("bs", 0, layout.bs_position);
    for (i, p) in layout.cue_positions.iter().enumerate() {
        push("cue", i, *p);
    }
    for (i, p) in layout.cluster_centers.iter().enumerate() {
        push("cluster_center", i, *p);
    }
    for (i, p) in layout.d2d_tx_positions.iter().enumerate() {
        push("d2d_tx", i, *p);
    }
    for (i, p) in layout.d2d_rx_positions.iter().enumerate() {
        push("d2d_rx", i, *p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn norm(p: Position) -> f64 {
        (p.x * p.x + p.y * p.y).sqrt()
    }

    #[test]
    fn distance_345_triangle() {
        assert_eq!(distance(Position::new(0.0, 0.0), Position::new(3.0, 4.0)), 5.0);
    }

    #[test]
    fn distance_clamps_coincident_points() {
        let p = Position::new(0.0, 0.0);
        assert_eq!(distance(p, p), MIN_LINK_DISTANCE_M);
    }

    #[test]
    fn distance_clamps_below_floor() {
        // Oracle: max(euclid, floor) computed by hand for a half-floor offset.
        let a = Position::new(1.0, 1.0);
        let b = Position::new(1.0, 1.0 + MIN_LINK_DISTANCE_M / 2.0);
        assert_eq!(distance(a, b), MIN_LINK_DISTANCE_M);
    }

    #[test]
    fn table_i_shape() {
        let layout = generate_layout(5, 25, 400.0, 10.0, 1).unwrap();
        assert_eq!(layout.n_cues(), 5);
        assert_eq!(layout.n_d2d(), 25);
        assert_eq!(layout.cluster_centers.len(), 25);
        for c in &layout.cluster_centers {
            assert!(norm(*c) <= 400.0 - 10.0 + 1e-9);
        }
    }

    #[test]
    fn degenerate_no_d2d() {
        let layout = generate_layout(1, 0, 400.0, 10.0, 7).unwrap();
        assert_eq!(layout.n_cues(), 1);
        assert!(layout.d2d_tx_positions.is_empty());
        assert!(layout.d2d_rx_positions.is_empty());
    }

    #[test]
    fn same_seed_same_layout() {
        let a = generate_layout(5, 25, 400.0, 10.0, 42).unwrap();
        let b = generate_layout(5, 25, 400.0, 10.0, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(layout_to_csv(&a), layout_to_csv(&b));
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert_eq!(generate_layout(0, 5, 400.0, 10.0, 1), Err(TopologyError::NoCues));
        assert!(matches!(
            generate_layout(5, 5, 400.0, 0.0, 1),
            Err(TopologyError::InvalidRadii { .. })
        ));
        assert!(matches!(
            generate_layout(5, 5, 10.0, 10.0, 1),
            Err(TopologyError::InvalidRadii { .. })
        ));
    }

    #[test]
    fn uniform_disc_area_law() {
        // Fraction of samples within R/2 must approach the area ratio 1/4.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let total = 20_000;
        let inner = (0..total)
            .filter(|_| norm(uniform_disc(&mut rng, Position::ORIGIN, 1.0)) <= 0.5)
            .count();
        let frac = inner as f64 / total as f64;
        assert!((frac - 0.25).abs() < 0.02, "fraction {frac}");
    }

    #[test]
    fn containment_over_seed_sweep() {
        for seed in 0..100 {
            let layout = generate_layout(5, 10, 400.0, 25.0, seed).unwrap();
            for p in &layout.cue_positions {
                assert!(norm(*p) <= layout.cell_radius + 1e-9);
            }
            for (i, c) in layout.cluster_centers.iter().enumerate() {
                assert!(norm(*c) <= layout.cell_radius - layout.cluster_radius + 1e-9);
                let tx = layout.d2d_tx_positions[i];
                let rx = layout.d2d_rx_positions[i];
                assert!(((tx.x - c.x).powi(2) + (tx.y - c.y).powi(2)).sqrt() <= layout.cluster_radius + 1e-9);
                assert!(((rx.x - c.x).powi(2) + (rx.y - c.y).powi(2)).sqrt() <= layout.cluster_radius + 1e-9);
            }
        }
    }

    proptest! {
        #[test]
        fn distance_symmetric_and_triangle(
            ax in -500.0..500.0f64, ay in -500.0..500.0f64,
            bx in -500.0..500.0f64, by in -500.0..500.0f64,
            cx in -500.0..500.0f64, cy in -500.0..500.0f64,
        ) {
            let a = Position::new(ax, ay);
            let b = Position::new(bx, by);
            let c = Position::new(cx, cy);
            prop_assert_eq!(distance(a, b), distance(b, a));
            prop_assert!(distance(a, b) >= MIN_LINK_DISTANCE_M);
            // Triangle inequality holds up to the clamp: the clamp can only
            // raise the right-hand side.
            prop_assert!(distance(a, c) <= distance(a, b) + distance(b, c) + 1e-9);
        }
    }
}
