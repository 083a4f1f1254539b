//! CSV and plot-data emission for Monte Carlo results.
//!
//! Three artifact families land in the output directory:
//! `trials.csv` (one row per algorithm run), `aggregate.csv` (mean and 95%
//! confidence interval per series point), and `fig2.dat`/`fig3.dat`/`fig4.dat`
//! (gnuplot-style blocks, one block per series). CSV files follow RFC 4180:
//! CRLF line endings, a header row, `.` as the decimal separator. Wall time
//! is deliberately absent from every file so a fixed seed reproduces the
//! output byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::config::Algorithm;
use super::runner::TrialRecord;

/// Failure while writing result artifacts.
#[derive(Debug, Error)]
pub enum OutputError {
    #[error("no trial records to emit")]
    Empty,
    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

/// One aggregation cell: every record sharing an (algorithm, cluster radius,
/// cell radius, CUE count) key, reduced to means and half-width CIs.
struct SeriesPoint {
    algorithm: Algorithm,
    cluster_radius: f64,
    cell_radius: f64,
    n_cues: usize,
    trials: usize,
    mean_sum_rate: f64,
    ci95_sum_rate: f64,
    mean_admitted: f64,
    ci95_admitted: f64,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Half-width of the normal-approximation 95% CI; zero when a standard
/// deviation cannot be formed (fewer than two samples).
fn ci95(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
    1.96 * (var / n as f64).sqrt()
}

struct GroupAcc {
    algorithm: Algorithm,
    cluster_radius: f64,
    cell_radius: f64,
    n_cues: usize,
    rates: Vec<f64>,
    admitted: Vec<f64>,
}

fn aggregate(records: &[TrialRecord]) -> Vec<SeriesPoint> {
    // Keys come straight from the config, so exact float equality groups
    // correctly; no epsilon bucketing is wanted here.
    let mut groups: Vec<GroupAcc> = Vec::new();
    for r in records {
        let slot = groups.iter_mut().find(|g| {
            g.algorithm == r.algorithm
                && g.cluster_radius == r.cluster_radius
                && g.cell_radius == r.cell_radius
                && g.n_cues == r.n_cues
        });
        match slot {
            Some(g) => {
                g.rates.push(r.sum_rate);
                g.admitted.push(r.admitted as f64);
            }
            None => groups.push(GroupAcc {
                algorithm: r.algorithm,
                cluster_radius: r.cluster_radius,
                cell_radius: r.cell_radius,
                n_cues: r.n_cues,
                rates: vec![r.sum_rate],
                admitted: vec![r.admitted as f64],
            }),
        }
    }
    groups.sort_by(|a, b| {
        a.algorithm
            .cmp(&b.algorithm)
            .then(a.cluster_radius.total_cmp(&b.cluster_radius))
            .then(a.cell_radius.total_cmp(&b.cell_radius))
            .then(a.n_cues.cmp(&b.n_cues))
    });
    groups
        .into_iter()
        .map(|g| SeriesPoint {
            algorithm: g.algorithm,
            cluster_radius: g.cluster_radius,
            cell_radius: g.cell_radius,
            n_cues: g.n_cues,
            trials: g.rates.len(),
            mean_sum_rate: mean(&g.rates),
            ci95_sum_rate: ci95(&g.rates),
            mean_admitted: mean(&g.admitted),
            ci95_admitted: ci95(&g.admitted),
        })
        .collect()
}

fn trials_csv(records: &[TrialRecord]) -> String {
    let mut out = String::new();
    out.push_str(
        "trial,seed,algorithm,n_cues,n_d2d,cell_radius,cluster_radius,\
         sum_rate,admitted,matching_states,signaling_gains\r\n",
    );
    for r in records {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}\r\n",
            r.trial,
            r.seed,
            r.algorithm,
            r.n_cues,
            r.n_d2d,
            r.cell_radius,
            r.cluster_radius,
            r.sum_rate,
            r.admitted,
            r.matching_states,
            r.signaling_gains,
        );
    }
    out
}

fn aggregate_csv(points: &[SeriesPoint]) -> String {
    let mut out = String::new();
    out.push_str(
        "algorithm,cluster_radius,cell_radius,n_cues,trials,\
         mean_sum_rate,ci95_sum_rate,mean_admitted,ci95_admitted\r\n",
    );
    for p in points {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{},{}\r\n",
            p.algorithm,
            p.cluster_radius,
            p.cell_radius,
            p.n_cues,
            p.trials,
            p.mean_sum_rate,
            p.ci95_sum_rate,
            p.mean_admitted,
            p.ci95_admitted,
        );
    }
    out
}

/// Which aggregate column a figure plots against cluster radius.
enum Metric {
    SumRate,
    Admitted,
}

/// Gnuplot-style plot data: one block per (algorithm, cell radius, CUE count)
/// series, rows `cluster_radius mean ci95`, blocks separated by two blank
/// lines so `index` addresses them.
fn figure_dat(points: &[SeriesPoint], title: &str, metric: Metric, by_n_cues: bool) -> String {
    let mut series: Vec<(Algorithm, f64, usize)> = points
        .iter()
        .map(|p| (p.algorithm, p.cell_radius, p.n_cues))
        .collect();
    series.dedup();
    series.sort_by(|a, b| {
        let base = a.0.cmp(&b.0);
        if by_n_cues {
            base.then(a.2.cmp(&b.2)).then(a.1.total_cmp(&b.1))
        } else {
            base.then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2))
        }
    });
    series.dedup();

    let mut out = String::new();
    let _ = writeln!(out, "# {title}");
    out.push_str("# columns: cluster_radius mean ci95\n");
    for (idx, (alg, cell, n)) in series.iter().enumerate() {
        if idx > 0 {
            out.push_str("\n\n");
        }
        let _ = writeln!(out, "# series: {alg} R={cell} N={n}");
        let mut rows: Vec<&SeriesPoint> = points
            .iter()
            .filter(|p| p.algorithm == *alg && p.cell_radius == *cell && p.n_cues == *n)
            .collect();
        rows.sort_by(|a, b| a.cluster_radius.total_cmp(&b.cluster_radius));
        for p in rows {
            let (m, ci) = match metric {
                Metric::SumRate => (p.mean_sum_rate, p.ci95_sum_rate),
                Metric::Admitted => (p.mean_admitted, p.ci95_admitted),
            };
            let _ = writeln!(out, "{} {} {}", p.cluster_radius, m, ci);
        }
    }
    out
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, OutputError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| OutputError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

/// Writes `trials.csv`, `aggregate.csv`, and the three figure data files
/// into `out_dir` (created if missing) and returns the paths written.
pub fn emit_results(records: &[TrialRecord], out_dir: &Path) -> Result<Vec<PathBuf>, OutputError> {
    if records.is_empty() {
        return Err(OutputError::Empty);
    }
    fs::create_dir_all(out_dir).map_err(|source| OutputError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;

    let points = aggregate(records);
    let files = [
        ("trials.csv", trials_csv(records)),
        ("aggregate.csv", aggregate_csv(&points)),
        (
            "fig2.dat",
            figure_dat(
                &points,
                "sum-rate (bits/s/Hz) vs cluster radius (m)",
                Metric::SumRate,
                false,
            ),
        ),
        (
            "fig3.dat",
            figure_dat(
                &points,
                "admitted D2D pairs vs cluster radius (m), cell-radius comparison",
                Metric::Admitted,
                false,
            ),
        ),
        (
            "fig4.dat",
            figure_dat(
                &points,
                "admitted D2D pairs vs cluster radius (m), CUE-count comparison",
                Metric::Admitted,
                true,
            ),
        ),
    ];
    files
        .iter()
        .map(|(name, contents)| write_file(out_dir, name, contents))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(
        trial: usize,
        algorithm: Algorithm,
        cluster_radius: f64,
        sum_rate: f64,
        admitted: usize,
    ) -> TrialRecord {
        TrialRecord {
            trial,
            seed: 42 + trial as u64,
            algorithm,
            n_cues: 5,
            n_d2d: 25,
            cell_radius: 400.0,
            cluster_radius,
            sum_rate,
            admitted,
            matching_states: 20,
            signaling_gains: 200,
            wall_ms: trial as f64 * 0.37,
        }
    }

    #[test]
    fn single_record_files() {
        let dir = tempfile::tempdir().unwrap();
        let records = vec![rec(0, Algorithm::Proposed, 20.0, 12.5, 3)];
        let paths = emit_results(&records, dir.path()).unwrap();
        assert_eq!(paths.len(), 5);

        let trials = fs::read_to_string(dir.path().join("trials.csv")).unwrap();
        let lines: Vec<&str> = trials.split("\r\n").collect();
        assert_eq!(lines.len(), 3, "header, one row, trailing empty");
        assert_eq!(
            lines[0],
            "trial,seed,algorithm,n_cues,n_d2d,cell_radius,cluster_radius,\
             sum_rate,admitted,matching_states,signaling_gains"
        );
        assert_eq!(lines[1], "0,42,proposed,5,25,400,20,12.5,3,20,200");
        assert_eq!(lines[2], "");

        let agg = fs::read_to_string(dir.path().join("aggregate.csv")).unwrap();
        let lines: Vec<&str> = agg.split("\r\n").collect();
        assert_eq!(lines.len(), 3);
        // One sample: CI must collapse to zero, not NaN.
        assert_eq!(lines[1], "proposed,20,400,5,1,12.5,0,3,0");
    }

    #[test]
    fn aggregate_row_per_algorithm_radius_pair() {
        let mut records = Vec::new();
        for (t, radius) in [10.0, 20.0, 30.0].iter().enumerate() {
            for alg in [Algorithm::Proposed, Algorithm::ThreeStep] {
                records.push(rec(t, alg, *radius, 10.0 + t as f64, t));
                records.push(rec(t + 3, alg, *radius, 11.0 + t as f64, t + 1));
            }
        }
        let points = aggregate(&records);
        assert_eq!(points.len(), 6);
        // Sorted by algorithm first, then cluster radius ascending.
        let key: Vec<(Algorithm, f64)> =
            points.iter().map(|p| (p.algorithm, p.cluster_radius)).collect();
        assert_eq!(
            key,
            vec![
                (Algorithm::Proposed, 10.0),
                (Algorithm::Proposed, 20.0),
                (Algorithm::Proposed, 30.0),
                (Algorithm::ThreeStep, 10.0),
                (Algorithm::ThreeStep, 20.0),
                (Algorithm::ThreeStep, 30.0),
            ]
        );
        for p in &points {
            assert_eq!(p.trials, 2);
        }
    }

    #[test]
    fn ci_matches_hand_computation() {
        // Samples 1, 2, 3: mean 2, sd 1, CI 1.96/sqrt(3).
        let xs = [1.0, 2.0, 3.0];
        assert!((mean(&xs) - 2.0).abs() < 1e-15);
        assert!((ci95(&xs) - 1.96 / 3.0_f64.sqrt()).abs() < 1e-12);
        assert_eq!(ci95(&[5.0]), 0.0);
    }

    #[test]
    fn figure_blocks_separate_series() {
        let records = vec![
            rec(0, Algorithm::Proposed, 10.0, 12.0, 3),
            rec(1, Algorithm::Proposed, 20.0, 13.0, 4),
            rec(0, Algorithm::AllCsi, 10.0, 11.0, 2),
            rec(1, Algorithm::AllCsi, 20.0, 12.0, 3),
        ];
        let points = aggregate(&records);
        let dat = figure_dat(&points, "t", Metric::Admitted, false);
        // Two series: one block separator, rows ordered by cluster radius.
        assert_eq!(dat.matches("# series:").count(), 2);
        assert_eq!(dat.matches("\n\n\n").count(), 1);
        let proposed_block = dat.split("\n\n\n").next().unwrap();
        assert!(proposed_block.contains("# series: proposed R=400 N=5"));
        assert!(proposed_block.contains("10 3 0"));
        assert!(proposed_block.contains("20 4 0"));
    }

    #[test]
    fn emission_is_byte_identical_across_runs() {
        let records: Vec<TrialRecord> = (0..20)
            .map(|t| {
                let alg = if t % 2 == 0 { Algorithm::Proposed } else { Algorithm::AllCsi };
                // Awkward decimals exercise the float formatter.
                rec(t, alg, 10.0 + t as f64, 10.0 / 3.0 + t as f64 * 0.1, t % 5)
            })
            .collect();
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        emit_results(&records, dir_a.path()).unwrap();
        emit_results(&records, dir_b.path()).unwrap();
        for name in ["trials.csv", "aggregate.csv", "fig2.dat", "fig3.dat", "fig4.dat"] {
            let a = fs::read(dir_a.path().join(name)).unwrap();
            let b = fs::read(dir_b.path().join(name)).unwrap();
            assert_eq!(a, b, "{name} differs between identical runs");
        }
    }

    #[test]
    fn empty_records_rejected() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            emit_results(&[], dir.path()),
            Err(OutputError::Empty)
        ));
    }
}
