use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::report::{CellResult, ExperimentKind, ExperimentReport};
use super::{OutlierGridSettings, SimulationSettings};
use crate::discovery::{estimate_causal_order, DiscoveryConfig};
use crate::error::Result;
use crate::rng::stream;
use crate::scm::{generate_random_scm, CausalOrdering, DataMatrix};

/// Row overwritten by the outlier in the grid experiment.
pub const OUTLIER_ROW: usize = 0;

#[derive(Clone, Copy)]
enum Outcome {
    Correct,
    Wrong,
    Failed,
}

/// Per-replication outcomes, indexed by cell.
type RepOutcomes = Vec<(Outcome, Duration)>;

fn run_method(data: &DataMatrix, cfg: &DiscoveryConfig, is_correct: impl Fn(&CausalOrdering) -> bool) -> (Outcome, Duration) {
    let start = Instant::now();
    let result = estimate_causal_order(&data.median_centered(), cfg);
    let elapsed = start.elapsed();
    let outcome = match result {
        Ok((o, _)) if is_correct(&o) => Outcome::Correct,
        Ok(_) => Outcome::Wrong,
        Err(_) => Outcome::Failed,
    };
    (outcome, elapsed)
}

/// Sums per-replication outcomes into `cells`; replications are merged in
/// index order, so the result does not depend on scheduling.
fn merge(cells: &mut [CellResult], reps: Vec<Result<RepOutcomes>>) -> Result<()> {
    for rep in reps {
        for (cell, (outcome, t)) in cells.iter_mut().zip(rep?) {
            match outcome {
                Outcome::Correct => cell.correct += 1,
                Outcome::Wrong => {}
                Outcome::Failed => cell.failures += 1,
            }
            cell.seconds += t.as_secs_f64();
        }
    }
    Ok(())
}

fn blank(method: String, n: usize, outlier: Option<[f64; 2]>, replications: usize) -> CellResult {
    CellResult {
        method,
        n,
        outlier,
        correct: 0,
        failures: 0,
        replications,
        seconds: 0.0,
    }
}

/// Random models, all methods on the same data. A replication draws its
/// model and samples from stream `(master_seed, replication)`; an ordering
/// counts as correct when it is consistent with the true DAG.
pub fn run_simulation(settings: &SimulationSettings) -> Result<ExperimentReport> {
    settings.validate()?;
    let start = Instant::now();
    let mut report = ExperimentReport::new(ExperimentKind::Simulation, serde_json::to_value(settings)?);
    let mut cells = Vec::new();
    for &n in &settings.sample_sizes {
        for m in &settings.methods {
            cells.push(blank(m.label(), n, None, settings.replications));
        }
    }
    let reps: Vec<Result<RepOutcomes>> = (0..settings.replications)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream(settings.master_seed, rep as u64);
            let spec = generate_random_scm(settings.p, settings.q, &settings.noise, &mut rng)?;
            let mut out = Vec::with_capacity(cells.len());
            for &n in &settings.sample_sizes {
                let data = spec.sample(n, &mut rng)?;
                for m in &settings.methods {
                    out.push(run_method(&data, m, |o| spec.is_consistent_ordering(o)));
                }
            }
            Ok(out)
        })
        .collect();
    merge(&mut cells, reps)?;
    report.cells = cells;
    report.wall_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Outlier positions `(s_x 2^i, s_y 2^j)` over all exponent pairs and the
/// four sign combinations.
fn outlier_values(exponents: &[u32]) -> Vec<[f64; 2]> {
    let mut out = Vec::new();
    for &i in exponents {
        for &j in exponents {
            for (sx, sy) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                out.push([sx * 2f64.powi(i as i32), sy * 2f64.powi(j as i32)]);
            }
        }
    }
    out
}

/// The chain `X1 = e1`, `X2 = X1 + e2`, with one row replaced by each grid
/// outlier. Every cell of a replication shares the same clean sample.
pub fn run_outlier_grid(settings: &OutlierGridSettings) -> Result<ExperimentReport> {
    settings.validate()?;
    let start = Instant::now();
    let mut report = ExperimentReport::new(ExperimentKind::OutlierGrid, serde_json::to_value(settings)?);
    let outliers = outlier_values(&settings.exponents);
    let mut cells = Vec::new();
    for &o in &outliers {
        for m in &settings.methods {
            cells.push(blank(m.label(), settings.n, Some(o), settings.replications));
        }
    }
    let truth = CausalOrdering::identity(2);
    let reps: Vec<Result<RepOutcomes>> = (0..settings.replications)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream(settings.base_seed, rep as u64);
            let e1 = settings.noise.draw_n(settings.n, &mut rng);
            let e2 = settings.noise.draw_n(settings.n, &mut rng);
            let x2 = e1.iter().zip(&e2).map(|(a, b)| a + b).collect();
            let clean = DataMatrix::from_columns(vec![e1, x2])?;
            let mut out = Vec::with_capacity(cells.len());
            for &[ox, oy] in &outliers {
                let data = clean.inject_outlier(OUTLIER_ROW, &[(0, ox), (1, oy)])?;
                for m in &settings.methods {
                    out.push(run_method(&data, m, |o| *o == truth));
                }
            }
            Ok(out)
        })
        .collect();
    merge(&mut cells, reps)?;
    report.cells = cells;
    report.wall_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// A simulation reported as timings, with the kernel / distance-correlation
/// time ratio for every slope run with both measures.
pub fn benchmark(settings: &SimulationSettings) -> Result<ExperimentReport> {
    let mut report = run_simulation(settings)?;
    report.kind = ExperimentKind::Benchmark;
    report.fill_ratios();
    Ok(report)
}
