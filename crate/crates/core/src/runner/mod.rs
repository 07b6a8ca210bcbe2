//! Experiment orchestration: data generation, training, evaluation, and
//! persistence of results and charts.
//!
//! A run's randomness is derived only from its seed and a role tag
//! (`weights`, `points-x`, `points-y`, `boundary-e0..e3`), so results do not
//! depend on execution order or the number of workers.

mod config;
mod record;
pub mod svg;

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;

pub use config::{ExperimentConfig, RunSpec, DEFAULT_BOUNDARY_PER_EDGE, DEFAULT_LOG_EVERY, DEFAULT_SEED};
pub use record::{
    fmt_float, read_results, read_results_file, write_results, write_summary, ResultRecord, Status, SummaryRow,
    RESULTS_HEADER, SUMMARY_HEADER,
};

use crate::error::{Error, Result};
use crate::metrics::{self, aggregate};
use crate::network::ShallowNet;
use crate::optimizer::{train, TrainReport};
use crate::problems::{ProblemSpec, TrainingData};
use crate::rng;
use crate::sampler;

/// Training data for one run of `problem` with `strategy` and `grid` points
/// (per axis for PDEs).
pub fn training_data(
    problem: &ProblemSpec,
    strategy: sampler::Strategy,
    grid: usize,
    boundary_per_edge: usize,
    seed: u64,
) -> Result<TrainingData> {
    match (problem.interval(), problem.rect()) {
        (Some(iv), _) => {
            let pts = sampler::sample_1d(strategy, iv, grid, rng::derive_seed(seed, rng::POINTS_X))?;
            TrainingData::for_ode(problem, &pts)
        }
        (_, Some(rect)) => {
            let interior = sampler::sample_rect(strategy, rect, grid, grid, seed)?;
            let boundary = sampler::boundary_points(rect, boundary_per_edge, strategy, seed)?;
            TrainingData::for_pde(problem, &interior, &boundary)
        }
        _ => unreachable!("every problem has a domain"),
    }
}

pub fn grid_label(problem: &ProblemSpec, grid: usize) -> String {
    if problem.dim() == 1 {
        grid.to_string()
    } else {
        format!("{grid}x{grid}")
    }
}

/// Outcome of one run: its record plus the training report when it succeeded.
pub struct RunOutcome {
    pub record: ResultRecord,
    pub report: Option<TrainReport>,
}

/// Generates data, initialises, trains and evaluates one configuration point.
/// Failures are folded into the record.
pub fn run_one(cfg: &ExperimentConfig, run: &RunSpec) -> RunOutcome {
    let start = Instant::now();
    let boundary_n = if cfg.problem.dim() == 2 { cfg.boundary_per_edge } else { 0 };
    let mut record = ResultRecord {
        problem: cfg.problem.kind(),
        strategy: run.strategy,
        depth: run.layout.depth(),
        widths: run.layout.widths_label(),
        grid: grid_label(&cfg.problem, run.grid),
        boundary_n,
        seed: run.seed,
        epochs: cfg.epochs,
        final_loss: f64::NAN,
        mae: f64::NAN,
        wall_time_s: 0.0,
        status: Status::Failed,
    };

    let result = (|| -> Result<(TrainReport, f64)> {
        let data = training_data(&cfg.problem, run.strategy, run.grid, cfg.boundary_per_edge, run.seed)?;
        let net0 = ShallowNet::init_glorot(run.layout.clone(), rng::derive_seed(run.seed, rng::WEIGHTS));
        let report = train(&cfg.problem, &net0, &data, cfg.epochs)?;
        let eval = metrics::evaluate(&cfg.problem, &report.final_net, &metrics::default_eval_points(&cfg.problem)?, false)?;
        Ok((report, eval.mae))
    })();

    record.wall_time_s = start.elapsed().as_secs_f64();
    match result {
        Ok((report, mae)) => {
            record.final_loss = report.final_loss;
            record.mae = mae;
            record.status = Status::Ok;
            info!(
                "run {} {} {} {} seed {}: loss {:.3e} mae {:.3e}",
                run.index, record.strategy, record.grid, record.widths, run.seed, record.final_loss, mae
            );
            RunOutcome { record, report: Some(report) }
        }
        Err(e) => {
            warn!("run {} ({} {} seed {}) failed: {e}", run.index, record.strategy, record.grid, run.seed);
            RunOutcome { record, report: None }
        }
    }
}

/// Runs every configuration point on a pool of `workers` threads. Records
/// come back in configuration order.
pub fn run_experiment(cfg: &ExperimentConfig, workers: usize) -> Result<Vec<ResultRecord>> {
    cfg.validate()?;
    let runs = cfg.runs();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| runs.par_iter().map(|r| run_one(cfg, r).record).collect()))
}

/// Mean and population SD of MAE per (problem, widths, grid, strategy), in
/// order of first appearance. Failed runs are left out.
pub fn summarize(records: &[ResultRecord]) -> Vec<SummaryRow> {
    let mut keys: Vec<(crate::problems::ProblemKind, &str, &str, sampler::Strategy)> = Vec::new();
    for r in records {
        let key = (r.problem, r.widths.as_str(), r.grid.as_str(), r.strategy);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .filter_map(|(problem, widths, grid, strategy)| {
            let maes: Vec<f64> = records
                .iter()
                .filter(|r| r.problem == problem && r.widths == widths && r.grid == grid && r.strategy == strategy)
                .filter(|r| r.is_ok())
                .map(|r| r.mae)
                .collect();
            match aggregate(&maes) {
                Ok(aggregate) => Some(SummaryRow {
                    problem,
                    widths: widths.to_string(),
                    grid: grid.to_string(),
                    strategy,
                    aggregate,
                }),
                Err(_) => {
                    warn!("no successful runs for {problem} {widths} {grid} {strategy}; omitted from summary");
                    None
                }
            }
        })
        .collect()
}

fn create_file(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    std::fs::File::create(path).map(std::io::BufWriter::new).map_err(|e| Error::io(path, e))
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::Csv { path: path.to_path_buf(), source: e }
}

fn grid_order(grid: &str) -> usize {
    grid.split('x').next().and_then(|g| g.parse().ok()).unwrap_or(usize::MAX)
}

fn file_safe(s: &str) -> String {
    s.replace(';', "-")
}

/// Writes `results.csv`, `summary.csv` and the SVG charts into `outdir`.
/// Returns the paths written.
pub fn emit_outputs(records: &[ResultRecord], summary: &[SummaryRow], outdir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(outdir).map_err(|e| Error::io(outdir, e))?;
    let mut written = Vec::new();

    let path = outdir.join("results.csv");
    write_results(create_file(&path)?, records).map_err(|e| csv_err(&path, e))?;
    written.push(path);
    written.extend(emit_summary(summary, outdir)?);
    Ok(written)
}

/// Writes `summary.csv` and the charts only.
pub fn emit_summary(summary: &[SummaryRow], outdir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(outdir).map_err(|e| Error::io(outdir, e))?;
    let mut written = Vec::new();
    let path = outdir.join("summary.csv");
    write_summary(create_file(&path)?, summary).map_err(|e| csv_err(&path, e))?;
    written.push(path);

    if summary.is_empty() {
        warn!("no results to chart");
        return Ok(written);
    }

    let strategies: BTreeSet<sampler::Strategy> = summary.iter().map(|r| r.strategy).collect();
    let mut archs: Vec<(crate::problems::ProblemKind, &str)> = Vec::new();
    for r in summary {
        if !archs.contains(&(r.problem, r.widths.as_str())) {
            archs.push((r.problem, r.widths.as_str()));
        }
    }

    for (problem, widths) in archs {
        let rows: Vec<&SummaryRow> = summary.iter().filter(|r| r.problem == problem && r.widths == widths).collect();
        let mut grids: Vec<&str> = Vec::new();
        for r in &rows {
            if !grids.contains(&r.grid.as_str()) {
                grids.push(&r.grid);
            }
        }
        grids.sort_by_key(|g| grid_order(g));

        let names: Vec<String> = strategies.iter().map(|s| s.to_string()).collect();
        let series: Vec<svg::Series<'_>> = strategies
            .iter()
            .zip(&names)
            .map(|(s, name)| svg::Series {
                name,
                values: grids
                    .iter()
                    .map(|g| rows.iter().find(|r| r.strategy == *s && r.grid == *g).map(|r| r.aggregate.mean_mae))
                    .collect(),
            })
            .collect();
        let cats: Vec<String> = grids.iter().map(|g| g.to_string()).collect();
        let chart = svg::line_chart_log(
            &format!("{problem}: MAE vs grid size (hidden {widths})"),
            "training grid",
            "mean MAE",
            &cats,
            &series,
        );
        let path = outdir.join(format!("mae_vs_grid_{problem}_{}.svg", file_safe(widths)));
        write_text(&path, &chart)?;
        written.push(path);

        for g in &grids {
            let bars: Vec<svg::Bar<'_>> = rows
                .iter()
                .filter(|r| r.grid == *g)
                .map(|r| svg::Bar { label: r.strategy.name(), mean: r.aggregate.mean_mae, sd: r.aggregate.sd })
                .collect();
            let runs = rows.iter().filter(|r| r.grid == *g).map(|r| r.aggregate.runs).max().unwrap_or(0);
            let chart = svg::bar_chart(
                &format!("{problem}: mean MAE over {runs} runs (hidden {widths}, grid {g})"),
                "mean MAE",
                &bars,
            );
            let path = outdir.join(format!("mae_bars_{problem}_{}_{g}.svg", file_safe(widths)));
            write_text(&path, &chart)?;
            written.push(path);
        }
    }
    Ok(written)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// `epoch,loss` rows for every `log_every`-th epoch and the last one.
pub fn write_loss_history<W: Write>(mut w: W, history: &[f64], log_every: usize) -> std::io::Result<()> {
    writeln!(w, "epoch,loss")?;
    let step = log_every.max(1);
    for (epoch, loss) in history.iter().enumerate() {
        if epoch % step == 0 || epoch + 1 == history.len() {
            writeln!(w, "{epoch},{}", fmt_float(*loss))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::ProblemKind;
    use crate::sampler::Strategy;

    fn synthetic(strategy: Strategy, mae: f64, seed: u64) -> ResultRecord {
        ResultRecord {
            problem: ProblemKind::Oscillator,
            strategy,
            depth: 1,
            widths: "100".into(),
            grid: "400".into(),
            boundary_n: 0,
            seed,
            epochs: 10,
            final_loss: 1e-3,
            mae,
            wall_time_s: 0.1,
            status: Status::Ok,
        }
    }

    #[test]
    fn summarize_examples() {
        let recs = vec![
            synthetic(Strategy::Chebyshev, 1.0, 0),
            synthetic(Strategy::SineBased, 2.0, 0),
            synthetic(Strategy::Chebyshev, 3.0, 1),
            synthetic(Strategy::SineBased, 2.0, 1),
        ];
        let rows = summarize(&recs);
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].strategy, Strategy::Chebyshev);
        assert_eq!((rows[0].aggregate.mean_mae, rows[0].aggregate.sd), (2.0, 1.0));
        assert_eq!((rows[1].aggregate.mean_mae, rows[1].aggregate.sd), (2.0, 0.0));
        assert_eq!(rows.iter().map(|r| r.aggregate.runs).sum::<usize>(), recs.len());
    }

    #[test]
    fn identical_maes_have_zero_sd() {
        let recs: Vec<_> = (0..200).map(|s| synthetic(Strategy::Random, 0.0123, s)).collect();
        let rows = summarize(&recs);
        assert_eq!(rows[0].aggregate.sd, 0.0);
        assert_eq!(rows[0].aggregate.runs, 200);
    }

    #[test]
    fn failed_only_groups_are_dropped() {
        let mut bad = synthetic(Strategy::Random, f64::NAN, 0);
        bad.status = Status::Failed;
        let rows = summarize(&[bad, synthetic(Strategy::Equidistant, 1.0, 0)]);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].strategy, Strategy::Equidistant);
    }

    #[test]
    fn empty_outputs_are_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let written = emit_outputs(&[], &[], dir.path()).unwrap();
        assert_eq!(written.len(), 2);
        let results = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
        assert_eq!(results.lines().count(), 1);
        let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
        assert_eq!(summary.trim_end(), SUMMARY_HEADER.join(","));
    }

    #[test]
    fn charts_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let mut recs = Vec::new();
        for (g, scale) in [("100", 1.0), ("200", 0.5)] {
            for s in [Strategy::Equidistant, Strategy::SineBased] {
                let mut r = synthetic(s, 1e-3 * scale, 0);
                r.grid = g.into();
                recs.push(r);
            }
        }
        let summary = summarize(&recs);
        let written = emit_outputs(&recs, &summary, dir.path()).unwrap();
        let names: Vec<String> =
            written.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect();
        assert!(names.contains(&"mae_vs_grid_oscillator_100.svg".to_string()));
        assert!(names.contains(&"mae_bars_oscillator_100_200.svg".to_string()));
        assert_eq!(names.len(), 2 + 1 + 2);
    }

    #[test]
    fn io_failure_reports_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        match emit_outputs(&[], &[], &blocker.join("sub")) {
            Err(Error::Io { path, .. }) => assert!(path.ends_with("sub")),
            other => panic!("expected io error, got {other:?}"),
        }
    }

    #[test]
    fn loss_history_sampling() {
        let mut buf = Vec::new();
        write_loss_history(&mut buf, &[4.0, 3.0, 2.0, 1.0, 0.5], 2).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let epochs: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
        assert_eq!(epochs, vec!["0", "2", "4"]);
    }

    #[test]
    fn ode_grids_label_plainly() {
        assert_eq!(grid_label(&ProblemSpec::standard(ProblemKind::Decay), 200), "200");
        assert_eq!(grid_label(&ProblemSpec::poisson(), 20), "20x20");
    }
}
