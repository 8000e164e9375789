use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use crate::environments::format_float;
use crate::error::{Error, Result};
use crate::evaluation::{mean_stderr, moving_average};

use super::config::ExperimentConfig;
use super::run::{ExperimentResults, RegretReport, RunOutput, Trace};

/// Version of the summary and error JSON layouts.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, Serialize)]
struct Stat {
    mean: f64,
    stderr: f64,
}

impl From<(f64, f64)> for Stat {
    fn from((mean, stderr): (f64, f64)) -> Self {
        Self { mean, stderr }
    }
}

#[derive(Debug, Serialize)]
struct SegmentSummary {
    start: usize,
    end: usize,
    mean_reward: Option<Stat>,
    mean_loss: Stat,
}

#[derive(Debug, Serialize)]
struct SeedRegret<'a> {
    seed: u64,
    #[serde(flatten)]
    report: &'a RegretReport,
}

#[derive(Debug, Serialize)]
struct AlgorithmSummary<'a> {
    label: &'a str,
    kind: &'a str,
    seeds: Vec<u64>,
    final_cum_reward: Option<Stat>,
    final_cum_loss: Stat,
    queries_per_round: Option<usize>,
    segments: Vec<SegmentSummary>,
    sa_regret: Option<RegretSummary<'a>>,
}

#[derive(Debug, Serialize)]
struct RegretSummary<'a> {
    headline: Stat,
    per_seed: Vec<SeedRegret<'a>>,
}

/// Directory holding one experiment's artifacts.
pub fn experiment_dir(root: &Path, config: &ExperimentConfig) -> PathBuf {
    root.join(&config.name)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn write_run_csv(path: &Path, run: &RunOutput) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    match &run.trace {
        Trace::Bandit(b) => {
            w.write_record(["t", "played_arm", "observed_arm", "reward", "loss", "cum_reward", "cum_loss"])?;
            let (mut cr, mut cl) = (0.0, 0.0);
            for t in 0..b.loss.len() {
                let loss = b.loss[t];
                cr += 1.0 - loss;
                cl += loss;
                w.write_record([
                    (t + 1).to_string(),
                    b.played[t].to_string(),
                    b.observed[t].to_string(),
                    format_float(1.0 - loss),
                    format_float(loss),
                    format_float(cr),
                    format_float(cl),
                ])?;
            }
        }
        Trace::Convex(c) => {
            let d = c.played.first().map_or(0, Vec::len);
            let mut header = vec!["t".to_string(), "queries".into(), "loss".into(), "cum_loss".into()];
            header.extend((0..d).map(|i| format!("x_{i}")));
            w.write_record(&header)?;
            let mut cl = 0.0;
            for t in 0..c.loss.len() {
                cl += c.loss[t];
                let mut rec = vec![
                    (t + 1).to_string(),
                    c.queries[t].to_string(),
                    format_float(c.loss[t]),
                    format_float(cl),
                ];
                rec.extend(c.played[t].iter().map(|&v| format_float(v)));
                w.write_record(&rec)?;
            }
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_moving_average(path: &Path, runs: &[&RunOutput], window: usize) -> Result<()> {
    let series: Vec<Vec<f64>> = runs
        .iter()
        .map(|r| {
            let s = r.trace.rewards().unwrap_or_else(|| r.trace.losses().to_vec());
            moving_average(&s, window)
        })
        .collect::<Result<_>>()?;
    let mut w = csv::Writer::from_writer(create(path)?);
    let mut header = vec!["t".to_string()];
    header.extend(runs.iter().map(|r| format!("seed_{}", r.seed)));
    header.push("mean".into());
    w.write_record(&header)?;
    let horizon = series.first().map_or(0, Vec::len);
    for t in 0..horizon {
        let mut rec = vec![(t + 1).to_string()];
        let mut sum = 0.0;
        for s in &series {
            rec.push(format_float(s[t]));
            sum += s[t];
        }
        rec.push(format_float(sum / series.len() as f64));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Summary JSON value for the results.
pub fn summary_json(results: &ExperimentResults) -> serde_json::Value {
    let cfg = &results.config;
    let algorithms: Vec<AlgorithmSummary> = cfg
        .algorithms
        .iter()
        .map(|a| {
            let runs: Vec<&RunOutput> = results.runs_for(&a.label).collect();
            let bandit = runs.first().is_some_and(|r| matches!(r.trace, Trace::Bandit(_)));
            let totals_loss: Vec<f64> = runs.iter().map(|r| r.trace.losses().iter().sum()).collect();
            let reward_means = results.segment_mean_rewards(&a.label);
            let loss_means = results.segment_mean_losses(&a.label);
            let segments = results
                .segments
                .iter()
                .enumerate()
                .map(|(j, s)| SegmentSummary {
                    start: s.start + 1,
                    end: s.end,
                    mean_reward: bandit.then(|| reward_means[j].into()),
                    mean_loss: loss_means[j].into(),
                })
                .collect();
            let per_seed: Vec<SeedRegret> = runs
                .iter()
                .filter_map(|r| r.regret.as_ref().map(|report| SeedRegret { seed: r.seed, report }))
                .collect();
            let sa_regret = (!per_seed.is_empty()).then(|| {
                let heads: Vec<f64> = per_seed.iter().map(|s| s.report.headline()).collect();
                RegretSummary {
                    headline: mean_stderr(&heads).into(),
                    per_seed,
                }
            });
            let queries = runs.first().and_then(|r| r.trace.queries().first().copied());
            AlgorithmSummary {
                label: &a.label,
                kind: a.kind.name(),
                seeds: runs.iter().map(|r| r.seed).collect(),
                final_cum_reward: bandit.then(|| results.total_reward(&a.label).into()),
                final_cum_loss: mean_stderr(&totals_loss).into(),
                queries_per_round: queries,
                segments,
                sa_regret,
            }
        })
        .collect();
    json!({
        "schema_version": SCHEMA_VERSION,
        "name": cfg.name,
        "wall_clock_seconds": results.wall_clock_seconds,
        "config": cfg,
        "algorithms": algorithms,
    })
}

/// Writes per-run CSVs, moving averages and `summary.json` under
/// `root/<name>/`. Returns the experiment directory.
pub fn write_artifacts(results: &ExperimentResults, root: &Path) -> Result<PathBuf> {
    let dir = experiment_dir(root, &results.config);
    for a in &results.config.algorithms {
        let runs: Vec<&RunOutput> = results.runs_for(&a.label).collect();
        for r in &runs {
            write_run_csv(&dir.join(&a.label).join(format!("seed_{}.csv", r.seed)), r)?;
        }
        write_moving_average(&dir.join(&a.label).join("moving_average.csv"), &runs, results.config.window)?;
    }
    let path = dir.join("summary.json");
    let mut f = create(&path)?;
    serde_json::to_writer_pretty(&mut f, &summary_json(results))?;
    f.write_all(b"\n").and_then(|_| f.flush()).map_err(|e| Error::io(&path, e))?;
    Ok(dir)
}

/// Machine-readable description of a failure.
pub fn error_json(err: &Error) -> serde_json::Value {
    let details: Vec<String> = match err {
        Error::Config(items) => items.clone(),
        other => vec![other.to_string()],
    };
    json!({
        "schema_version": SCHEMA_VERSION,
        "error": {
            "kind": err.kind(),
            "message": err.to_string(),
            "details": details,
        }
    })
}
