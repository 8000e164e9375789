use std::ops::Range;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::bco::{BcoParams, BcoState, EuclideanBall, QueryMode};
use crate::environments::{
    segments, BanditEnvironment, LossMatrix, PiecewiseExpertEnv, PointOracle, QuadraticEnv, QuerySession,
};
use crate::error::{Error, Result};
use crate::evaluation::{
    bco_regret_geometric_grid, bco_sa_regret_grid, comparator_grid, mean_stderr, sa_regret_exact,
    sa_regret_geometric, IntervalRegret, RunRecord, ScaleRegret,
};
use crate::rng::{stream, RunStreams, ENVIRONMENT_STREAM};
use crate::stabl::{build_schedule, ClassicExp3, IntervalSchedule, StablState, Variant};

use super::config::{AlgorithmKind, AlgorithmSpec, EnvironmentSpec, ExperimentConfig, RegretMode};

/// Per-round trace of one bandit run.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditTrace {
    pub played: Vec<usize>,
    pub observed: Vec<usize>,
    pub loss: Vec<f64>,
    /// Arms announced per round, duplicates included.
    pub queries: Vec<usize>,
}

/// Per-round trace of one convex run.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexTrace {
    pub played: Vec<Vec<f64>>,
    pub loss: Vec<f64>,
    /// Oracle evaluations per round.
    pub queries: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Trace {
    Bandit(BanditTrace),
    Convex(ConvexTrace),
}

impl Trace {
    pub fn losses(&self) -> &[f64] {
        match self {
            Trace::Bandit(b) => &b.loss,
            Trace::Convex(c) => &c.loss,
        }
    }

    /// Rewards `1 - loss` for bandit runs.
    pub fn rewards(&self) -> Option<Vec<f64>> {
        match self {
            Trace::Bandit(b) => Some(b.loss.iter().map(|l| 1.0 - l).collect()),
            Trace::Convex(_) => None,
        }
    }

    pub fn queries(&self) -> &[usize] {
        match self {
            Trace::Bandit(b) => &b.queries,
            Trace::Convex(c) => &c.queries,
        }
    }
}

/// Strongly adaptive regret of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum RegretReport {
    Exact { worst: IntervalRegret },
    Geometric { scales: Vec<ScaleRegret> },
}

impl RegretReport {
    /// The single number reported across seeds.
    pub fn headline(&self) -> f64 {
        match self {
            RegretReport::Exact { worst } => worst.value,
            RegretReport::Geometric { scales } => scales
                .iter()
                .filter_map(|s| s.worst.map(|w| w.value))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// One (algorithm, seed) run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub label: String,
    pub kind: AlgorithmKind,
    pub seed: u64,
    pub trace: Trace,
    pub regret: Option<RegretReport>,
}

/// All runs of an experiment, ordered by algorithm (config order), then
/// seed (config order).
#[derive(Debug, Clone)]
pub struct ExperimentResults {
    pub config: ExperimentConfig,
    pub runs: Vec<RunOutput>,
    pub segments: Vec<Range<usize>>,
    pub wall_clock_seconds: f64,
}

impl ExperimentResults {
    pub fn runs_for<'a>(&'a self, label: &'a str) -> impl Iterator<Item = &'a RunOutput> + 'a {
        self.runs.iter().filter(move |r| r.label == label)
    }

    /// Mean and standard error of the total reward (bandit) or negated
    /// total loss (convex) across seeds.
    pub fn total_reward(&self, label: &str) -> (f64, f64) {
        let totals: Vec<f64> = self
            .runs_for(label)
            .map(|r| r.trace.rewards().map_or_else(|| -r.trace.losses().iter().sum::<f64>(), |v| v.iter().sum()))
            .collect();
        mean_stderr(&totals)
    }

    /// Per-segment mean per-round reward, averaged over seeds.
    pub fn segment_mean_rewards(&self, label: &str) -> Vec<(f64, f64)> {
        self.segment_means(label, |r| r.trace.rewards().unwrap_or_default())
    }

    /// Per-segment mean per-round loss, averaged over seeds.
    pub fn segment_mean_losses(&self, label: &str) -> Vec<(f64, f64)> {
        self.segment_means(label, |r| r.trace.losses().to_vec())
    }

    fn segment_means<F: Fn(&RunOutput) -> Vec<f64>>(&self, label: &str, series: F) -> Vec<(f64, f64)> {
        let all: Vec<Vec<f64>> = self.runs_for(label).map(series).collect();
        self.segments
            .iter()
            .map(|seg| {
                let per_seed: Vec<f64> = all
                    .iter()
                    .filter(|s| !s.is_empty())
                    .map(|s| s[seg.clone()].iter().sum::<f64>() / seg.len() as f64)
                    .collect();
                mean_stderr(&per_seed)
            })
            .collect()
    }
}

enum SharedEnv {
    Piecewise,
    Matrix(LossMatrix),
    Quadratic(QuadraticEnv),
}

fn arm_count(config: &ExperimentConfig, env: &SharedEnv) -> Result<usize> {
    match (env, config.arms) {
        (SharedEnv::Matrix(m), Some(n)) if m.n() != n => Err(Error::invalid(format!(
            "config says {n} arms, the loss file has {}",
            m.n()
        ))),
        (SharedEnv::Matrix(m), _) => Ok(m.n()),
        (_, Some(n)) => Ok(n),
        _ => Err(Error::invalid("arm count missing")),
    }
}

/// Runs every (algorithm, seed) pair on a pool of `workers` threads.
/// Results do not depend on `workers`.
pub fn run_in_memory(config: &ExperimentConfig, workers: usize) -> Result<ExperimentResults> {
    let started = Instant::now();
    let horizon = config.horizon;
    let (shared, cps) = match &config.environment {
        EnvironmentSpec::Piecewise { change_points, .. } => (SharedEnv::Piecewise, change_points.clone()),
        EnvironmentSpec::LossCsv { path } => {
            let m = LossMatrix::read_csv_path(path)?;
            if m.horizon() != horizon {
                return Err(Error::invalid(format!(
                    "loss file has {} rounds, config horizon is {horizon}",
                    m.horizon()
                )));
            }
            (SharedEnv::Matrix(m), Vec::new())
        }
        EnvironmentSpec::Quadratic { centers, change_points, .. } => (
            SharedEnv::Quadratic(QuadraticEnv::new(horizon, centers.clone(), change_points.clone())?),
            change_points.clone(),
        ),
    };
    let tasks: Vec<(&AlgorithmSpec, u64)> = config
        .algorithms
        .iter()
        .flat_map(|a| config.seeds.iter().map(move |&s| (a, s)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("cannot build worker pool: {e}")))?;
    let runs = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(algo, seed)| run_one(config, &shared, algo, seed))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(ExperimentResults {
        config: config.clone(),
        runs,
        segments: segments(&cps, horizon),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    })
}

fn run_one(config: &ExperimentConfig, shared: &SharedEnv, algo: &AlgorithmSpec, seed: u64) -> Result<RunOutput> {
    let horizon = config.horizon;
    let (trace, regret) = match (shared, &config.environment) {
        (SharedEnv::Quadratic(env), EnvironmentSpec::Quadratic { radius, inner_radius, lipschitz, loss_bound, noise, grid_per_axis, .. }) => {
            let domain = EuclideanBall::new(env.centers()[0].len(), *inner_radius, *radius)?;
            let trace = run_convex(env, domain, algo, seed, horizon, *lipschitz, *loss_bound, *noise)?;
            let regret = match config.regret {
                RegretMode::Off => None,
                mode => {
                    let grid = comparator_grid(domain_dim(env), *radius, *grid_per_axis)?;
                    Some(match mode {
                        RegretMode::Exact => RegretReport::Exact {
                            worst: bco_sa_regret_grid(env, &trace.loss, &grid, config.regret_budget)?,
                        },
                        _ => RegretReport::Geometric {
                            scales: bco_regret_geometric_grid(env, &trace.loss, &grid, &IntervalSchedule::dyadic(horizon)?)?,
                        },
                    })
                }
            };
            (Trace::Convex(trace), regret)
        }
        (SharedEnv::Piecewise, EnvironmentSpec::Piecewise { change_points, boost }) => {
            let n = arm_count(config, shared)?;
            let env = PiecewiseExpertEnv::generate(n, horizon, change_points, *boost, seed)?;
            bandit(config, &env, algo, seed)?
        }
        (SharedEnv::Matrix(m), _) => {
            arm_count(config, shared)?;
            bandit(config, m, algo, seed)?
        }
        _ => unreachable!("environment built from the same spec"),
    };
    Ok(RunOutput {
        label: algo.label.clone(),
        kind: algo.kind,
        seed,
        trace,
        regret,
    })
}

fn domain_dim(env: &QuadraticEnv) -> usize {
    env.centers()[0].len()
}

fn bandit<E: BanditEnvironment>(
    config: &ExperimentConfig,
    env: &E,
    algo: &AlgorithmSpec,
    seed: u64,
) -> Result<(Trace, Option<RegretReport>)> {
    let trace = run_bandit(env, algo, seed)?;
    let regret = match config.regret {
        RegretMode::Off => None,
        RegretMode::Exact => {
            let rec = RunRecord::new(env.losses(), trace.played.clone(), seed, algo.label.clone())?;
            Some(RegretReport::Exact {
                worst: sa_regret_exact(&rec, config.regret_budget)?,
            })
        }
        RegretMode::Geometric => {
            let rec = RunRecord::new(env.losses(), trace.played.clone(), seed, algo.label.clone())?;
            Some(RegretReport::Geometric {
                scales: sa_regret_geometric(&rec, &IntervalSchedule::dyadic(config.horizon)?)?,
            })
        }
    };
    Ok((Trace::Bandit(trace), regret))
}

/// Default single scale: the largest power of two not above `T / 4`.
fn single_scale(horizon: usize) -> usize {
    1usize << (horizon / 4).max(1).ilog2()
}

/// Plays one bandit learner through the two-query protocol.
pub fn run_bandit<E: BanditEnvironment + ?Sized>(env: &E, algo: &AlgorithmSpec, seed: u64) -> Result<BanditTrace> {
    let horizon = env.horizon();
    let n = env.n_arms();
    let mut streams = RunStreams::new(seed);
    let mut trace = BanditTrace {
        played: Vec::with_capacity(horizon),
        observed: Vec::with_capacity(horizon),
        loss: Vec::with_capacity(horizon),
        queries: Vec::with_capacity(horizon),
    };
    if algo.kind == AlgorithmKind::Exp3 {
        let mut learner = ClassicExp3::new(n, horizon)?;
        let mut session = QuerySession::new(env, 1);
        for t in 0..horizon {
            let (arm, prob) = learner.decide(&mut streams.play)?;
            session.reveal(t, &[arm])?;
            let loss = session.suffer(t, arm)?;
            learner.update(arm, prob, loss)?;
            trace.played.push(arm);
            trace.observed.push(arm);
            trace.loss.push(loss);
            trace.queries.push(1);
        }
        return Ok(trace);
    }
    let variant = match algo.kind {
        AlgorithmKind::Stabl => Variant::Full,
        AlgorithmKind::StablNaive => Variant::NaiveObservation,
        AlgorithmKind::StablSingleScale => Variant::SingleScale,
        other => return Err(Error::invalid(format!("{} is not a bandit learner", other.name()))),
    };
    let schedule = match (&algo.scales, variant) {
        (Some(s), _) => build_schedule(horizon, Some(s))?,
        (None, Variant::SingleScale) => build_schedule(horizon, Some(&[single_scale(horizon)]))?,
        (None, _) => build_schedule(horizon, None)?,
    };
    let mut learner = StablState::new(n, schedule, variant)?;
    let mut session = QuerySession::new(env, QuerySession::<E>::MAB_BUDGET);
    for t in 0..horizon {
        let (decision, _) = learner.play_round(&mut streams.play, &mut streams.observe, |d| {
            session.reveal(t, &d.announced())
        })?;
        let loss = session.suffer(t, decision.play_arm)?;
        trace.played.push(decision.play_arm);
        trace.observed.push(decision.observe_arm);
        trace.loss.push(loss);
        trace.queries.push(2);
    }
    Ok(trace)
}

/// Plays one convex learner through the point oracle.
#[allow(clippy::too_many_arguments)]
pub fn run_convex(
    env: &QuadraticEnv,
    domain: EuclideanBall,
    algo: &AlgorithmSpec,
    seed: u64,
    horizon: usize,
    lipschitz: f64,
    loss_bound: f64,
    noise: f64,
) -> Result<ConvexTrace> {
    let mode = match algo.kind {
        AlgorithmKind::BcoThreeQuery => QueryMode::ThreeQuery,
        AlgorithmKind::BcoTwoQuery => QueryMode::TwoQuerySurrogate,
        other => return Err(Error::invalid(format!("{} is not a convex learner", other.name()))),
    };
    let schedule = build_schedule(horizon, algo.scales.as_deref())?;
    let params = BcoParams {
        horizon,
        lipschitz,
        loss_bound,
        mode,
    };
    let mut learner = BcoState::new(domain, schedule, params)?;
    let mut streams = RunStreams::new(seed);
    let mut oracle =
        PointOracle::new(env, mode.queries_per_round()).with_noise(noise, stream(seed, ENVIRONMENT_STREAM));
    let mut trace = ConvexTrace {
        played: Vec::with_capacity(horizon),
        loss: Vec::with_capacity(horizon),
        queries: Vec::with_capacity(horizon),
    };
    for t in 0..horizon {
        let round = learner.play_round(&mut streams.observe, |pts| oracle.evaluate(t, pts))?;
        trace.loss.push(round.played_loss());
        trace.queries.push(round.queries.len());
        trace.played.push(round.played);
    }
    Ok(trace)
}
