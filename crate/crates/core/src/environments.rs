//! Oblivious environments and the two-phase query protocol.
//!
//! Every environment is fixed before round one. Learners see values only
//! through a [`QuerySession`] (arms) or [`PointOracle`] (points), which
//! enforce the per-round budget, reject a second reveal of the same round,
//! and record a transcript. Rounds are indexed from 0 here, matching rows of
//! the loss matrix.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::ops::Range;
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::StreamRng;

/// A `T x n` matrix of values in `[0, 1]`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LossMatrix {
    horizon: usize,
    n: usize,
    data: Vec<f64>,
}

impl LossMatrix {
    pub fn new(horizon: usize, n: usize, data: Vec<f64>) -> Result<Self> {
        if horizon == 0 || n == 0 {
            return Err(Error::invalid("loss matrix needs at least one round and one arm"));
        }
        if data.len() != horizon * n {
            return Err(Error::invalid(format!(
                "{} values for a {horizon}x{n} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::invalid(format!(
                "value {} at round {}, arm {} outside [0, 1]",
                data[pos],
                pos / n,
                pos % n
            )));
        }
        Ok(Self { horizon, n, data })
    }

    /// Builds from rows; all rows must have the same length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("ragged loss matrix"));
        }
        Self::new(rows.len(), n, rows.concat())
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.data[t * self.n..(t + 1) * self.n]
    }

    pub fn get(&self, t: usize, arm: usize) -> f64 {
        self.data[t * self.n + arm]
    }

    /// `1 - x` elementwise.
    pub fn complement(&self) -> Self {
        Self {
            horizon: self.horizon,
            n: self.n,
            data: self.data.iter().map(|v| 1.0 - v).collect(),
        }
    }

    /// Reads the `t,arm_0,...,arm_{n-1}` format. The `t` column must count
    /// up by one from 0 or from 1.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.get(0) != Some("t") || headers.len() < 2 {
            return Err(Error::invalid("loss csv header must start with `t` followed by arm columns"));
        }
        for (i, h) in headers.iter().skip(1).enumerate() {
            if h != format!("arm_{i}") {
                return Err(Error::invalid(format!(
                    "loss csv column {} is `{h}`, expected `arm_{i}`",
                    i + 1
                )));
            }
        }
        let n = headers.len() - 1;
        let mut data = Vec::new();
        let mut first_t = None;
        let mut rows = 0usize;
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            let t: usize = record[0]
                .parse()
                .map_err(|_| Error::invalid(format!("row {}: bad round `{}`", row + 2, &record[0])))?;
            let start = *first_t.get_or_insert(t);
            if start > 1 || t != start + row {
                return Err(Error::invalid(format!(
                    "row {}: round {t} breaks the consecutive count",
                    row + 2
                )));
            }
            for field in record.iter().skip(1) {
                let v: f64 = field
                    .parse()
                    .map_err(|_| Error::invalid(format!("row {}: bad value `{field}`", row + 2)))?;
                data.push(v);
            }
            rows += 1;
        }
        Self::new(rows, n, data)
    }

    pub fn read_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref()).map_err(|e| Error::io(path.as_ref(), e))?;
        Self::read_csv(file)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["t".to_string()];
        header.extend((0..self.n).map(|i| format!("arm_{i}")));
        w.write_record(&header)?;
        for t in 0..self.horizon {
            let mut rec = vec![t.to_string()];
            rec.extend(self.row(t).iter().map(|&v| format_float(v)));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Anything that serves per-arm losses in `[0, 1]` for a fixed horizon.
pub trait BanditEnvironment {
    fn losses(&self) -> &LossMatrix;

    fn horizon(&self) -> usize {
        self.losses().horizon()
    }

    fn n_arms(&self) -> usize {
        self.losses().n()
    }

    fn loss(&self, t: usize, arm: usize) -> f64 {
        self.losses().get(t, arm)
    }
}

impl BanditEnvironment for LossMatrix {
    fn losses(&self) -> &LossMatrix {
        self
    }
}

/// Expert-advice environment with a boosted arm that changes at given
/// rounds: base rewards uniform on `[0, 0.5)`, plus `boost` on arm
/// `j mod n` during segment `j`. Learners receive `1 - reward`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseExpertEnv {
    change_points: Vec<usize>,
    boost: f64,
    rewards: LossMatrix,
    losses: LossMatrix,
}

impl PiecewiseExpertEnv {
    /// Upper end of the base reward range.
    pub const BASE_MAX: f64 = 0.5;

    pub fn generate(
        n: usize,
        horizon: usize,
        change_points: &[usize],
        boost: f64,
        seed: u64,
    ) -> Result<Self> {
        let mut rng = crate::rng::stream(seed, crate::rng::ENVIRONMENT_STREAM);
        Self::generate_with(n, horizon, change_points, boost, &mut rng)
    }

    pub fn generate_with<R: Rng + ?Sized>(
        n: usize,
        horizon: usize,
        change_points: &[usize],
        boost: f64,
        rng: &mut R,
    ) -> Result<Self> {
        validate_change_points(change_points, horizon)?;
        if n == 0 {
            return Err(Error::invalid("need at least one arm"));
        }
        if !(0.0..=1.0 - Self::BASE_MAX).contains(&boost) {
            return Err(Error::invalid(format!(
                "boost {boost} must lie in [0, {}] to keep rewards in [0, 1]",
                1.0 - Self::BASE_MAX
            )));
        }
        let mut data = Vec::with_capacity(n * horizon);
        let mut segment = 0;
        for t in 0..horizon {
            while segment < change_points.len() && t >= change_points[segment] {
                segment += 1;
            }
            let boosted = segment % n;
            for arm in 0..n {
                let base: f64 = rng.random_range(0.0..Self::BASE_MAX);
                data.push(if arm == boosted { base + boost } else { base });
            }
        }
        let rewards = LossMatrix::new(horizon, n, data)?;
        let losses = rewards.complement();
        Ok(Self {
            change_points: change_points.to_vec(),
            boost,
            rewards,
            losses,
        })
    }

    pub fn rewards(&self) -> &LossMatrix {
        &self.rewards
    }

    pub fn change_points(&self) -> &[usize] {
        &self.change_points
    }

    pub fn boost(&self) -> f64 {
        self.boost
    }

    /// Round ranges of the segments, in order.
    pub fn segments(&self) -> Vec<Range<usize>> {
        segments(&self.change_points, self.rewards.horizon())
    }

    pub fn boosted_arm(&self, t: usize) -> usize {
        let seg = self.change_points.iter().take_while(|&&c| c <= t).count();
        seg % self.rewards.n()
    }
}

impl BanditEnvironment for PiecewiseExpertEnv {
    fn losses(&self) -> &LossMatrix {
        &self.losses
    }
}

/// Change points must be strictly increasing and inside `(0, horizon)`.
pub fn validate_change_points(change_points: &[usize], horizon: usize) -> Result<()> {
    if horizon == 0 {
        return Err(Error::invalid("horizon must be >= 1"));
    }
    for (i, &c) in change_points.iter().enumerate() {
        if c == 0 || c >= horizon {
            return Err(Error::invalid(format!(
                "change point {c} must lie strictly inside (0, {horizon})"
            )));
        }
        if i > 0 && change_points[i - 1] >= c {
            return Err(Error::invalid(format!(
                "change points must be strictly increasing ({} then {c})",
                change_points[i - 1]
            )));
        }
    }
    Ok(())
}

/// Splits `0..horizon` at the change points.
pub fn segments(change_points: &[usize], horizon: usize) -> Vec<Range<usize>> {
    let mut bounds = vec![0];
    bounds.extend_from_slice(change_points);
    bounds.push(horizon);
    bounds.windows(2).map(|w| w[0]..w[1]).collect()
}

/// One round of a transcript.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryRecord {
    pub round: usize,
    /// Queries in announcement order, duplicates included.
    pub announced: Vec<usize>,
    pub revealed: BTreeMap<usize, f64>,
    /// Arm whose loss was suffered, with that loss.
    pub suffered: Option<(usize, f64)>,
}

/// Per-round record of what a learner asked for and was shown.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QueryTranscript {
    pub records: Vec<QueryRecord>,
}

/// Query protocol over a bandit environment: the learner announces arms for
/// a round, then receives their losses. Each round can be revealed once.
#[derive(Debug)]
pub struct QuerySession<'a, E: BanditEnvironment + ?Sized> {
    env: &'a E,
    budget: usize,
    next_round: usize,
    transcript: QueryTranscript,
}

impl<'a, E: BanditEnvironment + ?Sized> QuerySession<'a, E> {
    /// Budget for the two-query multi-armed bandit protocol.
    pub const MAB_BUDGET: usize = 2;

    pub fn new(env: &'a E, budget: usize) -> Self {
        Self {
            env,
            budget,
            next_round: 0,
            transcript: QueryTranscript::default(),
        }
    }

    pub fn env(&self) -> &E {
        self.env
    }

    /// Reveals the losses of `announced` at round `t` (0-based). Duplicate
    /// arms yield one entry; each announcement counts against the budget.
    pub fn reveal(&mut self, t: usize, announced: &[usize]) -> Result<BTreeMap<usize, f64>> {
        if announced.is_empty() {
            return Err(Error::protocol(format!("empty query at round {t}")));
        }
        if t < self.next_round {
            return Err(Error::protocol(format!("round {t} was already revealed")));
        }
        if t >= self.env.horizon() {
            return Err(Error::protocol(format!("round {t} beyond the horizon")));
        }
        if announced.len() > self.budget {
            return Err(Error::protocol(format!(
                "{} queries at round {t} exceed the budget of {}",
                announced.len(),
                self.budget
            )));
        }
        let n = self.env.n_arms();
        if let Some(&a) = announced.iter().find(|&&a| a >= n) {
            return Err(Error::invalid(format!("arm {a} out of range for {n} arms")));
        }
        let revealed: BTreeMap<usize, f64> =
            announced.iter().map(|&a| (a, self.env.loss(t, a))).collect();
        self.next_round = t + 1;
        self.transcript.records.push(QueryRecord {
            round: t,
            announced: announced.to_vec(),
            revealed: revealed.clone(),
            suffered: None,
        });
        Ok(revealed)
    }

    /// Charges the loss of `arm` at round `t`; the arm must have been
    /// revealed in that round.
    pub fn suffer(&mut self, t: usize, arm: usize) -> Result<f64> {
        let rec = self
            .transcript
            .records
            .last_mut()
            .filter(|r| r.round == t)
            .ok_or_else(|| Error::protocol(format!("round {t} has not been revealed")))?;
        if rec.suffered.is_some() {
            return Err(Error::protocol(format!("round {t} already charged")));
        }
        let loss = *rec
            .revealed
            .get(&arm)
            .ok_or_else(|| Error::protocol(format!("arm {arm} was not announced in round {t}")))?;
        rec.suffered = Some((arm, loss));
        Ok(loss)
    }

    pub fn transcript(&self) -> &QueryTranscript {
        &self.transcript
    }

    pub fn into_transcript(self) -> QueryTranscript {
        self.transcript
    }
}

/// Losses over points of `R^d`, fixed before play.
pub trait ConvexLoss {
    fn dim(&self) -> usize;
    fn horizon(&self) -> usize;
    fn loss(&self, t: usize, x: &[f64]) -> f64;
}

/// `l_t(x) = |x - c_t|^2` where the center `c_t` switches at change points
/// (segment `j` uses `centers[j mod len]`).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticEnv {
    horizon: usize,
    centers: Vec<Vec<f64>>,
    change_points: Vec<usize>,
}

impl QuadraticEnv {
    pub fn new(horizon: usize, centers: Vec<Vec<f64>>, change_points: Vec<usize>) -> Result<Self> {
        validate_change_points(&change_points, horizon)?;
        let d = centers.first().map_or(0, Vec::len);
        if d == 0 || centers.iter().any(|c| c.len() != d) {
            return Err(Error::invalid("centers must be non-empty vectors of one dimension"));
        }
        if centers.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite center coordinate"));
        }
        Ok(Self {
            horizon,
            centers,
            change_points,
        })
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    pub fn center_at(&self, t: usize) -> &[f64] {
        let seg = self.change_points.iter().take_while(|&&c| c <= t).count();
        &self.centers[seg % self.centers.len()]
    }

    /// Gradient `2 (x - c_t)`.
    pub fn gradient(&self, t: usize, x: &[f64]) -> Vec<f64> {
        x.iter().zip(self.center_at(t)).map(|(a, c)| 2.0 * (a - c)).collect()
    }
}

impl ConvexLoss for QuadraticEnv {
    fn dim(&self) -> usize {
        self.centers[0].len()
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn loss(&self, t: usize, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.center_at(t))
            .map(|(a, c)| (a - c) * (a - c))
            .sum()
    }
}

/// Points evaluated in one round, with their values.
#[derive(Debug, Clone, PartialEq)]
pub struct PointRecord {
    pub round: usize,
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
}

/// Query protocol over a convex loss: all points of a round are announced
/// together, then evaluated. Optional observation noise is uniform on
/// `[0, noise)` and drawn from the oracle's own stream.
#[derive(Debug)]
pub struct PointOracle<'a, L: ConvexLoss + ?Sized> {
    loss: &'a L,
    budget: usize,
    next_round: usize,
    noise: Option<(f64, StreamRng)>,
    transcript: Vec<PointRecord>,
}

impl<'a, L: ConvexLoss + ?Sized> PointOracle<'a, L> {
    pub fn new(loss: &'a L, budget: usize) -> Self {
        Self {
            loss,
            budget,
            next_round: 0,
            noise: None,
            transcript: Vec::new(),
        }
    }

    pub fn with_noise(mut self, amplitude: f64, rng: StreamRng) -> Self {
        if amplitude > 0.0 {
            self.noise = Some((amplitude, rng));
        }
        self
    }

    /// Evaluates every announced point of round `t` (0-based).
    pub fn evaluate(&mut self, t: usize, points: &[Vec<f64>]) -> Result<Vec<f64>> {
        if points.is_empty() {
            return Err(Error::protocol(format!("empty query at round {t}")));
        }
        if t < self.next_round {
            return Err(Error::protocol(format!("round {t} was already evaluated")));
        }
        if t >= self.loss.horizon() {
            return Err(Error::protocol(format!("round {t} beyond the horizon")));
        }
        if points.len() > self.budget {
            return Err(Error::protocol(format!(
                "{} evaluations at round {t} exceed the budget of {}",
                points.len(),
                self.budget
            )));
        }
        if points.iter().any(|p| p.len() != self.loss.dim()) {
            return Err(Error::invalid("point dimension does not match the loss"));
        }
        let values: Vec<f64> = points
            .iter()
            .map(|p| {
                let v = self.loss.loss(t, p);
                match &mut self.noise {
                    Some((amp, rng)) => v + rng.random_range(0.0..*amp),
                    None => v,
                }
            })
            .collect();
        self.next_round = t + 1;
        self.transcript.push(PointRecord {
            round: t,
            points: points.to_vec(),
            values: values.clone(),
        });
        Ok(values)
    }

    pub fn transcript(&self) -> &[PointRecord] {
        &self.transcript
    }

    pub fn into_transcript(self) -> Vec<PointRecord> {
        self.transcript
    }
}
