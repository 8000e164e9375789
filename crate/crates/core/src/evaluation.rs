//! Regret and reporting statistics computed after a run.

use serde::Serialize;

use crate::environments::{ConvexLoss, LossMatrix};
use crate::error::{Error, Result};
use crate::stabl::IntervalSchedule;

/// Default cap on `T * n` for [`sa_regret_exact`].
pub const DEFAULT_WORK_BUDGET: u128 = 10_000_000_000;

/// Arms played against a loss matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord<'a> {
    losses: &'a LossMatrix,
    plays: Vec<usize>,
    suffered: Vec<f64>,
    pub seed: u64,
    pub label: String,
}

impl<'a> RunRecord<'a> {
    pub fn new(losses: &'a LossMatrix, plays: Vec<usize>, seed: u64, label: impl Into<String>) -> Result<Self> {
        if plays.len() != losses.horizon() {
            return Err(Error::invalid(format!(
                "{} plays for a horizon of {}",
                plays.len(),
                losses.horizon()
            )));
        }
        if let Some(&a) = plays.iter().find(|&&a| a >= losses.n()) {
            return Err(Error::invalid(format!("played arm {a} out of range")));
        }
        let suffered = plays.iter().enumerate().map(|(t, &a)| losses.get(t, a)).collect();
        Ok(Self {
            losses,
            plays,
            suffered,
            seed,
            label: label.into(),
        })
    }

    pub fn losses(&self) -> &LossMatrix {
        self.losses
    }

    pub fn plays(&self) -> &[usize] {
        &self.plays
    }

    pub fn suffered(&self) -> &[f64] {
        &self.suffered
    }

    pub fn horizon(&self) -> usize {
        self.plays.len()
    }
}

/// A 1-based closed interval `[start, end]` and the regret on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalRegret {
    pub value: f64,
    pub start: usize,
    pub end: usize,
}

fn check_interval(horizon: usize, start: usize, end: usize) -> Result<()> {
    if start < 1 || start > end || end > horizon {
        return Err(Error::invalid(format!(
            "interval [{start}, {end}] not inside [1, {horizon}]"
        )));
    }
    Ok(())
}

/// Player loss minus the best fixed arm's loss on `[start, end]` (1-based).
pub fn static_regret(record: &RunRecord, start: usize, end: usize) -> Result<f64> {
    check_interval(record.horizon(), start, end)?;
    let m = record.losses;
    let player: f64 = record.suffered[start - 1..end].iter().sum();
    let best = (0..m.n())
        .map(|i| (start - 1..end).map(|t| m.get(t, i)).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    Ok(player - best)
}

/// Maximum interval regret of `player` against `n` comparators whose
/// per-round losses come from `comparator`.
///
/// For comparator `i` let `D_i(t)` be the cumulative player loss minus the
/// cumulative comparator loss. The best interval ending at `s` is found
/// from the running minimum of `D_i`, so the scan is `O(T n)`. Ties go to
/// the earliest start, then the earliest end.
fn max_interval_regret<F>(player: &[f64], n: usize, comparator: F) -> IntervalRegret
where
    F: Fn(usize, usize) -> f64,
{
    let mut diff = vec![0.0f64; n];
    // smallest D_i(j - 1) seen so far and the earliest j attaining it
    let mut low: Vec<(f64, usize)> = vec![(0.0, 1); n];
    let mut best = IntervalRegret {
        value: f64::NEG_INFINITY,
        start: 1,
        end: 1,
    };
    for (t, &p) in player.iter().enumerate() {
        let s = t + 1;
        for i in 0..n {
            diff[i] += p - comparator(t, i);
            let (min, j) = low[i];
            let value = diff[i] - min;
            if value > best.value || (value == best.value && j < best.start) {
                best = IntervalRegret { value, start: j, end: s };
            }
        }
        for i in 0..n {
            if diff[i] < low[i].0 {
                low[i] = (diff[i], s + 1);
            }
        }
    }
    best
}

fn check_budget(horizon: usize, n: usize, budget: u128) -> Result<()> {
    let required = horizon as u128 * n as u128;
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(())
}

/// Strongly adaptive regret: the maximum static regret over every interval,
/// with the interval that attains it.
///
/// Refuses with [`Error::BudgetExceeded`] when `T * n` exceeds `budget`;
/// [`sa_regret_geometric`] is the cheap alternative.
pub fn sa_regret_exact(record: &RunRecord, budget: u128) -> Result<IntervalRegret> {
    let m = record.losses;
    check_budget(record.horizon(), m.n(), budget)?;
    Ok(max_interval_regret(&record.suffered, m.n(), |t, i| m.get(t, i)))
}

/// Worst regret among the aligned intervals of one scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleRegret {
    pub scale: usize,
    pub worst: Option<IntervalRegret>,
}

/// For each scale `s`, the maximum static regret over the intervals
/// `[(q - 1) s + 1, q s]` that fit in the horizon.
pub fn sa_regret_geometric(record: &RunRecord, schedule: &IntervalSchedule) -> Result<Vec<ScaleRegret>> {
    if schedule.horizon() != record.horizon() {
        return Err(Error::invalid(format!(
            "schedule horizon {} differs from the record's {}",
            schedule.horizon(),
            record.horizon()
        )));
    }
    let mut out = Vec::with_capacity(schedule.expert_count());
    for &scale in schedule.scales() {
        let mut worst: Option<IntervalRegret> = None;
        for q in 1..=record.horizon() / scale {
            let (start, end) = ((q - 1) * scale + 1, q * scale);
            let value = static_regret(record, start, end)?;
            if worst.is_none_or(|w| value > w.value) {
                worst = Some(IntervalRegret { value, start, end });
            }
        }
        out.push(ScaleRegret { scale, worst });
    }
    Ok(out)
}

/// Trailing moving average; the first `window - 1` entries average over
/// the shorter prefix.
pub fn moving_average(series: &[f64], window: usize) -> Result<Vec<f64>> {
    if window == 0 {
        return Err(Error::invalid("moving-average window must be >= 1"));
    }
    let mut out = Vec::with_capacity(series.len());
    let mut sum = 0.0;
    for (t, &v) in series.iter().enumerate() {
        sum += v;
        if t >= window {
            sum -= series[t - window];
        }
        out.push(sum / (t + 1).min(window) as f64);
    }
    Ok(out)
}

/// Sample mean and standard error of the mean (zero for a single value).
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Points of a regular grid with `per_axis` points per coordinate on
/// `[-radius, radius]^d`, kept if inside the ball of that radius.
pub fn comparator_grid(dim: usize, radius: f64, per_axis: usize) -> Result<Vec<Vec<f64>>> {
    if dim == 0 || per_axis < 2 || !(radius > 0.0) {
        return Err(Error::invalid("grid needs dim >= 1, per_axis >= 2 and radius > 0"));
    }
    let total = (per_axis as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
    if total > 10_000_000 {
        return Err(Error::invalid(format!("grid of {total} points is too large")));
    }
    let step = 2.0 * radius / (per_axis - 1) as f64;
    let mut out = Vec::new();
    let mut idx = vec![0usize; dim];
    loop {
        let p: Vec<f64> = idx.iter().map(|&k| -radius + step * k as f64).collect();
        if p.iter().map(|v| v * v).sum::<f64>() <= radius * radius * (1.0 + 1e-12) {
            out.push(p);
        }
        let mut axis = 0;
        while axis < dim {
            idx[axis] += 1;
            if idx[axis] < per_axis {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
        if axis == dim {
            return Ok(out);
        }
    }
}

/// Strongly adaptive regret of a convex run against a finite comparator
/// set. Because the comparators are a subset of the domain this is a lower
/// bound on the regret against every point.
pub fn bco_sa_regret_grid<L: ConvexLoss + ?Sized>(
    loss: &L,
    played_losses: &[f64],
    grid: &[Vec<f64>],
    budget: u128,
) -> Result<IntervalRegret> {
    if played_losses.is_empty() || grid.is_empty() {
        return Err(Error::invalid("need at least one round and one comparator"));
    }
    if played_losses.len() > loss.horizon() {
        return Err(Error::invalid("more played rounds than the loss horizon"));
    }
    check_budget(played_losses.len(), grid.len(), budget)?;
    let table: Vec<Vec<f64>> = (0..played_losses.len())
        .map(|t| grid.iter().map(|x| loss.loss(t, x)).collect())
        .collect();
    Ok(max_interval_regret(played_losses, grid.len(), |t, i| table[t][i]))
}

/// Geometric-interval regret of a convex run against a finite comparator
/// set, one row per scale as in [`sa_regret_geometric`].
pub fn bco_regret_geometric_grid<L: ConvexLoss + ?Sized>(
    loss: &L,
    played_losses: &[f64],
    grid: &[Vec<f64>],
    schedule: &IntervalSchedule,
) -> Result<Vec<ScaleRegret>> {
    if grid.is_empty() || played_losses.len() != schedule.horizon() || played_losses.len() > loss.horizon() {
        return Err(Error::invalid("grid empty or horizons disagree"));
    }
    let t_max = played_losses.len();
    // prefix[t][i]: comparator i's loss summed over rounds before t
    let mut prefix = vec![vec![0.0; grid.len()]; t_max + 1];
    for t in 0..t_max {
        for (i, x) in grid.iter().enumerate() {
            prefix[t + 1][i] = prefix[t][i] + loss.loss(t, x);
        }
    }
    let mut out = Vec::with_capacity(schedule.expert_count());
    for &scale in schedule.scales() {
        let mut worst: Option<IntervalRegret> = None;
        for q in 1..=t_max / scale {
            let (start, end) = ((q - 1) * scale + 1, q * scale);
            let player: f64 = played_losses[start - 1..end].iter().sum();
            let best = (0..grid.len())
                .map(|i| prefix[end][i] - prefix[start - 1][i])
                .fold(f64::INFINITY, f64::min);
            let value = player - best;
            if worst.is_none_or(|w| value > w.value) {
                worst = Some(IntervalRegret { value, start, end });
            }
        }
        out.push(ScaleRegret { scale, worst });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    use crate::environments::QuadraticEnv;
    use crate::stabl::build_schedule;

    fn example() -> LossMatrix {
        LossMatrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    /// Triple loop over every interval, arm and round.
    fn naive(m: &LossMatrix, plays: &[usize]) -> IntervalRegret {
        let t_max = plays.len();
        let mut best = IntervalRegret { value: f64::NEG_INFINITY, start: 1, end: 1 };
        for j in 1..=t_max {
            for s in j..=t_max {
                let player: f64 = (j - 1..s).map(|t| m.get(t, plays[t])).sum();
                let arm = (0..m.n())
                    .map(|i| (j - 1..s).map(|t| m.get(t, i)).sum::<f64>())
                    .fold(f64::INFINITY, f64::min);
                if player - arm > best.value {
                    best = IntervalRegret { value: player - arm, start: j, end: s };
                }
            }
        }
        best
    }

    #[test]
    fn static_examples() {
        let m = example();
        let r = RunRecord::new(&m, vec![1, 1, 0], 0, "x").unwrap();
        assert_eq!(static_regret(&r, 1, 3).unwrap(), 2.0);
        assert_eq!(static_regret(&r, 3, 3).unwrap(), 1.0);
        assert!(static_regret(&r, 0, 2).is_err());
        assert!(static_regret(&r, 2, 1).is_err());
        assert!(static_regret(&r, 1, 4).is_err());
        let dom = LossMatrix::from_rows(&[vec![0.2, 0.9], vec![0.0, 0.5], vec![0.4, 0.6]]).unwrap();
        let best = RunRecord::new(&dom, vec![0, 0, 0], 0, "x").unwrap();
        for j in 1..=3 {
            for s in j..=3 {
                assert_eq!(static_regret(&best, j, s).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn record_validation() {
        let m = example();
        assert!(RunRecord::new(&m, vec![0, 1], 0, "x").is_err());
        assert!(RunRecord::new(&m, vec![0, 1, 2], 0, "x").is_err());
    }

    #[test]
    fn exact_examples() {
        let m = example();
        let r = RunRecord::new(&m, vec![1, 1, 0], 0, "x").unwrap();
        assert_eq!(
            sa_regret_exact(&r, DEFAULT_WORK_BUDGET).unwrap(),
            IntervalRegret { value: 2.0, start: 1, end: 2 }
        );
        let z = LossMatrix::new(4, 3, vec![0.0; 12]).unwrap();
        let r = RunRecord::new(&z, vec![2, 0, 1, 1], 0, "z").unwrap();
        assert_eq!(
            sa_regret_exact(&r, DEFAULT_WORK_BUDGET).unwrap(),
            IntervalRegret { value: 0.0, start: 1, end: 1 }
        );
    }

    #[test]
    fn exact_budget() {
        let m = example();
        let r = RunRecord::new(&m, vec![1, 1, 0], 0, "x").unwrap();
        match sa_regret_exact(&r, 5) {
            Err(Error::BudgetExceeded { required: 6, budget: 5 }) => {}
            other => panic!("{other:?}"),
        }
        assert!(sa_regret_exact(&r, 6).is_ok());
    }

    #[test]
    fn geometric_examples() {
        let m = LossMatrix::from_rows(&[
            vec![0.0, 1.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
            vec![0.5, 0.0],
        ])
        .unwrap();
        let r = RunRecord::new(&m, vec![1, 0, 0, 0], 0, "g").unwrap();
        let s = build_schedule(4, Some(&[2, 4])).unwrap();
        let g = sa_regret_geometric(&r, &s).unwrap();
        assert_eq!(g[0].worst, Some(IntervalRegret { value: 1.5, start: 3, end: 4 }));
        assert_eq!(g[1].worst, Some(IntervalRegret { value: 1.0, start: 1, end: 4 }));
        let dom = LossMatrix::from_rows(&vec![vec![0.1, 0.2]; 4]).unwrap();
        let perfect = RunRecord::new(&dom, vec![0; 4], 0, "p").unwrap();
        for row in sa_regret_geometric(&perfect, &s).unwrap() {
            assert_eq!(row.worst.unwrap().value, 0.0);
        }
        assert!(sa_regret_geometric(&r, &build_schedule(8, None).unwrap()).is_err());
    }

    #[test]
    fn moving_average_examples() {
        assert_eq!(moving_average(&[1.0, 2.0, 3.0], 2).unwrap(), vec![1.0, 1.5, 2.5]);
        assert_eq!(moving_average(&[4.0, -1.0, 7.0], 1).unwrap(), vec![4.0, -1.0, 7.0]);
        assert_eq!(moving_average(&[0.3; 5], 3).unwrap(), vec![0.3; 5]);
        assert!(moving_average(&[1.0], 0).is_err());
    }

    #[test]
    fn stderr_values() {
        let (m, s) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert_abs_diff_eq!(s, (5.0f64 / 3.0 / 4.0).sqrt(), epsilon = 1e-15);
        assert_eq!(mean_stderr(&[2.0]), (2.0, 0.0));
    }

    #[test]
    fn grid_points_stay_in_ball() {
        let g = comparator_grid(2, 1.0, 5).unwrap();
        assert!(g.iter().all(|p| p[0] * p[0] + p[1] * p[1] <= 1.0 + 1e-12));
        assert!(g.contains(&vec![0.0, 0.0]) && g.contains(&vec![1.0, 0.0]));
        assert!(!g.contains(&vec![1.0, 1.0]));
        assert!(comparator_grid(2, 1.0, 1).is_err());
    }

    #[test]
    fn grid_regret_matches_matrix_regret() {
        let env = QuadraticEnv::new(6, vec![vec![0.5], vec![-0.5]], vec![3]).unwrap();
        let grid = comparator_grid(1, 1.0, 5).unwrap();
        let played = [0.0, 0.0, 0.5, 0.5, -0.5, 0.0];
        let losses: Vec<f64> = played.iter().enumerate().map(|(t, &x)| env.loss(t, &[x])).collect();
        let r = bco_sa_regret_grid(&env, &losses, &grid, DEFAULT_WORK_BUDGET).unwrap();
        let mut best = f64::NEG_INFINITY;
        for j in 0..6 {
            for s in j..6 {
                let player: f64 = losses[j..=s].iter().sum();
                for p in &grid {
                    best = best.max(player - (j..=s).map(|t| env.loss(t, p)).sum::<f64>());
                }
            }
        }
        assert_eq!(r.value, best);
        assert!(bco_sa_regret_grid(&env, &losses, &grid, 10).is_err());
        let sched = build_schedule(6, Some(&[2, 3])).unwrap();
        let geo = bco_regret_geometric_grid(&env, &losses, &grid, &sched).unwrap();
        for row in &geo {
            let w = row.worst.unwrap();
            assert!(w.value <= r.value + 1e-12);
            let player: f64 = losses[w.start - 1..w.end].iter().sum();
            let best = grid
                .iter()
                .map(|p| (w.start - 1..w.end).map(|t| env.loss(t, p)).sum::<f64>())
                .fold(f64::INFINITY, f64::min);
            assert_abs_diff_eq!(w.value, player - best, epsilon = 1e-12);
        }
    }

    fn dyadic_instance() -> impl Strategy<Value = (usize, Vec<Vec<f64>>, Vec<usize>)> {
        (1usize..=5, 1usize..=64).prop_flat_map(|(n, t)| {
            (
                Just(n),
                proptest::collection::vec(proptest::collection::vec((0u32..=8).prop_map(|k| k as f64 / 8.0), n), t),
                proptest::collection::vec(0..n, t),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn exact_matches_naive((_n, rows, plays) in dyadic_instance()) {
            let m = LossMatrix::from_rows(&rows).unwrap();
            let r = RunRecord::new(&m, plays.clone(), 0, "p").unwrap();
            let fast = sa_regret_exact(&r, DEFAULT_WORK_BUDGET).unwrap();
            prop_assert_eq!(fast, naive(&m, &plays));
            let full = static_regret(&r, 1, plays.len()).unwrap();
            let sched = IntervalSchedule::dyadic(plays.len().max(2)).ok();
            if let (Some(s), true) = (sched, plays.len() >= 2) {
                let g = sa_regret_geometric(&r, &s).unwrap();
                let gmax = g.iter().filter_map(|x| x.worst).map(|w| w.value).fold(f64::NEG_INFINITY, f64::max);
                prop_assert!(fast.value >= gmax);
            }
            prop_assert!(fast.value >= full);
            prop_assert!(fast.value >= 0.0);
        }
    }
}
