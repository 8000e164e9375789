//! Strongly adaptive bandit convex optimization.
//!
//! Online gradient descent experts on a shrunk copy of the domain, one per
//! interval scale, combined by the same restarting multiplicative meta
//! layer as the bandit learner. Two query modes are supported: three
//! evaluations per round with a one-expert gradient estimate, or two
//! evaluations per round with a shared linear surrogate.

mod domain;

use rand::Rng;
use rand_distr::StandardNormal;

pub use domain::{check_projection_contract, ConvexDomain, EuclideanBall};

use crate::error::{Error, Result};
use crate::online::WEIGHT_FLOOR;
use crate::stabl::IntervalSchedule;

/// How many points a round evaluates and how the experts learn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QueryMode {
    /// Play the mixture, then evaluate one sampled expert's point and its
    /// perturbation.
    ThreeQuery,
    /// Play the mixture and evaluate its own perturbation; every expert
    /// descends on the same linear surrogate.
    TwoQuerySurrogate,
}

impl QueryMode {
    pub fn queries_per_round(self) -> usize {
        match self {
            QueryMode::ThreeQuery => 3,
            QueryMode::TwoQuerySurrogate => 2,
        }
    }
}

/// Uniform direction on the unit sphere of `R^d`, by normalizing a
/// standard Gaussian vector.
pub fn sample_unit_sphere<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Vec<f64>> {
    if d == 0 {
        return Err(Error::invalid("sphere dimension must be >= 1"));
    }
    loop {
        let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let norm = norm(&g);
        if norm > 1e-12 {
            return Ok(g.into_iter().map(|v| v / norm).collect());
        }
    }
}

/// Projection onto `(1 - kappa delta) K`, computed as `c * proj_K(x / c)`.
pub fn project_shrunk<D: ConvexDomain + ?Sized>(x: &[f64], domain: &D, delta: f64) -> Result<Vec<f64>> {
    let c = shrink_factor(domain, delta)?;
    if x.len() != domain.dim() {
        return Err(Error::invalid(format!(
            "point has dimension {}, domain has {}",
            x.len(),
            domain.dim()
        )));
    }
    let scaled: Vec<f64> = x.iter().map(|v| v / c).collect();
    Ok(domain.project(&scaled).into_iter().map(|v| v * c).collect())
}

fn shrink_factor<D: ConvexDomain + ?Sized>(domain: &D, delta: f64) -> Result<f64> {
    let kappa = domain.kappa();
    if !(delta > 0.0 && delta * kappa < 1.0) {
        return Err(Error::invalid(format!(
            "delta {delta} must lie in (0, 1/kappa) with kappa = {kappa}"
        )));
    }
    Ok(1.0 - kappa * delta)
}

/// One-point spherical gradient estimate for the sampled expert,
/// `(d B / delta) (l(A + delta u) - l(A)) u`. Other experts get zero.
pub fn bco_gradient_estimate(
    loss_at_perturbed: f64,
    loss_at_point: f64,
    u: &[f64],
    d: usize,
    expert_count: usize,
    delta: f64,
) -> Result<Vec<f64>> {
    if !(delta > 0.0) {
        return Err(Error::invalid(format!("delta {delta} must be positive")));
    }
    if u.len() != d || (norm(u) - 1.0).abs() > 1e-9 {
        return Err(Error::invalid("u must be a unit vector of dimension d"));
    }
    check_finite(&[loss_at_perturbed, loss_at_point])?;
    let scale = d as f64 * expert_count as f64 * (loss_at_perturbed - loss_at_point) / delta;
    Ok(u.iter().map(|v| scale * v).collect())
}

/// Importance-weighted losses: `B * loss` for the sampled expert, zero for
/// the rest, plus their `p`-weighted mixture.
pub fn bco_loss_estimates(
    loss_at_point: f64,
    sampled_k: usize,
    expert_count: usize,
    meta_dist: &[f64],
) -> Result<(Vec<f64>, f64)> {
    if meta_dist.len() != expert_count || sampled_k >= expert_count {
        return Err(Error::invalid("meta distribution or sampled expert out of range"));
    }
    let mut est = vec![0.0; expert_count];
    est[sampled_k] = expert_count as f64 * loss_at_point;
    let mix = meta_dist[sampled_k] * est[sampled_k];
    Ok((est, mix))
}

/// An online gradient descent expert for intervals of one length.
#[derive(Debug, Clone, PartialEq)]
pub struct BcoExpertState {
    pub x: Vec<f64>,
    pub eta: f64,
    pub scale: usize,
}

impl BcoExpertState {
    /// Starts at the origin with `eta = D / (d G sqrt(scale) log2 T)`.
    pub fn new(dim: usize, scale: usize, horizon: usize, diameter: f64, lipschitz: f64) -> Self {
        let eta = diameter
            / (dim as f64 * lipschitz * (scale as f64).sqrt() * (horizon as f64).log2());
        Self {
            x: vec![0.0; dim],
            eta,
            scale,
        }
    }
}

/// `x <- proj_shrunk(x - eta g)`.
pub fn ogd_step<D: ConvexDomain + ?Sized>(
    state: &BcoExpertState,
    grad: &[f64],
    domain: &D,
    delta: f64,
) -> Result<BcoExpertState> {
    if grad.len() != state.x.len() {
        return Err(Error::invalid("gradient dimension mismatch"));
    }
    let moved: Vec<f64> = state.x.iter().zip(grad).map(|(x, g)| x - state.eta * g).collect();
    Ok(BcoExpertState {
        x: project_shrunk(&moved, domain, delta)?,
        ..state.clone()
    })
}

/// Problem constants the learner is tuned with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BcoParams {
    pub horizon: usize,
    /// Lipschitz constant `G` of every loss on the domain.
    pub lipschitz: f64,
    /// Upper bound on the loss values the oracle may return.
    pub loss_bound: f64,
    pub mode: QueryMode,
}

/// What happened in one round.
#[derive(Debug, Clone, PartialEq)]
pub struct BcoRound {
    /// 1-based round.
    pub round: usize,
    pub played: Vec<f64>,
    /// Every evaluated point, the played point first.
    pub queries: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    /// The expert whose point was probed (three-query mode only).
    pub sampled_expert: Option<usize>,
    /// `r(k)` fed to the meta layer.
    pub r_tilde: Vec<f64>,
    /// Meta weights the round was played with.
    pub meta_weights: Vec<f64>,
}

impl BcoRound {
    pub fn played_loss(&self) -> f64 {
        self.values[0]
    }
}

/// Full learner state at the start of round `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct BcoState<D: ConvexDomain = EuclideanBall> {
    domain: D,
    schedule: IntervalSchedule,
    params: BcoParams,
    experts: Vec<BcoExpertState>,
    meta_weights: Vec<f64>,
    eta_meta: Vec<f64>,
    delta: f64,
    t: usize,
}

/// Meta rate `(1 / G D) min{1/2, sqrt(log2 T / scale)}`, before the
/// positivity cap.
pub fn bco_eta_k(scale: usize, horizon: usize, lipschitz: f64, diameter: f64) -> f64 {
    let ratio = ((horizon as f64).log2() / scale as f64).sqrt();
    ratio.min(0.5) / (lipschitz * diameter)
}

impl<D: ConvexDomain> BcoState<D> {
    pub fn new(domain: D, schedule: IntervalSchedule, params: BcoParams) -> Result<Self> {
        if params.horizon != schedule.horizon() {
            return Err(Error::invalid(format!(
                "schedule horizon {} differs from {}",
                schedule.horizon(),
                params.horizon
            )));
        }
        if !(params.lipschitz > 0.0 && params.lipschitz.is_finite()) {
            return Err(Error::invalid("lipschitz constant must be positive and finite"));
        }
        if !(params.loss_bound > 0.0 && params.loss_bound.is_finite()) {
            return Err(Error::invalid("loss bound must be positive and finite"));
        }
        let dim = domain.dim();
        let diam = domain.outer_radius();
        let g = params.lipschitz;
        let b = schedule.expert_count() as f64;
        let delta = 1.0 / (domain.kappa() * params.horizon as f64);
        shrink_factor(&domain, delta)?;
        // keeps 1 + eta r >= 1/2 given the range of r in each mode
        let r_range = match params.mode {
            QueryMode::ThreeQuery => b * params.loss_bound,
            QueryMode::TwoQuerySurrogate => 2.0 * dim as f64 * g * diam,
        };
        let cap = (1.0 / (2.0 * g * diam * b * params.loss_bound.max(1.0))).min(1.0 / (2.0 * r_range));
        let eta_meta: Vec<f64> = schedule
            .scales()
            .iter()
            .map(|&s| bco_eta_k(s, params.horizon, g, diam).min(cap))
            .collect();
        let experts = schedule
            .scales()
            .iter()
            .map(|&s| BcoExpertState::new(dim, s, params.horizon, diam, g))
            .collect();
        Ok(Self {
            domain,
            schedule,
            params,
            experts,
            meta_weights: eta_meta.clone(),
            eta_meta,
            delta,
            t: 1,
        })
    }

    pub fn domain(&self) -> &D {
        &self.domain
    }

    pub fn schedule(&self) -> &IntervalSchedule {
        &self.schedule
    }

    pub fn params(&self) -> &BcoParams {
        &self.params
    }

    pub fn experts(&self) -> &[BcoExpertState] {
        &self.experts
    }

    pub fn meta_weights(&self) -> &[f64] {
        &self.meta_weights
    }

    pub fn eta_meta(&self) -> &[f64] {
        &self.eta_meta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn round(&self) -> usize {
        self.t
    }

    pub fn meta_distribution(&self) -> Vec<f64> {
        let total: f64 = self.meta_weights.iter().sum();
        self.meta_weights.iter().map(|w| w / total).collect()
    }

    /// `x_t = sum_k p_k A_k(t)`.
    pub fn played_point(&self) -> Vec<f64> {
        let p = self.meta_distribution();
        let mut x = vec![0.0; self.domain.dim()];
        for (pk, e) in p.iter().zip(&self.experts) {
            for (xi, ai) in x.iter_mut().zip(&e.x) {
                *xi += pk * ai;
            }
        }
        x
    }

    /// Plays one round. `oracle` receives every point of the round at once
    /// and must return their losses in the same order.
    pub fn play_round<R, F>(&mut self, rng: &mut R, oracle: F) -> Result<BcoRound>
    where
        R: Rng + ?Sized,
        F: FnOnce(&[Vec<f64>]) -> Result<Vec<f64>>,
    {
        if self.t > self.params.horizon {
            return Err(Error::protocol(format!("horizon {} exhausted", self.params.horizon)));
        }
        let dim = self.domain.dim();
        let b = self.experts.len();
        let p = self.meta_distribution();
        let played = self.played_point();
        let u = sample_unit_sphere(dim, rng)?;
        let sampled = match self.params.mode {
            QueryMode::ThreeQuery => Some(rng.random_range(0..b)),
            QueryMode::TwoQuerySurrogate => None,
        };
        let probe = match sampled {
            Some(k) => self.experts[k].x.clone(),
            None => played.clone(),
        };
        let perturbed: Vec<f64> = probe.iter().zip(&u).map(|(a, v)| a + self.delta * v).collect();
        let mut queries = vec![played.clone(), perturbed];
        if sampled.is_some() {
            queries.push(probe.clone());
        }
        let values = oracle(&queries)?;
        self.check_values(&queries, &values)?;

        let r = match sampled {
            Some(k) => {
                let (est, mix) = bco_loss_estimates(values[2], k, b, &p)?;
                let g = bco_gradient_estimate(values[1], values[2], &u, dim, b, self.delta)?;
                let r: Vec<f64> = est.iter().map(|e| mix - e).collect();
                self.experts[k] = ogd_step(&self.experts[k], &g, &self.domain, self.delta)?;
                r
            }
            None => {
                let g = bco_gradient_estimate(values[1], values[0], &u, dim, 1, self.delta)?;
                let r: Vec<f64> = self
                    .experts
                    .iter()
                    .map(|e| dot(&g, &played) - dot(&g, &e.x))
                    .collect();
                for e in &mut self.experts {
                    *e = ogd_step(e, &g, &self.domain, self.delta)?;
                }
                r
            }
        };
        let meta_weights = self.meta_weights.clone();
        self.apply_meta(&r);
        let round = BcoRound {
            round: self.t,
            played,
            queries,
            values,
            sampled_expert: sampled,
            r_tilde: r,
            meta_weights,
        };
        self.t += 1;
        Ok(round)
    }

    fn check_values(&self, queries: &[Vec<f64>], values: &[f64]) -> Result<()> {
        if values.len() != queries.len() {
            return Err(Error::protocol(format!(
                "oracle returned {} values for {} points",
                values.len(),
                queries.len()
            )));
        }
        check_finite(values)?;
        if let Some(v) = values.iter().find(|&&v| v < 0.0 || v > self.params.loss_bound) {
            return Err(Error::protocol(format!(
                "oracle value {v} outside [0, {}]",
                self.params.loss_bound
            )));
        }
        Ok(())
    }

    fn apply_meta(&mut self, r: &[f64]) {
        let next = self.t + 1;
        for k in 0..self.meta_weights.len() {
            if self.schedule.restarts_at(k, next) {
                self.meta_weights[k] = self.eta_meta[k];
                self.experts[k].x = vec![0.0; self.domain.dim()];
            } else {
                let factor = 1.0 + self.eta_meta[k] * r[k];
                debug_assert!(factor > 0.0, "meta factor {factor} for expert {k}");
                self.meta_weights[k] = (self.meta_weights[k] * factor).max(WEIGHT_FLOOR);
            }
        }
    }
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().find(|v| !v.is_finite()) {
        Some(v) => Err(Error::NumericDomain(format!("non-finite loss value {v}"))),
        None => Ok(()),
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::environments::{ConvexLoss, PointOracle, QuadraticEnv};
    use crate::stabl::build_schedule;

    fn ball(d: usize) -> EuclideanBall {
        EuclideanBall::new(d, 1.0, 1.0).unwrap()
    }

    #[test]
    fn sphere_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(sample_unit_sphere(0, &mut rng).is_err());
        for _ in 0..50 {
            let u = sample_unit_sphere(1, &mut rng).unwrap();
            assert!(u[0] == 1.0 || u[0] == -1.0);
            let v = sample_unit_sphere(7, &mut rng).unwrap();
            assert_abs_diff_eq!(norm(&v), 1.0, epsilon = 1e-12);
        }
        let mut mean = [0.0; 3];
        let draws = 100_000;
        for _ in 0..draws {
            let u = sample_unit_sphere(3, &mut rng).unwrap();
            for i in 0..3 {
                mean[i] += u[i] / draws as f64;
            }
        }
        for m in mean {
            assert!(m.abs() < 0.01, "{m}");
        }
    }

    #[test]
    fn shrunk_projection_examples() {
        let d = ball(2);
        let p = project_shrunk(&[1.8, 0.0], &d, 0.1).unwrap();
        assert_abs_diff_eq!(p[0], 0.9, epsilon = 1e-15);
        assert_eq!(p[1], 0.0);
        assert_eq!(project_shrunk(&[0.3, -0.2], &d, 0.1).unwrap(), vec![0.3, -0.2]);
        assert_eq!(project_shrunk(&[0.0, 0.0], &d, 0.1).unwrap(), vec![0.0, 0.0]);
        assert!(project_shrunk(&[0.0, 0.0], &d, 1.0).is_err());
        assert!(project_shrunk(&[0.0, 0.0], &d, 0.0).is_err());
        let thin = EuclideanBall::new(2, 0.5, 1.0).unwrap();
        assert!(project_shrunk(&[0.0, 0.0], &thin, 0.5).is_err());
    }

    #[test]
    fn gradient_examples() {
        let g = bco_gradient_estimate(1.05, 1.0, &[1.0, 0.0], 2, 4, 0.1).unwrap();
        assert_abs_diff_eq!(g[0], 4.0, epsilon = 1e-12);
        assert_eq!(g[1], 0.0);
        assert_eq!(bco_gradient_estimate(0.7, 0.7, &[0.0, 1.0], 2, 3, 0.1).unwrap(), vec![0.0, 0.0]);
        assert!(bco_gradient_estimate(1.0, 0.0, &[1.0, 1.0], 2, 1, 0.1).is_err());
        assert!(bco_gradient_estimate(1.0, 0.0, &[1.0], 1, 1, 0.0).is_err());
    }

    #[test]
    fn gradient_unbiased_on_quadratic() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let x = [0.3, 0.0];
        let f = |p: &[f64]| p.iter().map(|v| v * v).sum::<f64>();
        let delta = 0.05;
        let draws = 100_000;
        let mut sum = [0.0; 2];
        let mut sq = [0.0; 2];
        for _ in 0..draws {
            let u = sample_unit_sphere(2, &mut rng).unwrap();
            let xp = [x[0] + delta * u[0], x[1] + delta * u[1]];
            let g = bco_gradient_estimate(f(&xp), f(&x), &u, 2, 1, delta).unwrap();
            for i in 0..2 {
                sum[i] += g[i];
                sq[i] += g[i] * g[i];
            }
        }
        let truth = [0.6, 0.0];
        for i in 0..2 {
            let mean = sum[i] / draws as f64;
            let se = ((sq[i] / draws as f64 - mean * mean) / draws as f64).sqrt();
            assert!((mean - truth[i]).abs() <= 3.0 * se, "coord {i}: {mean} vs {}", truth[i]);
        }
    }

    #[test]
    fn loss_estimate_examples() {
        let (e, m) = bco_loss_estimates(0.5, 0, 2, &[0.5, 0.5]).unwrap();
        assert_eq!(e, vec![1.0, 0.0]);
        assert_eq!(m, 0.5);
        let (e, m) = bco_loss_estimates(0.0, 1, 3, &[0.2, 0.3, 0.5]).unwrap();
        assert_eq!(e, vec![0.0; 3]);
        assert_eq!(m, 0.0);
        assert!(bco_loss_estimates(0.3, 2, 2, &[0.5, 0.5]).is_err());
    }

    #[test]
    fn loss_estimates_unbiased() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = 4;
        let loss = 0.37;
        let draws = 100_000;
        let (mut s, mut sq) = (0.0, 0.0);
        for _ in 0..draws {
            let k = rng.random_range(0..b);
            let (e, _) = bco_loss_estimates(loss, k, b, &[0.25; 4]).unwrap();
            s += e[2];
            sq += e[2] * e[2];
        }
        let mean = s / draws as f64;
        let se = ((sq / draws as f64 - mean * mean) / draws as f64).sqrt();
        assert!((mean - loss).abs() <= 3.0 * se);
    }

    #[test]
    fn ogd_examples() {
        let d = ball(2);
        let s = BcoExpertState { x: vec![0.2, 0.1], eta: 0.1, scale: 8 };
        assert_eq!(ogd_step(&s, &[0.0, 0.0], &d, 0.01).unwrap().x, s.x);
        let m = ogd_step(&s, &[1.0, -1.0], &d, 0.01).unwrap();
        assert_abs_diff_eq!(m.x[0], 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(m.x[1], 0.2, epsilon = 1e-15);
        let out = ogd_step(&s, &[-100.0, 0.0], &d, 0.01).unwrap();
        assert_abs_diff_eq!(norm(&out.x), 0.99, epsilon = 1e-12);
    }

    fn state(mode: QueryMode, horizon: usize, scales: Option<&[usize]>) -> BcoState {
        let params = BcoParams {
            horizon,
            lipschitz: 4.0,
            loss_bound: 4.0,
            mode,
        };
        BcoState::new(ball(2), build_schedule(horizon, scales).unwrap(), params).unwrap()
    }

    #[test]
    fn query_counts_and_feasibility() {
        let env = QuadraticEnv::new(256, vec![vec![0.5, -0.3], vec![-0.4, 0.2]], vec![100]).unwrap();
        for mode in [QueryMode::ThreeQuery, QueryMode::TwoQuerySurrogate] {
            let mut s = state(mode, 256, None);
            let mut oracle = PointOracle::new(&env, mode.queries_per_round());
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            for t in 0..256 {
                let round = s.play_round(&mut rng, |pts| oracle.evaluate(t, pts)).unwrap();
                assert_eq!(round.queries.len(), mode.queries_per_round());
                for q in &round.queries {
                    assert!(norm(q) <= 1.0 + 1e-12);
                }
                for e in s.experts() {
                    assert!(norm(&e.x) <= 1.0 - s.delta() + 1e-12);
                }
                let zero_sum: f64 = round.meta_weights.iter().zip(&round.r_tilde).map(|(w, r)| w * r).sum();
                assert!(zero_sum.abs() < 1e-9);
                assert!(s.meta_weights().iter().all(|&w| w > 0.0));
            }
            assert_eq!(oracle.transcript().len(), 256);
            assert!(oracle.transcript().iter().all(|r| r.points.len() == mode.queries_per_round()));
            assert!(s.play_round(&mut rng, |_| Ok(vec![0.0; 3])).is_err());
        }
    }

    #[test]
    fn constant_loss_freezes_experts() {
        for mode in [QueryMode::ThreeQuery, QueryMode::TwoQuerySurrogate] {
            let mut s = state(mode, 64, Some(&[64]));
            let mut rng = ChaCha8Rng::seed_from_u64(2);
            for _ in 0..64 {
                let r = s.play_round(&mut rng, |pts| Ok(vec![0.3; pts.len()])).unwrap();
                assert_eq!(r.played, vec![0.0, 0.0]);
                assert!(r.r_tilde.iter().all(|&v| v.abs() < 1e-12));
            }
        }
    }

    #[test]
    fn oracle_misbehaviour() {
        let mut s = state(QueryMode::ThreeQuery, 64, None);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let e = s.play_round(&mut rng, |_| Ok(vec![0.1, f64::NAN, 0.1])).unwrap_err();
        assert!(matches!(e, Error::NumericDomain(_)));
        let e = s.play_round(&mut rng, |_| Ok(vec![0.1, -0.5, 0.1])).unwrap_err();
        assert!(matches!(e, Error::ProtocolViolation(_)));
        let e = s.play_round(&mut rng, |_| Ok(vec![0.1, 0.1])).unwrap_err();
        assert!(matches!(e, Error::ProtocolViolation(_)));
        assert_eq!(s.round(), 1);
    }

    #[test]
    fn converges_on_fixed_quadratic() {
        let env = QuadraticEnv::new(2048, vec![vec![0.4, -0.2]], vec![]).unwrap();
        for mode in [QueryMode::ThreeQuery, QueryMode::TwoQuerySurrogate] {
            let mut s = state(mode, 2048, None);
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            let losses: Vec<f64> = (0..2048)
                .map(|t| s.play_round(&mut rng, |pts| Ok(pts.iter().map(|p| env.loss(t, p)).collect())).unwrap().played_loss())
                .collect();
            let first: f64 = losses[..512].iter().sum();
            let last: f64 = losses[1536..].iter().sum();
            assert!(last <= first, "{mode:?}: {last} > {first}");
        }
    }

    #[test]
    fn single_expert_plays_its_point() {
        let mut s = state(QueryMode::ThreeQuery, 128, Some(&[128]));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let env = QuadraticEnv::new(128, vec![vec![0.5, 0.5]], vec![]).unwrap();
        for t in 0..127 {
            let r = s.play_round(&mut rng, |pts| Ok(pts.iter().map(|p| env.loss(t, p)).collect())).unwrap();
            assert_eq!(r.played, r.queries[2]);
            assert_eq!(s.played_point(), s.experts()[0].x);
        }
    }
}
