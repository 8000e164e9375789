//! Strongly adaptive bandit learner with one extra observation per round.
//!
//! A bank of EXP3 experts, one per interval scale, is aggregated by a
//! multiplicative-weights meta layer with per-scale rates and restarts.
//! The played arm is drawn from the meta mixture; a second, independent
//! query is drawn from an observation distribution whose floor
//! `v(t,k)/(2B)` keeps the importance-weighted estimate well behaved for
//! every expert at once. Only the observed arm's loss drives updates.

mod baseline;
mod schedule;

use std::collections::BTreeMap;

use rand::Rng;

pub use baseline::ClassicExp3;
pub use schedule::{build_schedule, IntervalSchedule};

use crate::error::{Error, Result};
use crate::online::{ArmDistribution, Exp3State, SparseLossEstimate, WEIGHT_FLOOR};

/// Which observation rule and schedule the learner uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Mixture observation distribution over the full schedule.
    Full,
    /// Observation query drawn uniformly over the arms.
    NaiveObservation,
    /// A single expert scale.
    SingleScale,
}

/// Meta-layer rate `min{1/(2 sqrt n), 1/sqrt(n * scale), 1/(4B)}`.
///
/// The last term keeps `1 + eta * r` at least one half, given the lower
/// bound `r >= -2B` that the observation floor guarantees.
pub fn eta_k(n: usize, scale: usize, expert_count: usize) -> f64 {
    let n = n as f64;
    (1.0 / (2.0 * n.sqrt()))
        .min(1.0 / (n * scale as f64).sqrt())
        .min(1.0 / (4.0 * expert_count as f64))
}

/// EXP3 rate of an expert covering intervals of length `scale`, using the
/// observation bound `C = 2B`.
pub fn expert_rate(n: usize, scale: usize, expert_count: usize) -> f64 {
    let n = n as f64;
    (n.ln() / (scale as f64 * n * 2.0 * expert_count as f64)).sqrt()
}

/// `P_i = m_i^2 / (2 sum_j m_j^2) + sum_k v_k(i) / (2B)` with
/// `m_i = max_k v_k(i)`.
pub fn observation_distribution(expert_dists: &[&ArmDistribution]) -> Result<ArmDistribution> {
    let b = expert_dists.len();
    if b == 0 {
        return Err(Error::invalid("no expert distributions"));
    }
    let n = expert_dists[0].n();
    if expert_dists.iter().any(|d| d.n() != n) {
        return Err(Error::invalid("expert distributions disagree on the arm count"));
    }
    let mut max_sq = vec![0.0f64; n];
    let mut avg = vec![0.0f64; n];
    for d in expert_dists {
        for (i, &p) in d.probs().iter().enumerate() {
            max_sq[i] = max_sq[i].max(p);
            avg[i] += p;
        }
    }
    for m in &mut max_sq {
        *m *= *m;
    }
    let norm: f64 = max_sq.iter().sum();
    let probs = max_sq
        .iter()
        .zip(&avg)
        .map(|(m, a)| m / (2.0 * norm) + a / (2.0 * b as f64))
        .collect();
    Ok(ArmDistribution::from_vec_unchecked(probs))
}

/// Convex combination `sum_k p_k v_k` of expert distributions.
pub fn mixture(meta_dist: &[f64], expert_dists: &[&ArmDistribution]) -> Result<ArmDistribution> {
    if meta_dist.len() != expert_dists.len() || expert_dists.is_empty() {
        return Err(Error::invalid("meta distribution and experts differ in length"));
    }
    let n = expert_dists[0].n();
    let mut out = vec![0.0; n];
    for (p, d) in meta_dist.iter().zip(expert_dists) {
        if d.n() != n {
            return Err(Error::invalid("expert distributions disagree on the arm count"));
        }
        for (o, v) in out.iter_mut().zip(d.probs()) {
            *o += p * v;
        }
    }
    Ok(ArmDistribution::from_vec_unchecked(out))
}

/// Instantaneous estimated regret of the meta mixture against one expert:
/// `value * (play(arm) - expert(arm))`.
pub fn r_tilde(
    estimate: &SparseLossEstimate,
    play_dist: &ArmDistribution,
    expert_dist: &ArmDistribution,
) -> f64 {
    estimate.dot(play_dist.probs()) - estimate.dot(expert_dist.probs())
}

/// Arms announced for one round, and the distributions they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundDecision {
    /// 1-based round the decision belongs to.
    pub round: usize,
    pub play_arm: usize,
    pub observe_arm: usize,
    pub play_dist: ArmDistribution,
    pub observe_dist: ArmDistribution,
}

impl RoundDecision {
    /// The two queries in announcement order: played arm, then observed arm.
    pub fn announced(&self) -> [usize; 2] {
        [self.play_arm, self.observe_arm]
    }
}

/// Full learner state at the start of round `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct StablState {
    schedule: IntervalSchedule,
    n: usize,
    t: usize,
    experts: Vec<Exp3State>,
    meta_weights: Vec<f64>,
    eta_meta: Vec<f64>,
    variant: Variant,
}

impl StablState {
    /// Learner over `n` arms for the given schedule. Meta weights start at
    /// `eta_k`, experts at uniform.
    pub fn new(n: usize, schedule: IntervalSchedule, variant: Variant) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("need at least one arm"));
        }
        if variant == Variant::SingleScale && schedule.expert_count() != 1 {
            return Err(Error::invalid(format!(
                "single-scale variant needs exactly one scale, got {:?}",
                schedule.scales()
            )));
        }
        let b = schedule.expert_count();
        let cap = match variant {
            Variant::Full | Variant::SingleScale => f64::INFINITY,
            // uniform observations only bound r below by -n
            Variant::NaiveObservation => 1.0 / (2.0 * n as f64),
        };
        let eta_meta: Vec<f64> = schedule
            .scales()
            .iter()
            .map(|&s| eta_k(n, s, b).min(cap))
            .collect();
        let experts = schedule
            .scales()
            .iter()
            .map(|&s| Exp3State::new(n, expert_rate(n, s, b)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            meta_weights: eta_meta.clone(),
            eta_meta,
            experts,
            schedule,
            n,
            t: 1,
            variant,
        })
    }

    /// Default schedule for the variant: dyadic scales, or for
    /// [`Variant::SingleScale`] the largest power of two not above `T/4`.
    pub fn with_default_schedule(n: usize, horizon: usize, variant: Variant) -> Result<Self> {
        let schedule = match variant {
            Variant::SingleScale => {
                if horizon < 2 {
                    return Err(Error::invalid(format!("horizon {horizon} must be >= 2")));
                }
                let quarter = (horizon / 4).max(1);
                IntervalSchedule::explicit(horizon, vec![1usize << quarter.ilog2()])?
            }
            _ => IntervalSchedule::dyadic(horizon)?,
        };
        Self::new(n, schedule, variant)
    }

    pub fn schedule(&self) -> &IntervalSchedule {
        &self.schedule
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Current 1-based round.
    pub fn round(&self) -> usize {
        self.t
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn experts(&self) -> &[Exp3State] {
        &self.experts
    }

    pub fn meta_weights(&self) -> &[f64] {
        &self.meta_weights
    }

    pub fn eta_meta(&self) -> &[f64] {
        &self.eta_meta
    }

    /// `sum_k w(k) / eta_k`.
    pub fn pseudo_weight(&self) -> f64 {
        self.meta_weights
            .iter()
            .zip(&self.eta_meta)
            .map(|(w, e)| w / e)
            .sum()
    }

    /// `p(t) = w / sum(w)`, recomputed from scratch.
    pub fn meta_distribution(&self) -> Vec<f64> {
        let total: f64 = self.meta_weights.iter().sum();
        self.meta_weights.iter().map(|w| w / total).collect()
    }

    fn expert_dists(&self) -> Vec<&ArmDistribution> {
        self.experts.iter().map(Exp3State::weights).collect()
    }

    /// The distribution the played arm is drawn from.
    pub fn play_distribution(&self) -> ArmDistribution {
        mixture(&self.meta_distribution(), &self.expert_dists())
            .expect("experts share the arm count")
    }

    /// The distribution the extra query is drawn from.
    pub fn observe_distribution(&self) -> ArmDistribution {
        match self.variant {
            Variant::NaiveObservation => ArmDistribution::uniform(self.n).expect("n >= 1"),
            _ => observation_distribution(&self.expert_dists()).expect("experts share the arm count"),
        }
    }

    /// Commits to the played and observed arms for the current round, using
    /// separate random streams for the two draws.
    pub fn decide<P, O>(&self, play_rng: &mut P, observe_rng: &mut O) -> Result<RoundDecision>
    where
        P: Rng + ?Sized,
        O: Rng + ?Sized,
    {
        if self.t > self.schedule.horizon() {
            return Err(Error::protocol(format!(
                "horizon {} exhausted",
                self.schedule.horizon()
            )));
        }
        let play_dist = self.play_distribution();
        let observe_dist = self.observe_distribution();
        let play_arm = play_dist.sample(play_rng);
        let observe_arm = observe_dist.sample(observe_rng);
        Ok(RoundDecision {
            round: self.t,
            play_arm,
            observe_arm,
            play_dist,
            observe_dist,
        })
    }

    /// The loss estimate built from the observed arm.
    pub fn estimate(&self, decision: &RoundDecision, observed_loss: f64) -> Result<SparseLossEstimate> {
        SparseLossEstimate::new(
            decision.observe_arm,
            observed_loss,
            decision.observe_dist.prob(decision.observe_arm),
            self.n,
        )
    }

    /// `r(k)` for every expert against the current expert distributions.
    pub fn r_tilde_values(&self, play_dist: &ArmDistribution, estimate: &SparseLossEstimate) -> Vec<f64> {
        self.experts
            .iter()
            .map(|e| r_tilde(estimate, play_dist, e.weights()))
            .collect()
    }

    // Restart or multiply each meta weight; does not advance the round.
    fn apply_meta(&mut self, r: &[f64]) {
        let next = self.t + 1;
        for k in 0..self.meta_weights.len() {
            if self.schedule.restarts_at(k, next) {
                self.meta_weights[k] = self.eta_meta[k];
                self.experts[k].reset();
            } else {
                let factor = 1.0 + self.eta_meta[k] * r[k];
                debug_assert!(factor > 0.0, "meta factor {factor} for expert {k}");
                self.meta_weights[k] = (self.meta_weights[k] * factor).max(WEIGHT_FLOOR);
            }
        }
    }

    /// Meta step alone: restart the experts whose scale divides `t + 1`,
    /// multiply every other weight by `1 + eta_k r(k)`. Leaves the round
    /// counter and the non-restarted experts untouched.
    pub fn meta_update(&mut self, estimate: &SparseLossEstimate) {
        let r = self.r_tilde_values(&self.play_distribution(), estimate);
        self.apply_meta(&r);
    }

    /// Consumes the observed loss for `decision` and moves to the next round.
    pub fn update(&mut self, decision: &RoundDecision, observed_loss: f64) -> Result<()> {
        if decision.round != self.t {
            return Err(Error::protocol(format!(
                "decision for round {} applied at round {}",
                decision.round, self.t
            )));
        }
        let estimate = self.estimate(decision, observed_loss)?;
        let r = self.r_tilde_values(&decision.play_dist, &estimate);
        for expert in &mut self.experts {
            expert.update(&estimate)?;
        }
        self.apply_meta(&r);
        self.t += 1;
        Ok(())
    }

    /// One complete round: announce `(x_t, x'_t)`, obtain the revealed losses
    /// from `feedback`, update. The returned map must cover both announced
    /// arms; the played arm's loss is only for accounting.
    pub fn play_round<P, O, F>(
        &mut self,
        play_rng: &mut P,
        observe_rng: &mut O,
        feedback: F,
    ) -> Result<(RoundDecision, BTreeMap<usize, f64>)>
    where
        P: Rng + ?Sized,
        O: Rng + ?Sized,
        F: FnOnce(&RoundDecision) -> Result<BTreeMap<usize, f64>>,
    {
        let decision = self.decide(play_rng, observe_rng)?;
        let revealed = feedback(&decision)?;
        for arm in decision.announced() {
            if !revealed.contains_key(&arm) {
                return Err(Error::protocol(format!(
                    "no loss revealed for announced arm {arm} in round {}",
                    decision.round
                )));
            }
        }
        self.update(&decision, revealed[&decision.observe_arm])?;
        Ok((decision, revealed))
    }
}

/// Mixture of the experts under the current meta weights.
pub fn meta_play_distribution(state: &StablState) -> ArmDistribution {
    state.play_distribution()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dist(p: &[f64]) -> ArmDistribution {
        ArmDistribution::new(p.to_vec()).unwrap()
    }

    #[test]
    fn eta_examples() {
        assert_eq!(eta_k(4, 16, 1), 0.125);
        assert_eq!(eta_k(1, 1, 1), 0.25);
        assert_abs_diff_eq!(eta_k(9, 4, 2), 0.125, epsilon = 1e-15);
    }

    #[test]
    fn observation_examples() {
        let (a, b) = (dist(&[1.0, 0.0]), dist(&[0.0, 1.0]));
        assert_eq!(observation_distribution(&[&a, &b]).unwrap().probs(), &[0.5, 0.5]);
        assert_eq!(observation_distribution(&[&a, &a]).unwrap().probs(), &[1.0, 0.0]);
        let u = ArmDistribution::uniform(5).unwrap();
        let p = observation_distribution(&[&u, &u, &u]).unwrap();
        for &x in p.probs() {
            assert_abs_diff_eq!(x, 0.2, epsilon = 1e-15);
        }
        let c = dist(&[0.5, 0.25, 0.25]);
        assert!(observation_distribution(&[&a, &c]).is_err());
    }

    #[test]
    fn observation_floors() {
        let ds = [dist(&[0.7, 0.2, 0.1]), dist(&[0.1, 0.1, 0.8]), dist(&[0.3, 0.3, 0.4])];
        let refs: Vec<_> = ds.iter().collect();
        let p = observation_distribution(&refs).unwrap();
        let m2: Vec<f64> = (0..3)
            .map(|i| ds.iter().map(|d| d.prob(i)).fold(0.0, f64::max).powi(2))
            .collect();
        let norm: f64 = m2.iter().sum();
        for i in 0..3 {
            for d in &ds {
                assert!(p.prob(i) >= d.prob(i) / 6.0);
            }
            assert!(p.prob(i) >= m2[i] / (2.0 * norm));
        }
    }

    #[test]
    fn mixture_examples() {
        let (a, b) = (dist(&[1.0, 0.0]), dist(&[0.0, 1.0]));
        assert_eq!(mixture(&[1.0], &[&a]).unwrap().probs(), &[1.0, 0.0]);
        assert_eq!(mixture(&[0.5, 0.5], &[&a, &b]).unwrap().probs(), &[0.5, 0.5]);
        assert_eq!(mixture(&[0.75, 0.25], &[&a, &b]).unwrap().probs(), &[0.75, 0.25]);
    }

    #[test]
    fn meta_play_uses_weight_ratio() {
        let schedule = build_schedule(100, Some(&[10, 20])).unwrap();
        let mut s = StablState::new(2, schedule, Variant::Full).unwrap();
        s.experts[0].update(&SparseLossEstimate::new(1, 1.0, 1e-3, 2).unwrap()).unwrap();
        s.experts[1].update(&SparseLossEstimate::new(0, 1.0, 1e-3, 2).unwrap()).unwrap();
        s.meta_weights = vec![3.0, 1.0];
        let v0 = s.experts[0].weights().probs().to_vec();
        let v1 = s.experts[1].weights().probs().to_vec();
        let p = meta_play_distribution(&s);
        for i in 0..2 {
            assert_abs_diff_eq!(p.prob(i), 0.75 * v0[i] + 0.25 * v1[i], epsilon = 1e-15);
        }
    }

    #[test]
    fn r_tilde_examples() {
        let play = dist(&[0.5, 0.5]);
        let expert = dist(&[1.0, 0.0]);
        let zero = SparseLossEstimate::new(0, 0.0, 0.5, 2).unwrap();
        assert_eq!(r_tilde(&zero, &play, &expert), 0.0);
        let two = SparseLossEstimate::new(0, 1.0, 0.5, 2).unwrap();
        assert_eq!(r_tilde(&two, &play, &expert), -1.0);
        assert_eq!(r_tilde(&two, &play, &play), 0.0);
    }

    #[test]
    fn restart_at_scale_boundary() {
        let schedule = build_schedule(4096, None).unwrap();
        let mut s = StablState::new(3, schedule, Variant::Full).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut obs = ChaCha8Rng::seed_from_u64(2);
        let losses = [0.9, 0.1, 0.5];
        for _ in 1..63 {
            let d = s.decide(&mut rng, &mut obs).unwrap();
            s.update(&d, losses[d.observe_arm]).unwrap();
        }
        assert_eq!(s.round(), 63);
        assert_ne!(s.experts[0].weights().probs(), &[1.0 / 3.0; 3]);
        let d = s.decide(&mut rng, &mut obs).unwrap();
        s.update(&d, losses[d.observe_arm]).unwrap();
        // round 63 done, round 64 starts a new 64-interval
        assert_eq!(s.meta_weights[0], s.eta_meta[0]);
        assert_eq!(s.experts[0].weights().probs(), &[1.0 / 3.0; 3]);
        assert_ne!(s.experts[1].weights().probs(), &[1.0 / 3.0; 3]);
    }

    #[test]
    fn zero_estimate_leaves_weights() {
        let schedule = build_schedule(100, Some(&[8, 16])).unwrap();
        let mut s = StablState::new(2, schedule, Variant::Full).unwrap();
        s.meta_weights = vec![0.3, 0.05];
        let before = s.meta_weights.clone();
        s.meta_update(&SparseLossEstimate::new(1, 0.0, 0.5, 2).unwrap());
        assert_eq!(s.meta_weights, before);
    }

    #[test]
    fn negative_r_shrinks_weight() {
        // one expert, eta = 0.1: 0.1 * (1 + 0.1 * -2) = 0.08
        let schedule = build_schedule(1000, Some(&[1000])).unwrap();
        let mut s = StablState::new(100, schedule, Variant::Full).unwrap();
        assert_abs_diff_eq!(s.eta_meta[0], 1.0 / (100.0f64 * 1000.0).sqrt(), epsilon = 1e-15);
        s.eta_meta[0] = 0.1;
        s.meta_weights[0] = 0.1;
        s.apply_meta(&[-2.0]);
        assert_abs_diff_eq!(s.meta_weights[0], 0.08, epsilon = 1e-15);
    }

    #[test]
    fn single_arm_is_deterministic() {
        let mut s = StablState::with_default_schedule(1, 64, Variant::Full).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut obs = ChaCha8Rng::seed_from_u64(4);
        while s.round() <= 64 {
            let (d, _) = s
                .play_round(&mut rng, &mut obs, |_| Ok(BTreeMap::from([(0, 0.4)])))
                .unwrap();
            assert_eq!(d.announced(), [0, 0]);
        }
        // r = value * (1 - 1) = 0, so every weight sits at eta_k or was restarted to it
        assert_eq!(s.meta_weights(), s.eta_meta());
    }

    #[test]
    fn zero_losses_keep_uniform_experts() {
        let mut s = StablState::with_default_schedule(4, 512, Variant::Full).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut obs = ChaCha8Rng::seed_from_u64(9);
        while s.round() <= 512 {
            let w_before = s.meta_weights().to_vec();
            let d = s.decide(&mut rng, &mut obs).unwrap();
            s.update(&d, 0.0).unwrap();
            for e in s.experts() {
                assert_eq!(e.weights().probs(), &[0.25; 4]);
            }
            for (k, (&a, &b)) in s.meta_weights().iter().zip(&w_before).enumerate() {
                assert!(a == b || a == s.eta_meta()[k]);
            }
        }
    }

    #[test]
    fn missing_feedback_is_a_protocol_error() {
        let mut s = StablState::with_default_schedule(5, 64, Variant::Full).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut obs = ChaCha8Rng::seed_from_u64(2);
        let err = s
            .play_round(&mut rng, &mut obs, |_| Ok(BTreeMap::new()))
            .unwrap_err();
        assert!(matches!(err, Error::ProtocolViolation(_)));
        assert_eq!(s.round(), 1);
    }

    #[test]
    fn stale_decision_and_exhausted_horizon() {
        let mut s = StablState::with_default_schedule(2, 2, Variant::Full).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = s.decide(&mut rng.clone(), &mut rng).unwrap();
        s.update(&d, 0.5).unwrap();
        assert!(matches!(s.update(&d, 0.5), Err(Error::ProtocolViolation(_))));
        let d2 = s.decide(&mut rng.clone(), &mut rng).unwrap();
        s.update(&d2, 0.5).unwrap();
        assert!(matches!(s.decide(&mut rng.clone(), &mut rng), Err(Error::ProtocolViolation(_))));
    }

    #[test]
    fn naive_variant_observes_uniformly() {
        let s = StablState::with_default_schedule(7, 256, Variant::NaiveObservation).unwrap();
        assert_eq!(s.observe_distribution(), ArmDistribution::uniform(7).unwrap());
        assert!(s.eta_meta().iter().all(|&e| e <= 1.0 / 14.0));
    }

    #[test]
    fn single_scale_defaults() {
        let s = StablState::with_default_schedule(30, 4096, Variant::SingleScale).unwrap();
        assert_eq!(s.schedule().scales(), &[1024]);
        let two = build_schedule(4096, Some(&[512, 1024])).unwrap();
        assert!(StablState::new(3, two, Variant::SingleScale).is_err());
    }
}
