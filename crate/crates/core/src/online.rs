//! Probability vectors over arms, one-hot importance-weighted loss
//! estimates, and exponential-weights (EXP3) state driven by an arbitrary
//! unbiased estimator.

use rand::Rng;

use crate::error::{Error, Result};

/// Tolerance on the unit-sum invariant of [`ArmDistribution`].
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Floor applied to every weight after renormalization so that long runs
/// never underflow to an exact zero.
pub const WEIGHT_FLOOR: f64 = 1e-300;

/// A probability vector over `n >= 1` arms.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmDistribution {
    probs: Vec<f64>,
}

impl ArmDistribution {
    /// Validates `probs` as a distribution: non-empty, finite, non-negative,
    /// summing to one within [`SUM_TOLERANCE`].
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::invalid("distribution over zero arms"));
        }
        if let Some((i, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return Err(Error::invalid(format!(
                "probability {p} at arm {i} is negative or non-finite"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::invalid(format!(
                "probabilities sum to {sum}, expected 1"
            )));
        }
        Ok(Self { probs })
    }

    /// The uniform distribution, every entry `1/n`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("uniform distribution needs n >= 1"));
        }
        Ok(Self {
            probs: vec![1.0 / n as f64; n],
        })
    }

    /// Normalizes non-negative masses into a distribution.
    pub fn from_masses(masses: Vec<f64>) -> Result<Self> {
        let total: f64 = masses.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::NumericDomain(format!(
                "cannot normalize masses with total {total}"
            )));
        }
        Self::new(masses.into_iter().map(|m| m / total).collect())
    }

    // Callers guarantee the invariants (internal mixtures of valid distributions).
    pub(crate) fn from_vec_unchecked(probs: Vec<f64>) -> Self {
        debug_assert!(!probs.is_empty());
        debug_assert!(
            (probs.iter().sum::<f64>() - 1.0).abs() <= 1e-6,
            "unchecked distribution does not sum to 1"
        );
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, arm: usize) -> f64 {
        self.probs[arm]
    }

    pub fn n(&self) -> usize {
        self.probs.len()
    }

    /// Inverse-CDF sampling with one uniform draw. A draw landing exactly on a
    /// CDF boundary goes to the lower index (among arms with positive mass).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, &p) in self.probs.iter().enumerate() {
            acc += p;
            if p > 0.0 && u <= acc {
                return i;
            }
        }
        // rounding left the cumulative sum just below u
        self.probs
            .iter()
            .rposition(|&p| p > 0.0)
            .unwrap_or(self.probs.len() - 1)
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probs
    }
}

/// Uniform distribution over `n` arms.
pub fn uniform_distribution(n: usize) -> Result<ArmDistribution> {
    ArmDistribution::uniform(n)
}

/// Draws one arm from `dist`.
pub fn sample_arm<R: Rng + ?Sized>(dist: &ArmDistribution, rng: &mut R) -> usize {
    dist.sample(rng)
}

/// One-hot loss estimate `observed_loss / prob` on `arm`; every other
/// coordinate is implicitly zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparseLossEstimate {
    arm: usize,
    value: f64,
    n: usize,
}

impl SparseLossEstimate {
    pub fn new(arm: usize, observed_loss: f64, prob: f64, n: usize) -> Result<Self> {
        if arm >= n {
            return Err(Error::invalid(format!("arm {arm} out of range for {n} arms")));
        }
        if !(prob > 0.0 && prob <= 1.0) {
            return Err(Error::invalid(format!(
                "observation probability {prob} must lie in (0, 1]"
            )));
        }
        if !(0.0..=1.0).contains(&observed_loss) {
            return Err(Error::invalid(format!(
                "observed loss {observed_loss} outside [0, 1]"
            )));
        }
        Ok(Self {
            arm,
            value: observed_loss / prob,
            n,
        })
    }

    pub fn arm(&self) -> usize {
        self.arm
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Inner product with a dense vector over the same arms.
    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.value * dense[self.arm]
    }

    /// Dense expansion; only meant for tests and diagnostics.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.n];
        v[self.arm] = self.value;
        v
    }
}

/// Importance-weighted estimate of the loss vector from a single observation.
pub fn sparse_loss_estimate(
    arm: usize,
    observed_loss: f64,
    prob: f64,
    n: usize,
) -> Result<SparseLossEstimate> {
    SparseLossEstimate::new(arm, observed_loss, prob, n)
}

/// Exponential-weights state over `n` arms with a fixed learning rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Exp3State {
    weights: ArmDistribution,
    eta: f64,
}

impl Exp3State {
    /// Starts from uniform weights. `eta` must be finite and non-negative;
    /// a zero rate only arises for a single arm where there is nothing to learn.
    pub fn new(n: usize, eta: f64) -> Result<Self> {
        if !(eta.is_finite() && eta >= 0.0) {
            return Err(Error::invalid(format!("learning rate {eta} must be finite and >= 0")));
        }
        Ok(Self {
            weights: ArmDistribution::uniform(n)?,
            eta,
        })
    }

    pub fn weights(&self) -> &ArmDistribution {
        &self.weights
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn n(&self) -> usize {
        self.weights.n()
    }

    /// Back to uniform weights, keeping the rate.
    pub fn reset(&mut self) {
        let n = self.n();
        self.weights = ArmDistribution::from_vec_unchecked(vec![1.0 / n as f64; n]);
    }

    /// Multiplies the estimated arm's weight by `exp(-eta * value)` and
    /// renormalizes.
    pub fn update(&mut self, estimate: &SparseLossEstimate) -> Result<()> {
        if estimate.n() != self.n() {
            return Err(Error::invalid(format!(
                "estimate over {} arms applied to a {}-arm learner",
                estimate.n(),
                self.n()
            )));
        }
        if !estimate.value().is_finite() {
            return Err(Error::NumericDomain(format!(
                "non-finite loss estimate {}",
                estimate.value()
            )));
        }
        if self.n() == 1 {
            return Ok(());
        }
        let mut w = std::mem::take(&mut self.weights.probs);
        w[estimate.arm()] *= (-self.eta * estimate.value()).exp();
        let total: f64 = w.iter().sum();
        for x in &mut w {
            *x = (*x / total).max(WEIGHT_FLOOR);
        }
        self.weights.probs = w;
        Ok(())
    }
}

/// Functional form of [`Exp3State::update`].
pub fn exp3_update(state: &Exp3State, estimate: &SparseLossEstimate) -> Result<Exp3State> {
    let mut next = state.clone();
    next.update(estimate)?;
    Ok(next)
}

/// Learning rate `sqrt(ln n / (T n C))` for a run of `horizon` rounds whose
/// observation distribution `z` satisfies `w(i) <= C z(i)`.
pub fn bounded_observation_rate(n: usize, horizon: usize, c: f64) -> f64 {
    ((n as f64).ln() / (horizon as f64 * n as f64 * c)).sqrt()
}

/// Standalone EXP3 that plays from its own weights and updates from a
/// separate observation drawn from a caller-chosen distribution `z` with
/// `w(i) <= C z(i)`.
#[derive(Debug, Clone)]
pub struct ObservedExp3 {
    state: Exp3State,
    c_bound: f64,
}

impl ObservedExp3 {
    pub fn new(n: usize, horizon: usize, c_bound: f64) -> Result<Self> {
        if !(c_bound >= 1.0 && c_bound.is_finite()) {
            return Err(Error::invalid(format!("C = {c_bound} must be >= 1")));
        }
        if horizon == 0 {
            return Err(Error::invalid("horizon must be >= 1"));
        }
        let eta = bounded_observation_rate(n, horizon, c_bound);
        Ok(Self {
            state: Exp3State::new(n, eta)?,
            c_bound,
        })
    }

    pub fn state(&self) -> &Exp3State {
        &self.state
    }

    pub fn c_bound(&self) -> f64 {
        self.c_bound
    }

    /// Draws the played arm from the current weights.
    pub fn play<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.state.weights().sample(rng)
    }

    /// Draws the observed arm from `z`, asks `loss_of` for its loss and
    /// updates. Returns the observed arm.
    pub fn observe<R, F>(&mut self, z: &ArmDistribution, rng: &mut R, loss_of: F) -> Result<usize>
    where
        R: Rng + ?Sized,
        F: FnOnce(usize) -> f64,
    {
        if z.n() != self.state.n() {
            return Err(Error::invalid("observation distribution has the wrong arm count"));
        }
        debug_assert!(
            self.state
                .weights()
                .probs()
                .iter()
                .zip(z.probs())
                .all(|(w, zi)| *w <= self.c_bound * zi * (1.0 + 1e-9) + 1e-300),
            "observation distribution violates w <= C z"
        );
        let arm = z.sample(rng);
        let est = SparseLossEstimate::new(arm, loss_of(arm), z.prob(arm), z.n())?;
        self.state.update(&est)?;
        Ok(arm)
    }
}
