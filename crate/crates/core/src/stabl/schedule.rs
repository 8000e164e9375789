use crate::error::{Error, Result};

/// Interval lengths handled by the restarting experts.
///
/// By default the scales are the powers of two `2^k` for
/// `ceil(2 + log2 log2 T) <= k <= floor(log2 T)`; an explicit list
/// (e.g. `[20, 40, 80, ...]`) overrides that. Expert `k` restarts whenever
/// its scale divides the index of the next round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalSchedule {
    horizon: usize,
    scales: Vec<usize>,
}

impl IntervalSchedule {
    /// The dyadic schedule for `horizon` rounds.
    ///
    /// Short horizons (`T < 16` and `17 <= T < 32`) leave the exponent range
    /// empty; those fall back to the single scale `2^floor(log2 T)` so there
    /// is always one expert.
    pub fn dyadic(horizon: usize) -> Result<Self> {
        if horizon < 2 {
            return Err(Error::invalid(format!("horizon {horizon} must be >= 2")));
        }
        let k_max = horizon.ilog2();
        let k_min = (2.0 + (horizon as f64).log2().log2()).ceil() as u32;
        let k_min = k_min.min(k_max);
        Ok(Self {
            horizon,
            scales: (k_min..=k_max).map(|k| 1usize << k).collect(),
        })
    }

    /// A user-supplied, strictly increasing list of scales in `[1, horizon]`.
    pub fn explicit(horizon: usize, scales: Vec<usize>) -> Result<Self> {
        if horizon < 2 {
            return Err(Error::invalid(format!("horizon {horizon} must be >= 2")));
        }
        if scales.is_empty() {
            return Err(Error::invalid("explicit scale list is empty"));
        }
        if let Some(&s) = scales.iter().find(|&&s| s == 0 || s > horizon) {
            return Err(Error::invalid(format!(
                "scale {s} outside [1, {horizon}]"
            )));
        }
        if scales.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!(
                "scales {scales:?} must be strictly increasing"
            )));
        }
        Ok(Self { horizon, scales })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn scales(&self) -> &[usize] {
        &self.scales
    }

    /// Number of experts, `B`.
    pub fn expert_count(&self) -> usize {
        self.scales.len()
    }

    /// Whether expert `k` starts a fresh interval at round `next_round`.
    pub fn restarts_at(&self, k: usize, next_round: usize) -> bool {
        next_round % self.scales[k] == 0
    }
}

/// Builds the default dyadic schedule, or the explicit one when given.
pub fn build_schedule(horizon: usize, explicit_scales: Option<&[usize]>) -> Result<IntervalSchedule> {
    match explicit_scales {
        Some(s) => IntervalSchedule::explicit(horizon, s.to_vec()),
        None => IntervalSchedule::dyadic(horizon),
    }
}
