use rand::Rng;

use crate::error::{Error, Result};
use crate::online::{ArmDistribution, Exp3State, SparseLossEstimate};

/// Non-adaptive EXP3 with uniform exploration: plays from
/// `(1 - gamma) w + gamma / n`, observes only the played arm, and runs the
/// whole horizon at `eta = sqrt(ln n / (T n))` with
/// `gamma = min{1, sqrt(n ln n / T)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicExp3 {
    state: Exp3State,
    gamma: f64,
    horizon: usize,
    t: usize,
}

impl ClassicExp3 {
    pub fn new(n: usize, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::invalid("horizon must be >= 1"));
        }
        let (nf, tf) = (n as f64, horizon as f64);
        let eta = (nf.ln() / (tf * nf)).sqrt();
        let gamma = (nf * nf.ln() / tf).sqrt().min(1.0);
        Ok(Self {
            state: Exp3State::new(n, eta)?,
            gamma,
            horizon,
            t: 1,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn eta(&self) -> f64 {
        self.state.eta()
    }

    pub fn round(&self) -> usize {
        self.t
    }

    pub fn weights(&self) -> &ArmDistribution {
        self.state.weights()
    }

    pub fn play_distribution(&self) -> ArmDistribution {
        let n = self.state.n() as f64;
        let probs = self
            .state
            .weights()
            .probs()
            .iter()
            .map(|w| (1.0 - self.gamma) * w + self.gamma / n)
            .collect();
        ArmDistribution::from_vec_unchecked(probs)
    }

    /// Draws the arm to play; returns it with its probability.
    pub fn decide<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(usize, f64)> {
        if self.t > self.horizon {
            return Err(Error::protocol(format!("horizon {} exhausted", self.horizon)));
        }
        let d = self.play_distribution();
        let arm = d.sample(rng);
        Ok((arm, d.prob(arm)))
    }

    pub fn update(&mut self, arm: usize, prob: f64, loss: f64) -> Result<()> {
        let est = SparseLossEstimate::new(arm, loss, prob, self.state.n())?;
        self.state.update(&est)?;
        self.t += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parameters() {
        let e = ClassicExp3::new(30, 4096).unwrap();
        assert!((e.eta() - (30f64.ln() / (4096.0 * 30.0)).sqrt()).abs() < 1e-15);
        assert!((e.gamma() - (30.0 * 30f64.ln() / 4096.0).sqrt()).abs() < 1e-15);
        assert_eq!(ClassicExp3::new(50, 10).unwrap().gamma(), 1.0);
    }

    #[test]
    fn concentrates_on_best_arm() {
        let mut e = ClassicExp3::new(3, 4000).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let losses = [0.9, 0.1, 0.9];
        for _ in 0..4000 {
            let (arm, p) = e.decide(&mut rng).unwrap();
            e.update(arm, p, losses[arm]).unwrap();
        }
        assert!(e.weights().prob(1) > 0.9);
        assert!(e.decide(&mut rng).is_err());
    }
}
