//! Deterministic per-run random streams.
//!
//! A run seed `s` expands into independent ChaCha8 streams that share the key
//! derived from `s` and differ only in the stream id:
//!
//! | stream | id | used for |
//! |--------|----|----------|
//! | environment | 0 | reward matrix / loss noise |
//! | play | 1 | drawing the played arm |
//! | observe | 2 | drawing the observed arm, BCO expert and direction draws |

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub const ENVIRONMENT_STREAM: u64 = 0;
pub const PLAY_STREAM: u64 = 1;
pub const OBSERVE_STREAM: u64 = 2;

/// Stream `stream` of the run seeded with `seed`.
pub fn stream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// The three streams of one run.
#[derive(Debug, Clone)]
pub struct RunStreams {
    pub environment: StreamRng,
    pub play: StreamRng,
    pub observe: StreamRng,
}

impl RunStreams {
    pub fn new(seed: u64) -> Self {
        Self {
            environment: stream(seed, ENVIRONMENT_STREAM),
            play: stream(seed, PLAY_STREAM),
            observe: stream(seed, OBSERVE_STREAM),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_differ_and_repeat() {
        let mut a = RunStreams::new(42);
        let mut b = RunStreams::new(42);
        let x: [u64; 3] = [a.environment.random(), a.play.random(), a.observe.random()];
        let y: [u64; 3] = [b.environment.random(), b.play.random(), b.observe.random()];
        assert_eq!(x, y);
        assert!(x[0] != x[1] && x[1] != x[2]);
        let mut c = RunStreams::new(43);
        assert_ne!(c.play.random::<u64>(), x[1]);
    }
}
