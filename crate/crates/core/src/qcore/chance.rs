use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Source of every random choice a simulated party makes.
///
/// Protocol code draws measurement outcomes, subset choices and operator
/// draws exclusively through this trait, so the same code path can be
/// sampled with a seeded stream or exhaustively enumerated.
pub trait Chance {
    /// Picks an index with probability proportional to `weights[i]`.
    /// Zero-weight entries are never returned.
    fn pick(&mut self, weights: &[f64]) -> usize;
}

/// Seeded counter-based stream keyed by `(seed, trial)`.
#[derive(Debug, Clone)]
pub struct RandomStream {
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self::for_trial(seed, 0)
    }

    /// Independent stream for trial `trial`; streams for distinct trials
    /// never overlap.
    pub fn for_trial(seed: u64, trial: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        RandomStream { rng }
    }
}

impl Chance for RandomStream {
    fn pick(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().sum();
        assert!(total > 0.0, "pick called with no positive weight");
        let u = self.rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut last = 0;
        for (i, &w) in weights.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            acc += w;
            last = i;
            if u < acc {
                return i;
            }
        }
        last
    }
}
