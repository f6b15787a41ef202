use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversary::AttackStrategy;
use crate::protocol::{run_session, ProtocolError, SessionConfig, Verdict};
use crate::qcore::RandomStream;

use super::AnalysisError;

/// Sampled per-group failure rate with a 3σ binomial interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub trials: u64,
    pub seed: u64,
    pub checked_groups: u64,
    pub failed_groups: u64,
    pub sessions_detected: u64,
    pub p: f64,
    pub ci: [f64; 2],
}

impl McEstimate {
    /// True when `exact` lies within three binomial standard deviations
    /// (taken at `exact`) of the sample rate.
    pub fn brackets(&self, exact: f64) -> bool {
        if self.checked_groups == 0 {
            return false;
        }
        let sigma = (exact * (1.0 - exact) / self.checked_groups as f64).sqrt();
        (self.p - exact).abs() <= 3.0 * sigma + 1e-12
    }
}

#[derive(Default, Clone, Copy)]
struct Tally {
    checked: u64,
    failed: u64,
    detected: u64,
}

impl Tally {
    fn add(self, o: Tally) -> Tally {
        Tally {
            checked: self.checked + o.checked,
            failed: self.failed + o.failed,
            detected: self.detected + o.detected,
        }
    }
}

/// Runs `trials` independent sessions of `cfg`, trial `t` seeded by
/// `(seed, t)`. The result does not depend on thread scheduling.
pub fn monte_carlo(cfg: &SessionConfig, strategy: AttackStrategy, trials: u64, seed: u64) -> Result<McEstimate, AnalysisError> {
    cfg.validate()?;
    let tally = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Tally, ProtocolError> {
            let run = run_session(cfg, strategy, &mut RandomStream::for_trial(seed, t))?;
            let checking = &run.transcript.checking;
            Ok(Tally {
                checked: checking.len() as u64,
                failed: checking.iter().filter(|r| !r.passed).count() as u64,
                detected: u64::from(run.transcript.verdict == Verdict::EveDetected),
            })
        })
        .try_reduce(Tally::default, |a, b| Ok(a.add(b)))?;

    let n = tally.checked.max(1) as f64;
    let p = tally.failed as f64 / n;
    let half = 3.0 * (p * (1.0 - p) / n).sqrt();
    Ok(McEstimate {
        trials,
        seed,
        checked_groups: tally.checked,
        failed_groups: tally.failed,
        sessions_detected: tally.detected,
        p,
        ci: [(p - half).max(0.0), (p + half).min(1.0)],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::exact::checking_config;
    use crate::protocol::{DetectionPredicate, OpPolicy};

    fn one() -> SessionConfig {
        checking_config(1, DetectionPredicate::AnnouncedOp, OpPolicy::uniform())
    }

    #[test]
    fn honest_never_fails() {
        let mc = monte_carlo(&one(), AttackStrategy::None, 10_000, 3).unwrap();
        assert_eq!(mc.failed_groups, 0);
        assert_eq!(mc.checked_groups, 10_000);
        assert!(mc.brackets(0.0));
    }

    #[test]
    fn seeded_runs_repeat() {
        let a = monte_carlo(&one(), AttackStrategy::AncillaPassive, 2_000, 9).unwrap();
        let b = monte_carlo(&one(), AttackStrategy::AncillaPassive, 2_000, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.brackets(0.5));
    }
}
