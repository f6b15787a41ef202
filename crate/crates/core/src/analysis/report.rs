use serde::{Deserialize, Serialize};

use crate::adversary::{AttackStrategy, Eve};
use crate::protocol::{DetectionPredicate, OpPolicy};

use super::algebra::algebraic_detection;
use super::exact::{checking_config, coded_tree, compose_detection, exact_detection};
use super::montecarlo::{monte_carlo, McEstimate};
use super::tree::NodeBudget;
use super::AnalysisError;

/// Session sizes at which detection power is tabulated.
pub const SESSION_SIZES: [usize; 7] = [1, 2, 5, 10, 20, 50, 100];

/// A probability stated in the published analysis, with the phrase it
/// comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublishedClaim {
    pub value: f64,
    pub tag: String,
}

fn claim(value: f64, tag: &str) -> Option<PublishedClaim> {
    Some(PublishedClaim {
        value,
        tag: tag.to_string(),
    })
}

/// Published per-group detection figure, if any. The same figure is
/// stated regardless of how the check is carried out.
pub fn published_detection(strategy: AttackStrategy) -> Option<PublishedClaim> {
    match strategy {
        AttackStrategy::None => None,
        AttackStrategy::InterceptMeasureResend => claim(0.75, "do not correlate ... with possibility of 3/4"),
        AttackStrategy::InterceptReplaceMeasureAfter => claim(0.75, "easy for Alice and Bob to find that Eve is in the line"),
        AttackStrategy::InterceptReplaceMeasureBefore => claim(0.75, "also at the level high up to 3/4"),
        AttackStrategy::AncillaPassive => claim(0.5, "find Eve with possibility of 1/2"),
        AttackStrategy::AncillaCorrective => claim(0.0, "successfully avoid the detection on her"),
    }
}

/// Published leakage figure, as a normalized guess accuracy.
pub fn published_leakage(strategy: AttackStrategy) -> Option<PublishedClaim> {
    match strategy {
        AttackStrategy::None | AttackStrategy::InterceptReplaceMeasureAfter => None,
        AttackStrategy::InterceptMeasureResend => claim(0.25, "Eve can get no information from Alice"),
        AttackStrategy::InterceptReplaceMeasureBefore => {
            claim(0.25, "can not get any information from Alice's encoding by her prior Bell measurements")
        }
        AttackStrategy::AncillaPassive => claim(0.25, "can not get any information form Alice's encoding"),
        AttackStrategy::AncillaCorrective => claim(0.25, "her attack does not affect the communication"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredicateValue {
    pub predicate: DetectionPredicate,
    /// `None` when the enumeration exceeded its node budget.
    pub p_exact: Option<f64>,
    pub p_algebraic: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SessionPoint {
    pub m: usize,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub strategy: AttackStrategy,
    pub predicate: DetectionPredicate,
    pub p_exact: Option<f64>,
    pub p_algebraic: f64,
    pub p_mc: Option<f64>,
    pub ci: Option<[f64; 2]>,
    pub mc: Option<McEstimate>,
    #[serde(rename = "paper_claim")]
    pub published_claim: Option<PublishedClaim>,
    pub abs_delta: Option<f64>,
    pub all_predicates: Vec<PredicateValue>,
    pub session_detection: Vec<SessionPoint>,
    pub eve_guess_accuracy: Option<f64>,
    pub honest_fidelity: Option<f64>,
}

impl DetectionReport {
    /// Exact value when available, otherwise the sampled one.
    pub fn p(&self) -> Option<f64> {
        self.p_exact.or(self.p_mc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionOptions {
    pub predicate: DetectionPredicate,
    pub policy: OpPolicy,
    /// Monte Carlo runs only when a seed is given.
    pub seed: Option<u64>,
    pub trials: u64,
    pub budget: NodeBudget,
}

impl Default for DetectionOptions {
    fn default() -> Self {
        DetectionOptions {
            predicate: DetectionPredicate::AnnouncedOp,
            policy: OpPolicy::uniform(),
            seed: None,
            trials: 10_000,
            budget: NodeBudget::default(),
        }
    }
}

fn exact_or_none(r: Result<f64, AnalysisError>) -> Result<Option<f64>, AnalysisError> {
    match r {
        Ok(p) => Ok(Some(p)),
        Err(AnalysisError::BudgetExceeded { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn detection_report(strategy: AttackStrategy, opts: &DetectionOptions) -> Result<DetectionReport, AnalysisError> {
    let mut all_predicates = Vec::with_capacity(2);
    for predicate in DetectionPredicate::ALL {
        all_predicates.push(PredicateValue {
            predicate,
            p_exact: exact_or_none(exact_detection(strategy, predicate, &opts.policy, opts.budget))?,
            p_algebraic: algebraic_detection(strategy, predicate, &opts.policy),
        });
    }
    let own = all_predicates
        .iter()
        .find(|v| v.predicate == opts.predicate)
        .copied()
        .expect("every predicate is evaluated");

    let mc = match opts.seed {
        Some(seed) => Some(monte_carlo(
            &checking_config(1, opts.predicate, opts.policy),
            strategy,
            opts.trials,
            seed,
        )?),
        None => None,
    };

    let (eve_guess_accuracy, honest_fidelity) = match coded_tree(&Eve::new(strategy), opts.budget) {
        Ok(tree) => (
            Some(tree.expectation(|o| o.eve_score)),
            Some(tree.prob_where(|o| o.bob_correct)),
        ),
        Err(AnalysisError::BudgetExceeded { .. }) => (None, None),
        Err(e) => return Err(e),
    };

    let p = own.p_exact.or(mc.map(|m| m.p));
    let published_claim = published_detection(strategy);
    let abs_delta = match (&published_claim, p) {
        (Some(c), Some(p)) => Some((p - c.value).abs()),
        _ => None,
    };
    let session_detection = match p {
        Some(p) => SESSION_SIZES.iter().map(|&m| SessionPoint { m, p: compose_detection(p, m) }).collect(),
        None => Vec::new(),
    };

    Ok(DetectionReport {
        strategy,
        predicate: opts.predicate,
        p_exact: own.p_exact,
        p_algebraic: own.p_algebraic,
        p_mc: mc.map(|m| m.p),
        ci: mc.map(|m| m.ci),
        mc,
        published_claim,
        abs_delta,
        all_predicates,
        session_detection,
        eve_guess_accuracy,
        honest_fidelity,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageReport {
    pub strategy: AttackStrategy,
    /// Eve's guess accuracy, abstentions scored at 1/4.
    pub guess_accuracy: f64,
    pub chance_level: f64,
    /// Probability that Bob still decodes correctly.
    pub bob_fidelity: f64,
    #[serde(rename = "paper_claim")]
    pub published_claim: Option<PublishedClaim>,
    pub abs_delta: Option<f64>,
}

pub fn leakage_report(strategy: AttackStrategy, budget: NodeBudget) -> Result<LeakageReport, AnalysisError> {
    let tree = coded_tree(&Eve::new(strategy), budget)?;
    let guess_accuracy = tree.expectation(|o| o.eve_score);
    let published_claim = published_leakage(strategy);
    Ok(LeakageReport {
        strategy,
        guess_accuracy,
        chance_level: 0.25,
        bob_fidelity: tree.prob_where(|o| o.bob_correct),
        abs_delta: published_claim.as_ref().map(|c| (guess_accuracy - c.value).abs()),
        published_claim,
    })
}

/// Every strategy under both predicates, in a fixed order.
pub fn sweep(opts: &DetectionOptions) -> Result<Vec<DetectionReport>, AnalysisError> {
    let mut out = Vec::with_capacity(AttackStrategy::ALL.len() * 2);
    for strategy in AttackStrategy::ALL {
        for predicate in DetectionPredicate::ALL {
            out.push(detection_report(strategy, &DetectionOptions { predicate, ..*opts })?);
        }
    }
    Ok(out)
}
