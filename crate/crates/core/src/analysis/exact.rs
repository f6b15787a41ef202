use crate::adversary::{eve_guess_bits, AttackStrategy, Eve};
use crate::bellmap::EncodingOp;
use crate::protocol::{
    run_session_with, CheckingAnnouncement, DetectionPredicate, EncodingRecord, Message, OpPolicy, SessionConfig, Verdict,
};

use super::tree::{enumerate, EnumerationTree, NodeBudget};
use super::AnalysisError;

/// `m` groups, all of them checking groups.
pub fn checking_config(m: usize, predicate: DetectionPredicate, policy: OpPolicy) -> SessionConfig {
    let mut cfg = SessionConfig::new(m, m, Message::empty());
    cfg.predicate = predicate;
    cfg.checking_op_policy = policy;
    cfg
}

/// Verdict of every branch of a whole session.
pub fn verdict_tree(cfg: &SessionConfig, eve: &Eve, budget: NodeBudget) -> Result<EnumerationTree<Verdict>, AnalysisError> {
    enumerate(budget, |chance| {
        run_session_with(cfg, eve.clone(), chance).map(|run| run.transcript.verdict)
    })
}

/// Probability that a single checking group fails.
pub fn exact_detection(
    strategy: AttackStrategy,
    predicate: DetectionPredicate,
    policy: &OpPolicy,
    budget: NodeBudget,
) -> Result<f64, AnalysisError> {
    exact_detection_with(&Eve::new(strategy), predicate, policy, budget)
}

pub fn exact_detection_with(
    eve: &Eve,
    predicate: DetectionPredicate,
    policy: &OpPolicy,
    budget: NodeBudget,
) -> Result<f64, AnalysisError> {
    exact_session_detection(eve, predicate, policy, 1, budget)
}

/// Probability that a session with `m` checking groups ends `EveDetected`,
/// by joint enumeration of all `m` groups.
pub fn exact_session_detection(
    eve: &Eve,
    predicate: DetectionPredicate,
    policy: &OpPolicy,
    m: usize,
    budget: NodeBudget,
) -> Result<f64, AnalysisError> {
    let cfg = checking_config(m, predicate, *policy);
    let tree = verdict_tree(&cfg, eve, budget)?;
    Ok(tree.prob_where(|v| *v == Verdict::EveDetected))
}

/// `1 - (1 - p)^m`.
pub fn compose_detection(p: f64, m: usize) -> f64 {
    1.0 - (1.0 - p).powi(m as i32)
}

/// Outcome of one coded group with checking skipped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodedOutcome {
    pub op: EncodingOp,
    /// 1 for a correct guess, 1/4 for an abstention, 0 otherwise.
    pub eve_score: f64,
    pub bob_correct: bool,
}

/// Every branch of a single coded group, with Alice's operation drawn
/// uniformly and no checking groups.
pub fn coded_tree(eve: &Eve, budget: NodeBudget) -> Result<EnumerationTree<CodedOutcome>, AnalysisError> {
    enumerate(budget, |chance| {
        let op = EncodingOp::ALL[chance.pick(&[1.0; 4])];
        let cfg = SessionConfig::new(1, 0, Message::from_ops(&[op]));
        let run = run_session_with(&cfg, eve.clone(), chance)?;
        let announcements: Vec<_> = run.transcript.encoding.iter().map(EncodingRecord::announcement).collect();
        let guesses = eve_guess_bits(&run.eve, &[] as &[CheckingAnnouncement], &announcements);
        let eve_score = match guesses.first().and_then(|g| g.op) {
            Some(g) if g == op => 1.0,
            Some(_) => 0.0,
            None => 0.25,
        };
        Ok::<_, AnalysisError>(CodedOutcome {
            op,
            eve_score,
            bob_correct: run.transcript.decoded_bits.ops().first() == Some(&op),
        })
    })
}

/// Eve's normalized guess accuracy on a coded group.
pub fn exact_leakage(strategy: AttackStrategy, budget: NodeBudget) -> Result<f64, AnalysisError> {
    Ok(coded_tree(&Eve::new(strategy), budget)?.expectation(|o| o.eve_score))
}

/// Probability that Bob decodes Alice's operation correctly.
pub fn exact_fidelity(strategy: AttackStrategy, budget: NodeBudget) -> Result<f64, AnalysisError> {
    Ok(coded_tree(&Eve::new(strategy), budget)?.prob_where(|o| o.bob_correct))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::algebra::algebraic_detection;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn detection_examples() {
        let u = OpPolicy::uniform();
        let b = NodeBudget::default();
        let p = |s| exact_detection(s, DetectionPredicate::AnnouncedOp, &u, b).unwrap();
        assert!(close(p(AttackStrategy::None), 0.0));
        assert!(close(p(AttackStrategy::InterceptReplaceMeasureAfter), 0.75));
        assert!(close(p(AttackStrategy::AncillaPassive), 0.5));
        assert!(close(p(AttackStrategy::AncillaCorrective), 0.0));
    }

    #[test]
    fn enumeration_matches_algebra() {
        for policy in [OpPolicy::uniform(), OpPolicy::only(EncodingOp::U2), OpPolicy::new([1.0, 2.0, 3.0, 4.0]).unwrap()] {
            for predicate in DetectionPredicate::ALL {
                for s in AttackStrategy::ALL {
                    let e = exact_detection(s, predicate, &policy, NodeBudget::default()).unwrap();
                    let a = algebraic_detection(s, predicate, &policy);
                    assert!(close(e, a), "{s} {predicate} {policy:?}: {e} vs {a}");
                }
            }
        }
    }

    #[test]
    fn leaves_sum_to_one() {
        let cfg = checking_config(1, DetectionPredicate::AnnouncedOp, OpPolicy::uniform());
        for s in AttackStrategy::ALL {
            let tree = verdict_tree(&cfg, &Eve::new(s), NodeBudget::default()).unwrap();
            assert!(close(tree.total_prob(), 1.0));
        }
    }

    #[test]
    fn leakage_examples() {
        let b = NodeBudget::default();
        assert!(close(exact_leakage(AttackStrategy::None, b).unwrap(), 0.25));
        assert!(close(exact_leakage(AttackStrategy::AncillaCorrective, b).unwrap(), 0.25));
        assert!(close(exact_leakage(AttackStrategy::InterceptMeasureResend, b).unwrap(), 1.0));
        assert!(close(exact_fidelity(AttackStrategy::None, b).unwrap(), 1.0));
        assert!(close(exact_fidelity(AttackStrategy::AncillaCorrective, b).unwrap(), 1.0));
    }

    #[test]
    fn composition() {
        assert!(close(compose_detection(0.75, 2), 1.0 - 0.0625));
        assert_eq!(compose_detection(0.0, 50), 0.0);
    }

    #[test]
    fn budget_exceeded_is_reported() {
        let r = exact_detection(
            AttackStrategy::InterceptReplaceMeasureAfter,
            DetectionPredicate::AnnouncedOp,
            &OpPolicy::uniform(),
            NodeBudget(5),
        );
        assert!(matches!(r, Err(AnalysisError::BudgetExceeded { .. })));
    }
}
