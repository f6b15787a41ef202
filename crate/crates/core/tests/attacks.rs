use qsdc_core::adversary::{AttackStrategy, Eve, ReplacePairing};
use qsdc_core::analysis::{
    algebraic_detection, compose_detection, exact_detection, exact_detection_with, exact_session_detection, NodeBudget,
};
use qsdc_core::bellmap::EncodingOp;
use qsdc_core::protocol::{run_session, DetectionPredicate, Message, OpPolicy, SessionConfig};
use qsdc_core::qcore::{QubitId, RandomStream};

fn budget() -> NodeBudget {
    NodeBudget::default()
}

#[test]
fn only_u1_restores_the_correlations() {
    let policy = OpPolicy::uniform();
    for predicate in DetectionPredicate::ALL {
        let clean: Vec<EncodingOp> = EncodingOp::ALL
            .into_iter()
            .filter(|&fix| {
                let eve = Eve::new(AttackStrategy::AncillaCorrective).with_corrective_op(fix);
                exact_detection_with(&eve, predicate, &policy, budget()).unwrap().abs() < 1e-12
            })
            .collect();
        if predicate == DetectionPredicate::AnnouncedOp {
            assert_eq!(clean, vec![EncodingOp::U1]);
        }
    }
}

#[test]
fn crossed_pairing_is_equivalent() {
    for predicate in DetectionPredicate::ALL {
        for policy in [OpPolicy::uniform(), OpPolicy::only(EncodingOp::U3)] {
            let direct = Eve::new(AttackStrategy::InterceptReplaceMeasureBefore);
            let crossed = direct.clone().with_pairing(ReplacePairing::Crossed);
            let a = exact_detection_with(&direct, predicate, &policy, budget()).unwrap();
            let b = exact_detection_with(&crossed, predicate, &policy, budget()).unwrap();
            assert!((a - b).abs() < 1e-9, "{predicate}: {a} vs {b}");
        }
    }
}

#[test]
fn checking_groups_are_independent() {
    let policy = OpPolicy::uniform();
    for predicate in DetectionPredicate::ALL {
        for strategy in AttackStrategy::ALL {
            let p = exact_detection(strategy, predicate, &policy, budget()).unwrap();
            let joint = exact_session_detection(&Eve::new(strategy), predicate, &policy, 2, budget()).unwrap();
            assert!(
                (joint - compose_detection(p, 2)).abs() < 1e-9,
                "{strategy} {predicate}: {joint} vs {}",
                compose_detection(p, 2)
            );
        }
    }
}

#[test]
fn single_operation_policies_agree_with_algebra() {
    for op in EncodingOp::ALL {
        let policy = OpPolicy::only(op);
        for predicate in DetectionPredicate::ALL {
            for strategy in AttackStrategy::ALL {
                let e = exact_detection(strategy, predicate, &policy, budget()).unwrap();
                let a = algebraic_detection(strategy, predicate, &policy);
                assert!((e - a).abs() < 1e-9, "{strategy} {predicate} {op}: {e} vs {a}");
            }
        }
    }
}

#[test]
fn strict_predicate_flags_every_non_identity_check_under_honest_play() {
    let p = exact_detection(AttackStrategy::None, DetectionPredicate::StrictU0, &OpPolicy::uniform(), budget()).unwrap();
    assert!((p - 0.75).abs() < 1e-9);
    let p = exact_detection(
        AttackStrategy::None,
        DetectionPredicate::StrictU0,
        &OpPolicy::only(EncodingOp::U0),
        budget(),
    )
    .unwrap();
    assert!(p.abs() < 1e-12);
}

#[test]
fn eve_never_touches_bobs_photons() {
    let cfg = SessionConfig::new(5, 2, "011011".parse::<Message>().unwrap());
    for strategy in AttackStrategy::ALL {
        for seed in 0..10 {
            let run = run_session(&cfg, strategy, &mut RandomStream::new(seed)).unwrap();
            let bob: Vec<QubitId> = run
                .transcript
                .groups
                .iter()
                .flat_map(|g| [g.bob_qubits.0, g.bob_qubits.1])
                .collect();
            for q in &bob {
                assert!(!run.eve.touched.contains(q), "{strategy} touched {q}");
            }
        }
    }
}

#[test]
fn sampling_brackets_enumeration() {
    use qsdc_core::analysis::{checking_config, monte_carlo};
    for predicate in DetectionPredicate::ALL {
        for strategy in AttackStrategy::ALL {
            let exact = exact_detection(strategy, predicate, &OpPolicy::uniform(), budget()).unwrap();
            let mc = monte_carlo(&checking_config(1, predicate, OpPolicy::uniform()), strategy, 10_000, 77).unwrap();
            assert!(mc.brackets(exact), "{strategy} {predicate}: exact {exact}, sampled {}", mc.p);
        }
    }
}
