//! Detection probabilities computed from the swapping tables alone.
//!
//! This route never simulates a session. Each strategy's effect on one
//! group is written down as a (mixture of) superpositions of Bell-pair
//! products between Bob's and Alice's photons, and outcome statistics come
//! straight from [`swap_decompose`] coefficients. It exists to cross-check
//! the enumeration route in [`super::exact`].

use std::f64::consts::FRAC_1_SQRT_2;

use crate::adversary::AttackStrategy;
use crate::bellmap::{apply_encoding, encode_signed, swap_decompose, EncodingOp};
use crate::protocol::{DetectionPredicate, OpPolicy};
use crate::qcore::BellKind;

type Joint = [[f64; 4]; 4];

/// One term `amp * |first>_{b1 a1} |second>_{b2 a2}`.
#[derive(Debug, Clone, Copy)]
struct Term {
    amp: f64,
    first: BellKind,
    second: BellKind,
}

/// Applies `op` to photon `a2` of every term.
fn act_on_second(terms: &[Term], op: EncodingOp) -> Vec<Term> {
    terms
        .iter()
        .map(|t| {
            let act = encode_signed(op, t.second);
            Term {
                amp: t.amp * act.sign,
                first: t.first,
                second: act.kind,
            }
        })
        .collect()
}

/// Joint law of (Bob's outcome on `(b1,b2)`, Alice's outcome on `(a1,a2)`).
fn joint_of(terms: &[Term]) -> Joint {
    let tables: Vec<_> = terms.iter().map(|t| (t.amp, swap_decompose(t.first, t.second))).collect();
    let mut joint = [[0.0; 4]; 4];
    for bob in BellKind::ALL {
        for alice in BellKind::ALL {
            let amp: f64 = tables.iter().map(|(c, tab)| c * tab.coeff(bob, alice)).sum();
            joint[bob.index()][alice.index()] = amp * amp;
        }
    }
    joint
}

fn fail_prob(joint: &Joint, predicate: DetectionPredicate, op: EncodingOp) -> f64 {
    let mut p = 0.0;
    for bob in BellKind::ALL {
        for alice in BellKind::ALL {
            if !predicate.passes(op, bob, alice) {
                p += joint[bob.index()][alice.index()];
            }
        }
    }
    p
}

fn pure(first: BellKind, second: BellKind) -> Vec<Term> {
    vec![Term { amp: 1.0, first, second }]
}

/// Probability squared of `|k13>|k24>` in `|Psi+>|Psi+>`.
fn psi_swap_prob(x: BellKind, y: BellKind) -> f64 {
    swap_decompose(BellKind::PsiPlus, BellKind::PsiPlus).coeff(x, y).powi(2)
}

/// `CNOT(travel -> ancilla) |Psi+>|0> = (|Psi+>|+> - |Psi->|->) / sqrt 2`.
const ANCILLA_BRANCHES: [(f64, BellKind); 2] = [(FRAC_1_SQRT_2, BellKind::PsiPlus), (-FRAC_1_SQRT_2, BellKind::PsiMinus)];

/// `<bell| (s ⊗ t)` for ancilla X-basis states `s, t` (index 0 = |+>, 1 = |->).
fn bell_overlap_xx(bell: BellKind, s: usize, t: usize) -> f64 {
    let x = |i: usize| -> [f64; 2] {
        if i == 0 {
            [FRAC_1_SQRT_2, FRAC_1_SQRT_2]
        } else {
            [FRAC_1_SQRT_2, -FRAC_1_SQRT_2]
        }
    };
    let (a, b) = (x(s), x(t));
    let v = bell.vector();
    v[0] * a[0] * b[0] + v[1] * a[0] * b[1] + v[2] * a[1] * b[0] + v[3] * a[1] * b[1]
}

/// Per-group detection probability for one announced operation.
fn fail_given_op(strategy: AttackStrategy, predicate: DetectionPredicate, op: EncodingOp) -> f64 {
    use BellKind::*;
    match strategy {
        AttackStrategy::None => fail_prob(&joint_of(&act_on_second(&pure(PsiPlus, PsiPlus), op)), predicate, op),

        // Bob is left holding Eve's outcome x; Alice holds a fresh pair y.
        AttackStrategy::InterceptMeasureResend => {
            let mut p = 0.0;
            for x in BellKind::ALL {
                for y in BellKind::ALL {
                    if !predicate.passes(op, x, apply_encoding(op, y)) {
                        p += psi_swap_prob(x, y);
                    }
                }
            }
            p
        }

        // Bob's outcome and Alice's outcome come from unrelated pairs.
        AttackStrategy::InterceptReplaceMeasureAfter => {
            let alice = joint_of(&act_on_second(&pure(PsiPlus, PsiPlus), op));
            let mut p = 0.0;
            for bob in BellKind::ALL {
                let pb: f64 = BellKind::ALL.iter().map(|&y| psi_swap_prob(bob, y)).sum();
                for a in BellKind::ALL {
                    let pa: f64 = BellKind::ALL.iter().map(|&z| alice[z.index()][a.index()]).sum();
                    if !predicate.passes(op, bob, a) {
                        p += pb * pa;
                    }
                }
            }
            p
        }

        // Eve's swap on (1',2) leaves (1,2') in her outcome's kind (Psi+ is
        // exchange symmetric, so (1',2') reads as (2',1')); likewise (3,4').
        AttackStrategy::InterceptReplaceMeasureBefore => {
            let mut p = 0.0;
            for x1 in BellKind::ALL {
                for y1 in BellKind::ALL {
                    let w1 = psi_swap_prob(x1, y1);
                    if w1 == 0.0 {
                        continue;
                    }
                    for x2 in BellKind::ALL {
                        for y2 in BellKind::ALL {
                            let w2 = psi_swap_prob(x2, y2);
                            if w2 == 0.0 {
                                continue;
                            }
                            p += w1 * w2 * fail_prob(&joint_of(&act_on_second(&pure(x1, x2), op)), predicate, op);
                        }
                    }
                }
            }
            p
        }

        // Unmeasured ancillas: incoherent mixture over their X-basis states.
        AttackStrategy::AncillaPassive => {
            let mut p = 0.0;
            for (c1, k1) in ANCILLA_BRANCHES {
                for (c2, k2) in ANCILLA_BRANCHES {
                    let w = (c1 * c2).powi(2);
                    p += w * fail_prob(&joint_of(&act_on_second(&pure(k1, k2), op)), predicate, op);
                }
            }
            p
        }

        // Bell-measured ancillas: coherent conditional states, u1 fix-up on
        // a minus outcome.
        AttackStrategy::AncillaCorrective => {
            let mut p = 0.0;
            for eve in BellKind::ALL {
                let mut terms = Vec::new();
                for (s, (c1, k1)) in ANCILLA_BRANCHES.iter().enumerate() {
                    for (t, (c2, k2)) in ANCILLA_BRANCHES.iter().enumerate() {
                        let amp = c1 * c2 * bell_overlap_xx(eve, s, t);
                        if amp != 0.0 {
                            terms.push(Term {
                                amp,
                                first: *k1,
                                second: *k2,
                            });
                        }
                    }
                }
                let weight: f64 = terms.iter().map(|t| t.amp * t.amp).sum();
                if weight <= 1e-15 {
                    continue;
                }
                for t in terms.iter_mut() {
                    t.amp /= weight.sqrt();
                }
                if matches!(eve, PsiMinus | PhiMinus) {
                    terms = act_on_second(&terms, EncodingOp::U1);
                }
                p += weight * fail_prob(&joint_of(&act_on_second(&terms, op)), predicate, op);
            }
            p
        }
    }
}

/// Per-group detection probability, averaged over `policy`.
pub fn algebraic_detection(strategy: AttackStrategy, predicate: DetectionPredicate, policy: &OpPolicy) -> f64 {
    EncodingOp::ALL
        .into_iter()
        .filter(|&op| policy.weight(op) > 0.0)
        .map(|op| policy.weight(op) * fail_given_op(strategy, predicate, op))
        .sum()
}
