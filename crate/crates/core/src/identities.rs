//! Reference expansions and the correlation table, transcribed by hand and
//! checked against the state-vector engine.
//!
//! Every check enumerates the full Bell-product basis on the stated pairs,
//! so a missing or spurious term is caught as well as a wrong coefficient.

use serde::{Deserialize, Serialize};

use crate::bellmap::{correlation_table, EncodingOp};
use crate::qcore::{make_bell, BellKind, QcoreError, QubitId, StateVector};

use BellKind::{PhiMinus as FM, PhiPlus as FP, PsiMinus as SM, PsiPlus as SP};

/// Agreement required between reference and engine values.
pub const IDENTITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub passed: bool,
    pub max_error: f64,
    pub detail: String,
}

impl IdentityCheck {
    fn new(name: &str, max_error: f64, detail: String) -> Self {
        IdentityCheck {
            name: name.to_string(),
            passed: max_error < IDENTITY_TOL,
            max_error,
            detail,
        }
    }
}

/// A state written as `sum coeff * prod_i |kinds[i]>_{pairs[i]}`.
#[derive(Debug, Clone)]
pub struct Expansion {
    pub name: &'static str,
    pub pairs: Vec<(u32, u32)>,
    pub terms: Vec<(f64, Vec<BellKind>)>,
}

impl Expansion {
    pub fn coeff(&self, kinds: &[BellKind]) -> f64 {
        self.terms
            .iter()
            .filter(|(_, k)| k.as_slice() == kinds)
            .map(|(c, _)| c)
            .sum()
    }
}

const HALF: f64 = 0.5;
const QUARTER: f64 = 0.25;
const SQRT2_4: f64 = std::f64::consts::SQRT_2 / 4.0;

fn swap_pairs() -> Vec<(u32, u32)> {
    vec![(1, 3), (2, 4)]
}

/// `|Psi+>_12 |k>_34` in the `(1,3)(2,4)` basis, for `k` = Psi+, Psi-, Phi+, Phi-.
pub fn swap_expansions() -> Vec<(BellKind, Expansion)> {
    let e = |name, terms: [(f64, BellKind, BellKind); 4]| Expansion {
        name,
        pairs: swap_pairs(),
        terms: terms.iter().map(|&(c, a, b)| (c, vec![a, b])).collect(),
    };
    vec![
        (SP, e("swap psi+ psi+", [(HALF, FP, FP), (-HALF, FM, FM), (HALF, SP, SP), (-HALF, SM, SM)])),
        (SM, e("swap psi+ psi-", [(HALF, SP, SM), (-HALF, SM, SP), (-HALF, FP, FM), (HALF, FM, FP)])),
        (FP, e("swap psi+ phi+", [(HALF, SP, FP), (-HALF, SM, FM), (HALF, FP, SP), (-HALF, FM, SM)])),
        (FM, e("swap psi+ phi-", [(HALF, SP, FM), (-HALF, SM, FP), (-HALF, FP, SM), (HALF, FM, SP)])),
    ]
}

/// Bob's and Alice's EPR pairs, `|Psi+>^{⊗4}` on `(1,2)(3,4)(1',2')(3',4')`,
/// in the `(1,3)(2,4)(1',3')(2',4')` basis. Primed photons are 5..8.
pub fn replacement_expansion() -> Expansion {
    let rows: [(f64, BellKind, BellKind); 16] = [
        (QUARTER, SP, SP),
        (QUARTER, SM, SM),
        (QUARTER, FP, FP),
        (QUARTER, FM, FM),
        (-QUARTER, SP, SM),
        (QUARTER, SP, FP),
        (-QUARTER, SP, FM),
        (-QUARTER, SM, SP),
        (-QUARTER, SM, FP),
        (QUARTER, SM, FM),
        (QUARTER, FP, SP),
        (-QUARTER, FP, SM),
        (-QUARTER, FP, FM),
        (-QUARTER, FM, SP),
        (QUARTER, FM, SM),
        (-QUARTER, FM, FP),
    ];
    Expansion {
        name: "replacement pairs expansion",
        pairs: vec![(1, 3), (2, 4), (5, 7), (6, 8)],
        terms: rows.iter().map(|&(c, k, kp)| (c, vec![k, k, kp, kp])).collect(),
    }
}

/// Two travel photons each CNOT-copied onto an ancilla (2' = 5, 4' = 6),
/// in the `(1,3)(2,4)(2',4')` basis.
pub fn ancilla_expansion() -> Expansion {
    let rows: [(f64, BellKind, BellKind, BellKind); 8] = [
        (SQRT2_4, SP, SP, SP),
        (-SQRT2_4, SM, SM, SP),
        (SQRT2_4, FP, FP, FP),
        (-SQRT2_4, FM, FM, FP),
        (SQRT2_4, SP, SM, SM),
        (-SQRT2_4, SM, SP, SM),
        (SQRT2_4, FP, FM, FM),
        (-SQRT2_4, FM, FP, FM),
    ];
    Expansion {
        name: "ancilla expansion",
        pairs: vec![(1, 3), (2, 4), (5, 6)],
        terms: rows.iter().map(|&(c, a, b, e)| (c, vec![a, b, e])).collect(),
    }
}

/// The published correlation table: `(Bob on 1,3; Alice on 2,4)` per operation.
pub fn reference_table() -> [(EncodingOp, [(BellKind, BellKind); 4]); 4] {
    [
        (EncodingOp::U0, [(FP, FP), (SM, SM), (SP, SP), (FM, FM)]),
        (EncodingOp::U1, [(SM, SP), (FP, FM), (FM, FP), (SP, SM)]),
        (EncodingOp::U2, [(SP, FP), (SM, FM), (FP, SP), (FM, SM)]),
        (EncodingOp::U3, [(SP, FM), (SM, FP), (FP, SM), (FM, SP)]),
    ]
}

/// `u_i |Psi+>` up to global phase.
pub const CODING_ORBIT: [(EncodingOp, BellKind); 4] =
    [(EncodingOp::U0, SP), (EncodingOp::U1, SM), (EncodingOp::U2, FP), (EncodingOp::U3, FM)];

fn q(i: u32) -> QubitId {
    QubitId(i)
}

fn bell_product(pairs: &[(u32, u32)], kinds: &[BellKind]) -> Result<StateVector, QcoreError> {
    let mut s = StateVector::scalar();
    for (&(a, b), &k) in pairs.iter().zip(kinds) {
        s = s.compose(&make_bell(k, q(a), q(b))?)?;
    }
    Ok(s)
}

fn all_kind_tuples(n: usize) -> Vec<Vec<BellKind>> {
    (0..4usize.pow(n as u32))
        .map(|mut code| {
            (0..n)
                .map(|_| {
                    let k = BellKind::ALL[code % 4];
                    code /= 4;
                    k
                })
                .collect()
        })
        .collect()
}

/// Largest deviation between `exp` and the engine's overlaps with `state`,
/// over the whole product basis. Also fails on a complex overlap.
pub fn expansion_error(exp: &Expansion, state: &StateVector) -> Result<f64, QcoreError> {
    let mut worst: f64 = 0.0;
    for kinds in all_kind_tuples(exp.pairs.len()) {
        let ov = bell_product(&exp.pairs, &kinds)?.overlap(state)?;
        worst = worst.max((ov.re - exp.coeff(&kinds)).abs()).max(ov.im.abs());
    }
    Ok(worst)
}

fn swap_checks() -> Result<Vec<IdentityCheck>, QcoreError> {
    let mut out = Vec::new();
    for (k34, exp) in swap_expansions() {
        let state = bell_product(&[(1, 2), (3, 4)], &[SP, k34])?;
        let err = expansion_error(&exp, &state)?;
        out.push(IdentityCheck::new(exp.name, err, format!("{} terms over 16 basis products", exp.terms.len())));
    }
    Ok(out)
}

fn probability_check() -> Result<IdentityCheck, QcoreError> {
    let state = bell_product(&[(1, 2), (3, 4)], &[SP, SP])?;
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for b in state.bell_branches(q(1), q(3))? {
        worst = worst.max((b.prob - 0.25).abs());
        detail.push(format!("{}={:.6}", b.kind, b.prob));
    }
    Ok(IdentityCheck::new("swap outcome probabilities", worst, detail.join(" ")))
}

fn orbit_check() -> Result<IdentityCheck, QcoreError> {
    let base = make_bell(SP, q(3), q(4))?;
    let mut worst: f64 = 0.0;
    for (op, kind) in CODING_ORBIT {
        let got = base.apply_single(q(4), &op.operator())?;
        let want = make_bell(kind, q(3), q(4))?;
        worst = worst.max(1.0 - want.overlap(&got)?.norm());
    }
    Ok(IdentityCheck::new("coding orbit", worst, "u0..u3 on photon 4 of Psi+".into()))
}

fn table_checks() -> Vec<IdentityCheck> {
    let table = correlation_table();
    let mut mismatches = Vec::new();
    for (op, column) in reference_table() {
        let mut want: Vec<_> = column.to_vec();
        let mut got: Vec<_> = table.column(op).to_vec();
        want.sort();
        got.sort();
        if want != got {
            mismatches.push(format!("{op}: expected {want:?}, derived {got:?}"));
        }
    }
    let table_err = if mismatches.is_empty() { 0.0 } else { 1.0 };
    let cover = table.is_disjoint_cover();
    vec![
        IdentityCheck::new(
            "correlation table",
            table_err,
            if mismatches.is_empty() {
                "16 of 16 pairs match".into()
            } else {
                mismatches.join("; ")
            },
        ),
        IdentityCheck::new(
            "decode totality",
            if cover { 0.0 } else { 1.0 },
            "columns are disjoint and cover all 16 outcome pairs".into(),
        ),
    ]
}

fn replacement_check() -> Result<IdentityCheck, QcoreError> {
    let exp = replacement_expansion();
    let state = bell_product(&[(1, 2), (3, 4), (5, 6), (7, 8)], &[SP; 4])?;
    let err = expansion_error(&exp, &state)?;
    Ok(IdentityCheck::new(exp.name, err, "16 terms of ±1/4 over 256 basis products".into()))
}

fn ancilla_check() -> Result<IdentityCheck, QcoreError> {
    let exp = ancilla_expansion();
    let state = bell_product(&[(1, 2), (3, 4)], &[SP, SP])?
        .compose(&StateVector::basis(&[q(5), q(6)], &[0, 0])?)?
        .apply_cnot(q(2), q(5))?
        .apply_cnot(q(4), q(6))?;
    let err = expansion_error(&exp, &state)?;
    Ok(IdentityCheck::new(exp.name, err, "8 terms of ±√2/4 over 64 basis products".into()))
}

/// Runs every reference check. A check that cannot even be evaluated is
/// reported as failed.
pub fn check_all() -> Vec<IdentityCheck> {
    let mut out = Vec::new();
    let mut push = |name: &str, r: Result<Vec<IdentityCheck>, QcoreError>| match r {
        Ok(v) => out.extend(v),
        Err(e) => out.push(IdentityCheck {
            name: name.to_string(),
            passed: false,
            max_error: f64::INFINITY,
            detail: e.to_string(),
        }),
    };
    push("swap expansions", swap_checks());
    push("swap outcome probabilities", probability_check().map(|c| vec![c]));
    push("coding orbit", orbit_check().map(|c| vec![c]));
    push("correlation table", Ok(table_checks()));
    push("replacement pairs expansion", replacement_check().map(|c| vec![c]));
    push("ancilla expansion", ancilla_check().map(|c| vec![c]));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_identities_hold() {
        let checks = check_all();
        assert_eq!(checks.len(), 10);
        for c in &checks {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn perturbed_reference_fails() {
        let (_, mut exp) = swap_expansions().remove(1);
        exp.terms[0].0 = -exp.terms[0].0;
        let state = bell_product(&[(1, 2), (3, 4)], &[SP, SM]).unwrap();
        assert!((expansion_error(&exp, &state).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn missing_term_fails() {
        let mut exp = ancilla_expansion();
        exp.terms.pop();
        let state = bell_product(&[(1, 2), (3, 4)], &[SP, SP])
            .unwrap()
            .compose(&StateVector::basis(&[q(5), q(6)], &[0, 0]).unwrap())
            .unwrap()
            .apply_cnot(q(2), q(5))
            .unwrap()
            .apply_cnot(q(4), q(6))
            .unwrap();
        assert!(expansion_error(&exp, &state).unwrap() > 0.3);
    }

    #[test]
    fn reference_table_is_a_partition() {
        let mut all: Vec<_> = reference_table().iter().flat_map(|(_, c)| c.to_vec()).collect();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 16);
    }
}
