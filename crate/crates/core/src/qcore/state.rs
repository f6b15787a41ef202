use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{BellKind, Chance, QcoreError, SingleQubitOp};

/// Default cap on the number of qubits a single [`StateVector`] may hold.
pub const DEFAULT_MAX_QUBITS: usize = 12;

/// Tolerance for normalization and algebraic identity checks.
pub const NORM_TOL: f64 = 1e-9;

/// Branches whose probability falls below this are pruned.
pub const PRUNE_EPS: f64 = 1e-12;

pub type Amplitude = Complex64;

/// Label of a photon. Ancillas and replacement photons receive fresh ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QubitId(pub u32);

impl fmt::Display for QubitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}", self.0)
    }
}

/// Normalized amplitude vector over an ordered list of labeled qubits.
///
/// Basis indices are most-significant-first: the first qubit in
/// [`StateVector::qubits`] is the highest bit of the index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubits: Vec<QubitId>,
    amps: Vec<Amplitude>,
}

/// One outcome of a Bell-basis measurement.
#[derive(Debug, Clone)]
pub struct Branch {
    pub prob: f64,
    pub kind: BellKind,
    /// Post-measurement state with the measured pair removed, renormalized.
    pub state: StateVector,
    pub record: Vec<(QubitId, QubitId, BellKind)>,
}

fn check_distinct(qubits: &[QubitId]) -> Result<(), QcoreError> {
    for (i, q) in qubits.iter().enumerate() {
        if qubits[..i].contains(q) {
            return Err(QcoreError::DuplicateQubit(*q));
        }
    }
    Ok(())
}

#[inline]
fn bit(index: usize, n: usize, pos: usize) -> usize {
    (index >> (n - 1 - pos)) & 1
}

impl StateVector {
    /// The zero-qubit state (a scalar 1).
    pub fn scalar() -> Self {
        StateVector {
            qubits: Vec::new(),
            amps: vec![Complex64::new(1.0, 0.0)],
        }
    }

    /// Computational basis state; `bits[i]` is the value of `qubits[i]`.
    pub fn basis(qubits: &[QubitId], bits: &[u8]) -> Result<Self, QcoreError> {
        check_distinct(qubits)?;
        if qubits.len() != bits.len() {
            return Err(QcoreError::LengthMismatch {
                expected: qubits.len(),
                got: bits.len(),
            });
        }
        if qubits.len() > DEFAULT_MAX_QUBITS {
            return Err(QcoreError::TooManyQubits {
                n: qubits.len(),
                max: DEFAULT_MAX_QUBITS,
            });
        }
        let index = bits.iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(b & 1));
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << qubits.len()];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            qubits: qubits.to_vec(),
            amps,
        })
    }

    pub fn from_amplitudes(qubits: Vec<QubitId>, amps: Vec<Amplitude>) -> Result<Self, QcoreError> {
        check_distinct(&qubits)?;
        if qubits.len() > DEFAULT_MAX_QUBITS {
            return Err(QcoreError::TooManyQubits {
                n: qubits.len(),
                max: DEFAULT_MAX_QUBITS,
            });
        }
        if amps.len() != 1 << qubits.len() {
            return Err(QcoreError::LengthMismatch {
                expected: 1 << qubits.len(),
                got: amps.len(),
            });
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(QcoreError::NotFinite);
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(QcoreError::NotNormalized(norm));
        }
        Ok(StateVector { qubits, amps })
    }

    pub fn qubits(&self) -> &[QubitId] {
        &self.qubits
    }

    pub fn amps(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }

    pub fn contains(&self, q: QubitId) -> bool {
        self.qubits.contains(&q)
    }

    fn position(&self, q: QubitId) -> Result<usize, QcoreError> {
        self.qubits
            .iter()
            .position(|&x| x == q)
            .ok_or(QcoreError::UnknownQubit(q))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Amplitude of the basis state where `qubits[i]` takes `bits[i]`.
    pub fn amplitude(&self, bits: &[u8]) -> Amplitude {
        let index = bits.iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(b & 1));
        self.amps[index]
    }

    /// Tensor product; qubit order is `self` followed by `other`.
    pub fn compose(&self, other: &StateVector) -> Result<StateVector, QcoreError> {
        self.compose_with_limit(other, DEFAULT_MAX_QUBITS)
    }

    pub fn compose_with_limit(&self, other: &StateVector, max_qubits: usize) -> Result<StateVector, QcoreError> {
        if let Some(q) = other.qubits.iter().find(|q| self.qubits.contains(q)) {
            return Err(QcoreError::DuplicateQubit(*q));
        }
        let n = self.len() + other.len();
        if n > max_qubits {
            return Err(QcoreError::TooManyQubits { n, max: max_qubits });
        }
        let mut qubits = self.qubits.clone();
        qubits.extend_from_slice(&other.qubits);
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(StateVector { qubits, amps })
    }

    pub fn apply_single(&self, q: QubitId, op: &SingleQubitOp) -> Result<StateVector, QcoreError> {
        let pos = self.position(q)?;
        let n = self.len();
        let mask = 1usize << (n - 1 - pos);
        let m = op.matrix();
        let mut amps = self.amps.clone();
        for i0 in 0..self.amps.len() {
            if i0 & mask != 0 {
                continue;
            }
            let i1 = i0 | mask;
            let (a0, a1) = (self.amps[i0], self.amps[i1]);
            amps[i0] = m[0][0] * a0 + m[0][1] * a1;
            amps[i1] = m[1][0] * a0 + m[1][1] * a1;
        }
        Ok(StateVector {
            qubits: self.qubits.clone(),
            amps,
        })
    }

    pub fn apply_cnot(&self, control: QubitId, target: QubitId) -> Result<StateVector, QcoreError> {
        if control == target {
            return Err(QcoreError::DuplicateQubit(control));
        }
        let n = self.len();
        let cmask = 1usize << (n - 1 - self.position(control)?);
        let tmask = 1usize << (n - 1 - self.position(target)?);
        let mut amps = self.amps.clone();
        for (i, amp) in self.amps.iter().enumerate() {
            if i & cmask != 0 {
                amps[i ^ tmask] = *amp;
            }
        }
        Ok(StateVector {
            qubits: self.qubits.clone(),
            amps,
        })
    }

    /// Projects `(a, b)` onto each Bell state, `a` as the first tensor factor.
    ///
    /// Returns one branch per kind with nonzero probability, in
    /// [`BellKind::ALL`] order. The measured pair is removed from each
    /// collapsed state.
    pub fn bell_branches(&self, a: QubitId, b: QubitId) -> Result<Vec<Branch>, QcoreError> {
        if a == b {
            return Err(QcoreError::DuplicateQubit(a));
        }
        let pa = self.position(a)?;
        let pb = self.position(b)?;
        let n = self.len();
        let rest: Vec<QubitId> = self
            .qubits
            .iter()
            .copied()
            .filter(|&q| q != a && q != b)
            .collect();
        let rest_pos: Vec<usize> = (0..n).filter(|&p| p != pa && p != pb).collect();
        let dim = 1usize << rest.len();

        let mut projected = vec![vec![Complex64::new(0.0, 0.0); dim]; 4];
        for (i, amp) in self.amps.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let pair = 2 * bit(i, n, pa) + bit(i, n, pb);
            let j = rest_pos.iter().fold(0usize, |acc, &p| (acc << 1) | bit(i, n, p));
            for (k, kind) in BellKind::ALL.iter().enumerate() {
                let c = kind.vector()[pair];
                if c != 0.0 {
                    projected[k][j] += amp * c;
                }
            }
        }

        let mut out = Vec::new();
        for (k, kind) in BellKind::ALL.iter().enumerate() {
            let prob: f64 = projected[k].iter().map(|x| x.norm_sqr()).sum();
            if prob <= PRUNE_EPS {
                continue;
            }
            let scale = 1.0 / prob.sqrt();
            let amps = projected[k].iter().map(|x| x * scale).collect();
            out.push(Branch {
                prob,
                kind: *kind,
                state: StateVector {
                    qubits: rest.clone(),
                    amps,
                },
                record: vec![(a, b, *kind)],
            });
        }
        Ok(out)
    }

    /// Draws one Bell-measurement branch of `(a, b)` using `chance`.
    pub fn sample_bell(&self, a: QubitId, b: QubitId, chance: &mut dyn Chance) -> Result<(BellKind, StateVector), QcoreError> {
        let branches = self.bell_branches(a, b)?;
        let weights: Vec<f64> = branches.iter().map(|br| br.prob).collect();
        let chosen = branches
            .into_iter()
            .nth(chance.pick(&weights))
            .expect("pick returns an index into the branch list");
        Ok((chosen.kind, chosen.state))
    }

    /// Same state with qubits permuted into `order`.
    pub fn reorder(&self, order: &[QubitId]) -> Result<StateVector, QcoreError> {
        if order.len() != self.len() {
            return Err(QcoreError::QubitSetMismatch);
        }
        check_distinct(order)?;
        let src_pos = order
            .iter()
            .map(|&q| self.position(q).map_err(|_| QcoreError::QubitSetMismatch))
            .collect::<Result<Vec<_>, _>>()?;
        let n = self.len();
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (i, amp) in self.amps.iter().enumerate() {
            let j = src_pos.iter().fold(0usize, |acc, &p| (acc << 1) | bit(i, n, p));
            amps[j] = *amp;
        }
        Ok(StateVector {
            qubits: order.to_vec(),
            amps,
        })
    }

    /// Inner product `<self|other>` after aligning `other` to this qubit order.
    pub fn overlap(&self, other: &StateVector) -> Result<Amplitude, QcoreError> {
        let aligned = other.reorder(&self.qubits)?;
        Ok(self
            .amps
            .iter()
            .zip(&aligned.amps)
            .map(|(x, y)| x.conj() * y)
            .sum())
    }

    pub fn equal_up_to_phase(&self, other: &StateVector, tol: f64) -> Result<bool, QcoreError> {
        Ok(self.overlap(other)?.norm() >= 1.0 - tol)
    }
}

/// Two-qubit Bell state on `(a, b)` with `a` as the first tensor factor.
pub fn make_bell(kind: BellKind, a: QubitId, b: QubitId) -> Result<StateVector, QcoreError> {
    if a == b {
        return Err(QcoreError::DuplicateQubit(a));
    }
    Ok(StateVector {
        qubits: vec![a, b],
        amps: kind.vector().iter().map(|&c| Complex64::new(c, 0.0)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn q(i: u32) -> QubitId {
        QubitId(i)
    }

    fn close(a: Amplitude, re: f64) -> bool {
        (a.re - re).abs() < 1e-12 && a.im.abs() < 1e-12
    }

    #[test]
    fn bell_amplitudes() {
        let psi = make_bell(BellKind::PsiPlus, q(1), q(2)).unwrap();
        assert!(close(psi.amplitude(&[0, 1]), FRAC_1_SQRT_2));
        assert!(close(psi.amplitude(&[1, 0]), FRAC_1_SQRT_2));
        assert!(close(psi.amplitude(&[0, 0]), 0.0));
        let phi = make_bell(BellKind::PhiMinus, q(3), q(4)).unwrap();
        assert!(close(phi.amplitude(&[0, 0]), FRAC_1_SQRT_2));
        assert!(close(phi.amplitude(&[1, 1]), -FRAC_1_SQRT_2));
        for k in BellKind::ALL {
            let s = make_bell(k, q(5), q(6)).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn make_bell_rejects_duplicate() {
        assert_eq!(
            make_bell(BellKind::PhiPlus, q(1), q(1)).unwrap_err(),
            QcoreError::DuplicateQubit(q(1))
        );
    }

    #[test]
    fn compose_pattern_and_overlap() {
        let s = make_bell(BellKind::PsiPlus, q(1), q(2))
            .unwrap()
            .compose(&make_bell(BellKind::PsiPlus, q(3), q(4)).unwrap())
            .unwrap();
        assert_eq!(s.qubits(), &[q(1), q(2), q(3), q(4)]);
        for bits in [[0, 1, 0, 1], [0, 1, 1, 0], [1, 0, 0, 1], [1, 0, 1, 0]] {
            assert!(close(s.amplitude(&bits), 0.5));
        }
        let target = make_bell(BellKind::PhiPlus, q(1), q(3))
            .unwrap()
            .compose(&make_bell(BellKind::PhiPlus, q(2), q(4)).unwrap())
            .unwrap();
        assert!(close(target.overlap(&s).unwrap(), 0.5));
    }

    #[test]
    fn compose_rejects_overlap_and_limit() {
        let a = make_bell(BellKind::PsiPlus, q(1), q(2)).unwrap();
        let b = make_bell(BellKind::PsiPlus, q(2), q(3)).unwrap();
        assert_eq!(a.compose(&b).unwrap_err(), QcoreError::DuplicateQubit(q(2)));
        let c = make_bell(BellKind::PsiPlus, q(7), q(8)).unwrap();
        assert!(matches!(
            a.compose_with_limit(&c, 3),
            Err(QcoreError::TooManyQubits { n: 4, max: 3 })
        ));
    }

    #[test]
    fn eight_qubit_product_is_normalized() {
        let mut s = StateVector::scalar();
        for p in 0..4 {
            s = s
                .compose(&make_bell(BellKind::ALL[p], q(2 * p as u32 + 1), q(2 * p as u32 + 2)).unwrap())
                .unwrap();
        }
        assert_eq!(s.len(), 8);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cnot_basis_action_and_involution() {
        let s = StateVector::basis(&[q(1), q(2)], &[1, 0]).unwrap();
        let t = s.apply_cnot(q(1), q(2)).unwrap();
        assert!(close(t.amplitude(&[1, 1]), 1.0));
        assert_eq!(t.apply_cnot(q(1), q(2)).unwrap(), s);
        assert!(s.apply_cnot(q(1), q(1)).is_err());
        assert!(s.apply_cnot(q(1), q(9)).is_err());
    }

    #[test]
    fn cnot_onto_ancilla() {
        let s = make_bell(BellKind::PsiPlus, q(1), q(2))
            .unwrap()
            .compose(&StateVector::basis(&[q(20)], &[0]).unwrap())
            .unwrap()
            .apply_cnot(q(2), q(20))
            .unwrap();
        assert!(close(s.amplitude(&[0, 1, 1]), FRAC_1_SQRT_2));
        assert!(close(s.amplitude(&[1, 0, 0]), FRAC_1_SQRT_2));
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn branches_of_eigenstate() {
        let s = make_bell(BellKind::PhiPlus, q(2), q(4)).unwrap();
        let b = s.bell_branches(q(2), q(4)).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].kind, BellKind::PhiPlus);
        assert!((b[0].prob - 1.0).abs() < 1e-12);
        assert!(b[0].state.is_empty());
    }

    #[test]
    fn branches_errors() {
        let s = make_bell(BellKind::PhiPlus, q(2), q(4)).unwrap();
        assert_eq!(s.bell_branches(q(2), q(5)).unwrap_err(), QcoreError::UnknownQubit(q(5)));
        assert_eq!(s.bell_branches(q(2), q(2)).unwrap_err(), QcoreError::DuplicateQubit(q(2)));
    }

    #[test]
    fn reorder_round_trip() {
        let s = make_bell(BellKind::PsiMinus, q(1), q(2))
            .unwrap()
            .compose(&make_bell(BellKind::PhiMinus, q(3), q(4)).unwrap())
            .unwrap();
        let r = s.reorder(&[q(4), q(2), q(1), q(3)]).unwrap();
        assert_eq!(r.reorder(s.qubits()).unwrap(), s);
        assert!(close(r.overlap(&s).unwrap(), 1.0));
        assert_eq!(s.reorder(&[q(1), q(2), q(3), q(9)]).unwrap_err(), QcoreError::QubitSetMismatch);
    }

    #[test]
    fn phase_equality() {
        let m = make_bell(BellKind::PsiMinus, q(1), q(2)).unwrap();
        let neg = StateVector::from_amplitudes(m.qubits().to_vec(), m.amps().iter().map(|a| -a).collect()).unwrap();
        assert!(m.equal_up_to_phase(&neg, 1e-9).unwrap());
        let p = make_bell(BellKind::PsiPlus, q(1), q(2)).unwrap();
        assert!(!m.equal_up_to_phase(&p, 1e-9).unwrap());
        let other = make_bell(BellKind::PsiPlus, q(1), q(3)).unwrap();
        assert!(m.equal_up_to_phase(&other, 1e-9).is_err());
    }

    #[test]
    fn from_amplitudes_validation() {
        let z = Complex64::new(0.0, 0.0);
        assert!(matches!(
            StateVector::from_amplitudes(vec![q(1)], vec![z, z]),
            Err(QcoreError::NotNormalized(_))
        ));
        assert!(matches!(
            StateVector::from_amplitudes(vec![q(1)], vec![z]),
            Err(QcoreError::LengthMismatch { .. })
        ));
    }
}
