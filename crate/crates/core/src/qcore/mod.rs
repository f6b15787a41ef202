//! Small multi-qubit state-vector engine.
//!
//! Just enough machinery for photon-pair protocols: labeled qubits, local
//! 2x2 unitaries, CNOT, and projective Bell-basis measurement with exact
//! branch enumeration or seeded sampling.

mod chance;
mod register;
mod state;

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use chance::{Chance, RandomStream};
pub use register::Register;
pub use state::{make_bell, Amplitude, Branch, QubitId, StateVector, DEFAULT_MAX_QUBITS, NORM_TOL, PRUNE_EPS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QcoreError {
    #[error("qubit {0} appears more than once")]
    DuplicateQubit(QubitId),
    #[error("qubit {0} is not in the register")]
    UnknownQubit(QubitId),
    #[error("{n} qubits exceeds the register limit of {max}")]
    TooManyQubits { n: usize, max: usize },
    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("amplitude is not finite")]
    NotFinite,
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("states are defined over different qubit sets")]
    QubitSetMismatch,
}

/// The four Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PhiPlus,
        BellKind::PhiMinus,
        BellKind::PsiPlus,
        BellKind::PsiMinus,
    ];

    /// Amplitudes over `|00>, |01>, |10>, |11>`.
    pub fn vector(self) -> [f64; 4] {
        let s = FRAC_1_SQRT_2;
        match self {
            BellKind::PhiPlus => [s, 0.0, 0.0, s],
            BellKind::PhiMinus => [s, 0.0, 0.0, -s],
            BellKind::PsiPlus => [0.0, s, s, 0.0],
            BellKind::PsiMinus => [0.0, s, -s, 0.0],
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BellKind::PhiPlus => "Phi+",
            BellKind::PhiMinus => "Phi-",
            BellKind::PsiPlus => "Psi+",
            BellKind::PsiMinus => "Psi-",
        }
    }
}

impl fmt::Display for BellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for BellKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BellKind::ALL
            .into_iter()
            .find(|k| k.symbol().eq_ignore_ascii_case(s) || format!("{k:?}").eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown Bell state `{s}`"))
    }
}

/// A 2x2 complex matrix acting on one qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitOp([[Complex64; 2]; 2]);

impl SingleQubitOp {
    pub fn new(m: [[Complex64; 2]; 2]) -> Self {
        SingleQubitOp(m)
    }

    pub fn real(m: [[f64; 2]; 2]) -> Self {
        let c = |x: f64| Complex64::new(x, 0.0);
        SingleQubitOp([[c(m[0][0]), c(m[0][1])], [c(m[1][0]), c(m[1][1])]])
    }

    pub fn matrix(&self) -> &[[Complex64; 2]; 2] {
        &self.0
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let m = &self.0;
        for i in 0..2 {
            for j in 0..2 {
                let dot: Complex64 = (0..2).map(|k| m[k][i].conj() * m[k][j]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                if (dot - Complex64::new(expect, 0.0)).norm() > tol {
                    return false;
                }
            }
        }
        true
    }
}
