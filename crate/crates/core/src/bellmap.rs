//! Entanglement-swapping algebra.
//!
//! Everything here is derived numerically from [`crate::qcore`]: the
//! decomposition of a Bell-pair product into the swapped pairing, the
//! action of the four coding unitaries on Bell states, and the
//! correlation table Bob uses to check and decode.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::qcore::{make_bell, BellKind, QubitId, SingleQubitOp, PRUNE_EPS};

/// Alice's local coding operation and its two-bit codeword.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EncodingOp {
    U0,
    U1,
    U2,
    U3,
}

impl EncodingOp {
    pub const ALL: [EncodingOp; 4] = [EncodingOp::U0, EncodingOp::U1, EncodingOp::U2, EncodingOp::U3];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Codeword, most significant bit first.
    pub fn bits(self) -> [bool; 2] {
        let i = self.index();
        [i & 2 != 0, i & 1 != 0]
    }

    pub fn from_bits(hi: bool, lo: bool) -> Self {
        EncodingOp::ALL[usize::from(hi) * 2 + usize::from(lo)]
    }

    pub fn codeword(self) -> &'static str {
        ["00", "01", "10", "11"][self.index()]
    }

    /// identity, diag(1,-1), [[0,1],[1,0]], [[0,-1],[1,0]]
    pub fn operator(self) -> SingleQubitOp {
        match self {
            EncodingOp::U0 => SingleQubitOp::real([[1.0, 0.0], [0.0, 1.0]]),
            EncodingOp::U1 => SingleQubitOp::real([[1.0, 0.0], [0.0, -1.0]]),
            EncodingOp::U2 => SingleQubitOp::real([[0.0, 1.0], [1.0, 0.0]]),
            EncodingOp::U3 => SingleQubitOp::real([[0.0, -1.0], [1.0, 0.0]]),
        }
    }
}

impl fmt::Display for EncodingOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u{}", self.index())
    }
}

impl FromStr for EncodingOp {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "u0" | "00" => Ok(EncodingOp::U0),
            "u1" | "01" => Ok(EncodingOp::U1),
            "u2" | "10" => Ok(EncodingOp::U2),
            "u3" | "11" => Ok(EncodingOp::U3),
            _ => Err(format!("unknown encoding operation `{s}`")),
        }
    }
}

/// Coefficients of `|k12>|k34>` in the `(1,3)(2,4)` Bell-product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapTable {
    pub k12: BellKind,
    pub k34: BellKind,
    coeffs: BTreeMap<(BellKind, BellKind), f64>,
}

impl SwapTable {
    /// Signed coefficient of `|k13>|k24>`; zero when absent.
    pub fn coeff(&self, k13: BellKind, k24: BellKind) -> f64 {
        self.coeffs.get(&(k13, k24)).copied().unwrap_or(0.0)
    }

    /// Nonzero `(k13, k24)` entries.
    pub fn entries(&self) -> impl Iterator<Item = ((BellKind, BellKind), f64)> + '_ {
        self.coeffs.iter().map(|(k, v)| (*k, *v))
    }

    pub fn support(&self) -> Vec<(BellKind, BellKind)> {
        self.coeffs.keys().copied().collect()
    }
}

/// Expands `|k12>|k34>` over the swapped pairing by direct overlap.
pub fn swap_decompose(k12: BellKind, k34: BellKind) -> SwapTable {
    let q = [QubitId(1), QubitId(2), QubitId(3), QubitId(4)];
    let initial = make_bell(k12, q[0], q[1])
        .and_then(|s| s.compose(&make_bell(k34, q[2], q[3])?))
        .expect("four distinct qubits");
    let mut coeffs = BTreeMap::new();
    for k13 in BellKind::ALL {
        for k24 in BellKind::ALL {
            let basis = make_bell(k13, q[0], q[2])
                .and_then(|s| s.compose(&make_bell(k24, q[1], q[3])?))
                .expect("four distinct qubits");
            let c = basis.overlap(&initial).expect("same qubit set");
            if c.norm_sqr() > PRUNE_EPS {
                coeffs.insert((k13, k24), c.re);
            }
        }
    }
    SwapTable { k12, k34, coeffs }
}

/// Result of applying a coding unitary to the second photon of a Bell pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncodingAction {
    pub kind: BellKind,
    /// Global sign picked up: `u|k> = sign * |kind>`.
    pub sign: f64,
}

fn action_table() -> &'static [[EncodingAction; 4]; 4] {
    static TABLE: OnceLock<[[EncodingAction; 4]; 4]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let (a, b) = (QubitId(1), QubitId(2));
        let mut table = [[EncodingAction {
            kind: BellKind::PhiPlus,
            sign: 1.0,
        }; 4]; 4];
        for op in EncodingOp::ALL {
            for k in BellKind::ALL {
                let out = make_bell(k, a, b)
                    .and_then(|s| s.apply_single(b, &op.operator()))
                    .expect("valid pair");
                let (kind, c) = BellKind::ALL
                    .into_iter()
                    .map(|cand| (cand, make_bell(cand, a, b).unwrap().overlap(&out).unwrap()))
                    .find(|(_, c)| c.norm() > 0.5)
                    .expect("coding unitaries permute the Bell basis");
                table[op.index()][k.index()] = EncodingAction {
                    kind,
                    sign: c.re.signum(),
                };
            }
        }
        table
    })
}

/// Bell kind obtained from `|k>` after `op` acts on one photon.
pub fn apply_encoding(op: EncodingOp, k: BellKind) -> BellKind {
    action_table()[op.index()][k.index()].kind
}

/// As [`apply_encoding`], keeping the sign when `op` acts on the second photon.
pub fn encode_signed(op: EncodingOp, k: BellKind) -> EncodingAction {
    action_table()[op.index()][k.index()]
}

/// For each coding operation, the four `(bob, alice)` outcome pairs that
/// can occur on an undisturbed group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrelationTable {
    columns: [Vec<(BellKind, BellKind)>; 4],
}

impl CorrelationTable {
    pub fn column(&self, op: EncodingOp) -> &[(BellKind, BellKind)] {
        &self.columns[op.index()]
    }

    pub fn contains(&self, op: EncodingOp, bob: BellKind, alice: BellKind) -> bool {
        self.columns[op.index()].contains(&(bob, alice))
    }

    /// Columns are pairwise disjoint and cover all sixteen pairs.
    pub fn is_disjoint_cover(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        for col in &self.columns {
            for pair in col {
                if !seen.insert(*pair) {
                    return false;
                }
            }
        }
        seen.len() == 16
    }

    /// `op,codeword,bob,alice` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("op,codeword,bob,alice\n");
        for op in EncodingOp::ALL {
            for (bob, alice) in self.column(op) {
                out.push_str(&format!("{op},{},{bob},{alice}\n", op.codeword()));
            }
        }
        out
    }
}

fn build_correlation_table() -> CorrelationTable {
    let columns = EncodingOp::ALL.map(|op| swap_decompose(BellKind::PsiPlus, apply_encoding(op, BellKind::PsiPlus)).support());
    CorrelationTable { columns }
}

/// The correlation table, derived once from the state-vector engine.
pub fn correlation_table() -> &'static CorrelationTable {
    static TABLE: OnceLock<CorrelationTable> = OnceLock::new();
    TABLE.get_or_init(build_correlation_table)
}

pub fn is_correlated(op: EncodingOp, bob: BellKind, alice: BellKind) -> bool {
    correlation_table().contains(op, bob, alice)
}

/// The unique operation whose column holds `(bob, alice)`.
pub fn decode_op(bob: BellKind, alice: BellKind) -> EncodingOp {
    EncodingOp::ALL
        .into_iter()
        .find(|&op| is_correlated(op, bob, alice))
        .expect("correlation columns cover every outcome pair")
}
