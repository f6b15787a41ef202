//! The two-party session: Bob prepares and distributes EPR pairs, Alice
//! checks the channel on a random subset of photon groups, then codes her
//! message onto the rest with local unitaries. Bob decodes from the public
//! announcements and his own Bell measurements.

mod message;
mod phases;
mod session;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adversary::AttackError;
use crate::bellmap::{is_correlated, EncodingOp};
use crate::qcore::{BellKind, QcoreError, QubitId};

pub use message::Message;
pub use phases::{
    alice_checking, alice_encoding, alice_receive, bob_checking, bob_measure_encoding, decode_message, partition_groups,
    prepare_session, run_checking, run_encoding, CheckingResult, PhotonIds, Prepared,
};
pub use session::{run_session, run_session_with, Channel, Session, SessionRun};

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("message has {got} bits but the encoding groups carry {expected}")]
    CapacityMismatch { expected: usize, got: usize },
    #[error("session needs at least one group")]
    NoGroups,
    #[error("{n_checking} checking groups requested out of {n_groups}")]
    CheckingOutOfRange { n_checking: usize, n_groups: usize },
    #[error("invalid operator policy: {0}")]
    InvalidPolicy(String),
    #[error("expected {expected} travel photons, received {got}")]
    LostPhotons { expected: usize, got: usize },
    #[error("no record for group {0}")]
    MissingGroup(usize),
    #[error("{announcements} announcements but {outcomes} outcomes")]
    LengthMismatch { announcements: usize, outcomes: usize },
    #[error("session was aborted; the encoding phase cannot run")]
    Aborted,
    #[error("phase `{attempted}` called while session is in phase `{current}`")]
    OutOfOrder { attempted: &'static str, current: &'static str },
    #[error(transparent)]
    Qcore(#[from] QcoreError),
    #[error(transparent)]
    Attack(#[from] AttackError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    Checking,
    EncodingDecoding,
}

/// One group: two consecutive EPR pairs, split between Bob and Alice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    /// 1-based position in the travel string.
    pub index: usize,
    pub bob_qubits: (QubitId, QubitId),
    pub alice_qubits: (QubitId, QubitId),
    pub role: Role,
}

/// Which of Alice's two photons receives the coding unitary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum EncodeTarget {
    FirstTravelPhoton,
    #[default]
    SecondTravelPhoton,
}

impl EncodeTarget {
    pub fn pick(self, pair: (QubitId, QubitId)) -> QubitId {
        match self {
            EncodeTarget::FirstTravelPhoton => pair.0,
            EncodeTarget::SecondTravelPhoton => pair.1,
        }
    }
}

/// Rule Bob applies to a checking group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetectionPredicate {
    /// Pass iff the outcome pair lies in the announced operation's column.
    #[default]
    AnnouncedOp,
    /// Pass iff the outcome pair lies in the u0 column, whatever was announced.
    StrictU0,
}

impl DetectionPredicate {
    pub const ALL: [DetectionPredicate; 2] = [DetectionPredicate::AnnouncedOp, DetectionPredicate::StrictU0];

    pub fn passes(self, announced: EncodingOp, bob: BellKind, alice: BellKind) -> bool {
        match self {
            DetectionPredicate::AnnouncedOp => is_correlated(announced, bob, alice),
            DetectionPredicate::StrictU0 => is_correlated(EncodingOp::U0, bob, alice),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DetectionPredicate::AnnouncedOp => "announced-op",
            DetectionPredicate::StrictU0 => "strict-u0",
        }
    }
}

impl fmt::Display for DetectionPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DetectionPredicate {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DetectionPredicate::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown predicate `{s}` (expected announced-op or strict-u0)"))
    }
}

/// Distribution Alice draws checking-group operations from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpPolicy {
    weights: [f64; 4],
}

impl Default for OpPolicy {
    fn default() -> Self {
        Self::uniform()
    }
}

impl OpPolicy {
    pub fn uniform() -> Self {
        OpPolicy { weights: [0.25; 4] }
    }

    pub fn only(op: EncodingOp) -> Self {
        let mut weights = [0.0; 4];
        weights[op.index()] = 1.0;
        OpPolicy { weights }
    }

    /// Weights are normalized; they must be finite, non-negative, and not all zero.
    pub fn new(weights: [f64; 4]) -> Result<Self, ProtocolError> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(ProtocolError::InvalidPolicy(format!("{weights:?}")));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(ProtocolError::InvalidPolicy("all weights are zero".into()));
        }
        Ok(OpPolicy {
            weights: weights.map(|w| w / total),
        })
    }

    pub fn weights(&self) -> &[f64; 4] {
        &self.weights
    }

    pub fn weight(&self, op: EncodingOp) -> f64 {
        self.weights[op.index()]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub n_groups: usize,
    /// Absolute number of checking groups.
    pub n_checking: usize,
    pub message: Message,
    pub checking_op_policy: OpPolicy,
    pub encode_target: EncodeTarget,
    pub predicate: DetectionPredicate,
    pub seed: u64,
}

impl SessionConfig {
    pub fn new(n_groups: usize, n_checking: usize, message: Message) -> Self {
        SessionConfig {
            n_groups,
            n_checking,
            message,
            checking_op_policy: OpPolicy::uniform(),
            encode_target: EncodeTarget::default(),
            predicate: DetectionPredicate::default(),
            seed: 0,
        }
    }

    pub fn n_encoding(&self) -> usize {
        self.n_groups.saturating_sub(self.n_checking)
    }

    pub fn validate(&self) -> Result<(), ProtocolError> {
        if self.n_groups == 0 {
            return Err(ProtocolError::NoGroups);
        }
        if self.n_checking > self.n_groups {
            return Err(ProtocolError::CheckingOutOfRange {
                n_checking: self.n_checking,
                n_groups: self.n_groups,
            });
        }
        let expected = 2 * self.n_encoding();
        if self.message.len() != expected {
            return Err(ProtocolError::CapacityMismatch {
                expected,
                got: self.message.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckingAnnouncement {
    pub group_index: usize,
    pub op: EncodingOp,
    pub alice_outcome: BellKind,
}

/// Public announcement for a coded group. Carries no operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingAnnouncement {
    pub group_index: usize,
    pub alice_outcome: BellKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckingRecord {
    pub group_index: usize,
    pub op: EncodingOp,
    pub alice_outcome: BellKind,
    pub bob_outcome: BellKind,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingRecord {
    pub group_index: usize,
    pub alice_outcome: BellKind,
    pub bob_outcome: BellKind,
}

impl EncodingRecord {
    pub fn announcement(&self) -> EncodingAnnouncement {
        EncodingAnnouncement {
            group_index: self.group_index,
            alice_outcome: self.alice_outcome,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Clean,
    EveDetected,
    /// The session stopped before a verdict could be reached.
    Aborted,
}

/// Observable history of one session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionTranscript {
    pub groups: Vec<Group>,
    pub checking: Vec<CheckingRecord>,
    /// Empty unless the verdict is `Clean`.
    pub encoding: Vec<EncodingRecord>,
    pub verdict: Verdict,
    pub decoded_bits: Message,
}

impl SessionTranscript {
    /// Decodes again from the recorded announcements and Bob's outcomes.
    pub fn redecode(&self) -> Result<Message, ProtocolError> {
        let announcements: Vec<EncodingAnnouncement> = self.encoding.iter().map(EncodingRecord::announcement).collect();
        let bob: Vec<(usize, BellKind)> = self.encoding.iter().map(|r| (r.group_index, r.bob_outcome)).collect();
        decode_message(&announcements, &bob)
    }
}
