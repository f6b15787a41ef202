//! Eavesdropping strategies on the travel channel.
//!
//! Eve sees the travel string between Bob's preparation and Alice's
//! confirmation, plus every public announcement. All her quantum actions
//! go through an access list holding the travel photons and the photons
//! she creates herself; touching anything else is an error.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bellmap::{apply_encoding, decode_op, EncodingOp};
use crate::protocol::{Channel, CheckingAnnouncement, EncodingAnnouncement};
use crate::qcore::{make_bell, BellKind, Chance, QcoreError, QubitId, Register, StateVector};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AttackError {
    #[error("the attack was already applied to this session")]
    AlreadyApplied,
    #[error("travel string has odd length {0}")]
    OddTravelString(usize),
    #[error("eavesdropper has no access to qubit {0}")]
    Forbidden(QubitId),
    #[error(transparent)]
    Qcore(#[from] QcoreError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackStrategy {
    None,
    /// Bell-measure each travel pair, resend a fresh pair in the measured state.
    #[serde(rename = "measure-resend")]
    InterceptMeasureResend,
    /// Substitute own Psi+ halves; measure the kept halves after announcements.
    #[serde(rename = "replace-after")]
    InterceptReplaceMeasureAfter,
    /// Substitute own Psi+ halves; immediately Bell-measure each kept
    /// photon together with an intercepted one.
    #[serde(rename = "replace-before")]
    InterceptReplaceMeasureBefore,
    /// CNOT each travel photon onto a fresh |0> ancilla and keep the ancillas.
    AncillaPassive,
    /// As `AncillaPassive`, then Bell-measure the ancillas and undo the
    /// phase error on a minus outcome.
    AncillaCorrective,
}

impl AttackStrategy {
    pub const ALL: [AttackStrategy; 6] = [
        AttackStrategy::None,
        AttackStrategy::InterceptMeasureResend,
        AttackStrategy::InterceptReplaceMeasureAfter,
        AttackStrategy::InterceptReplaceMeasureBefore,
        AttackStrategy::AncillaPassive,
        AttackStrategy::AncillaCorrective,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AttackStrategy::None => "none",
            AttackStrategy::InterceptMeasureResend => "measure-resend",
            AttackStrategy::InterceptReplaceMeasureAfter => "replace-after",
            AttackStrategy::InterceptReplaceMeasureBefore => "replace-before",
            AttackStrategy::AncillaPassive => "ancilla-passive",
            AttackStrategy::AncillaCorrective => "ancilla-corrective",
        }
    }
}

impl fmt::Display for AttackStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AttackStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AttackStrategy::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = AttackStrategy::ALL.iter().map(|a| a.name()).collect();
                format!("unknown strategy `{s}` (expected one of {})", names.join(", "))
            })
    }
}

/// How a replace-before Eve pairs her kept photons with intercepted ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ReplacePairing {
    /// `(1', 2)` and `(3', 4)`.
    #[default]
    Direct,
    /// `(1', 4)` and `(3', 2)`.
    Crossed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EveOutcome {
    pub qubits: (QubitId, QubitId),
    pub kind: BellKind,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EveGroupRecord {
    pub group_index: usize,
    pub outcomes: Vec<EveOutcome>,
    pub ancillas: Vec<QubitId>,
    /// Fresh photons Eve introduced (replacement pairs or re-prepared pair).
    pub replacements: Vec<QubitId>,
    /// Photons held back for a later measurement.
    pub kept: Vec<QubitId>,
    pub correction: Option<EncodingOp>,
}

/// Everything Eve recorded during one session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EveMemory {
    pub strategy: AttackStrategy,
    pub groups: Vec<EveGroupRecord>,
    /// Every qubit Eve operated on or measured.
    pub touched: BTreeSet<QubitId>,
}

impl EveMemory {
    fn new(strategy: AttackStrategy) -> Self {
        EveMemory {
            strategy,
            groups: Vec::new(),
            touched: BTreeSet::new(),
        }
    }

    pub fn group(&self, index: usize) -> Option<&EveGroupRecord> {
        self.groups.iter().find(|g| g.group_index == index)
    }

    /// Count of each Bell outcome Eve observed.
    pub fn outcome_counts(&self) -> BTreeMap<BellKind, usize> {
        let mut counts = BTreeMap::new();
        for o in self.groups.iter().flat_map(|g| &g.outcomes) {
            *counts.entry(o.kind).or_insert(0) += 1;
        }
        counts
    }
}

/// An eavesdropper running one strategy against one session.
#[derive(Debug, Clone)]
pub struct Eve {
    strategy: AttackStrategy,
    corrective_op: EncodingOp,
    pairing: ReplacePairing,
    intercepted: bool,
    access: BTreeSet<QubitId>,
    memory: EveMemory,
}

impl Eve {
    pub fn new(strategy: AttackStrategy) -> Self {
        Eve {
            strategy,
            corrective_op: EncodingOp::U1,
            pairing: ReplacePairing::Direct,
            intercepted: false,
            access: BTreeSet::new(),
            memory: EveMemory::new(strategy),
        }
    }

    /// Operation applied after a minus outcome on the ancillas (default u1).
    pub fn with_corrective_op(mut self, op: EncodingOp) -> Self {
        self.corrective_op = op;
        self
    }

    pub fn with_pairing(mut self, pairing: ReplacePairing) -> Self {
        self.pairing = pairing;
        self
    }

    pub fn strategy(&self) -> AttackStrategy {
        self.strategy
    }

    pub fn memory(&self) -> &EveMemory {
        &self.memory
    }

    pub fn into_memory(self) -> EveMemory {
        self.memory
    }

    fn guard(&mut self, q: QubitId) -> Result<QubitId, AttackError> {
        if !self.access.contains(&q) {
            return Err(AttackError::Forbidden(q));
        }
        self.memory.touched.insert(q);
        Ok(q)
    }

    fn fresh(&mut self, channel: &mut Channel<'_>) -> QubitId {
        let q = channel.photons.fresh();
        self.access.insert(q);
        q
    }

    fn measure(&mut self, reg: &mut Register, a: QubitId, b: QubitId, chance: &mut dyn Chance) -> Result<EveOutcome, AttackError> {
        self.guard(a)?;
        self.guard(b)?;
        let kind = reg.measure_bell(a, b, chance)?;
        Ok(EveOutcome { qubits: (a, b), kind })
    }

    fn fresh_pair(&mut self, channel: &mut Channel<'_>, kind: BellKind) -> Result<(QubitId, QubitId), AttackError> {
        let a = self.fresh(channel);
        let b = self.fresh(channel);
        channel.register.insert(make_bell(kind, a, b)?)?;
        Ok((a, b))
    }

    /// Acts on the travel string once, returning the string Alice receives.
    pub fn intercept(&mut self, mut channel: Channel<'_>, travel: &[QubitId], chance: &mut dyn Chance) -> Result<Vec<QubitId>, AttackError> {
        if self.intercepted {
            return Err(AttackError::AlreadyApplied);
        }
        self.intercepted = true;
        if !travel.len().is_multiple_of(2) {
            return Err(AttackError::OddTravelString(travel.len()));
        }
        self.access.extend(travel.iter().copied());

        let mut delivered = Vec::with_capacity(travel.len());
        for (i, pair) in travel.chunks(2).enumerate() {
            let (t2, t4) = (pair[0], pair[1]);
            let mut rec = EveGroupRecord {
                group_index: i + 1,
                ..Default::default()
            };
            match self.strategy {
                AttackStrategy::None => delivered.extend([t2, t4]),
                AttackStrategy::InterceptMeasureResend => {
                    let out = self.measure(channel.register, t2, t4, chance)?;
                    let (n2, n4) = self.fresh_pair(&mut channel, out.kind)?;
                    rec.outcomes.push(out);
                    rec.replacements.extend([n2, n4]);
                    delivered.extend([n2, n4]);
                }
                AttackStrategy::InterceptReplaceMeasureAfter | AttackStrategy::InterceptReplaceMeasureBefore => {
                    let (e1, e2) = self.fresh_pair(&mut channel, BellKind::PsiPlus)?;
                    let (e3, e4) = self.fresh_pair(&mut channel, BellKind::PsiPlus)?;
                    rec.replacements.extend([e1, e2, e3, e4]);
                    delivered.extend([e2, e4]);
                    if self.strategy == AttackStrategy::InterceptReplaceMeasureBefore {
                        let (x, y) = match self.pairing {
                            ReplacePairing::Direct => (t2, t4),
                            ReplacePairing::Crossed => (t4, t2),
                        };
                        rec.outcomes.push(self.measure(channel.register, e1, x, chance)?);
                        rec.outcomes.push(self.measure(channel.register, e3, y, chance)?);
                    } else {
                        rec.kept.extend([e1, e3, t2, t4]);
                    }
                }
                AttackStrategy::AncillaPassive | AttackStrategy::AncillaCorrective => {
                    let a2 = self.fresh(&mut channel);
                    let a4 = self.fresh(&mut channel);
                    channel.register.insert(StateVector::basis(&[a2, a4], &[0, 0])?)?;
                    self.guard(t2)?;
                    self.guard(t4)?;
                    self.guard(a2)?;
                    self.guard(a4)?;
                    channel.register.apply_cnot(t2, a2)?;
                    channel.register.apply_cnot(t4, a4)?;
                    rec.ancillas.extend([a2, a4]);
                    if self.strategy == AttackStrategy::AncillaCorrective {
                        let out = self.measure(channel.register, a2, a4, chance)?;
                        if matches!(out.kind, BellKind::PsiMinus | BellKind::PhiMinus) {
                            channel.register.apply_single(t4, &self.corrective_op.operator())?;
                            rec.correction = Some(self.corrective_op);
                        }
                        rec.outcomes.push(out);
                    } else {
                        rec.kept.extend([a2, a4]);
                    }
                    delivered.extend([t2, t4]);
                }
            }
            self.memory.groups.push(rec);
        }
        Ok(delivered)
    }

    /// Reacts to Alice's public announcements for the listed groups.
    ///
    /// Only the replace-after strategy acts here: Eve Bell-measures the two
    /// photons she kept from her replacement pairs.
    pub fn observe(&mut self, channel: Channel<'_>, announced: &[(usize, BellKind)], chance: &mut dyn Chance) -> Result<(), AttackError> {
        if self.strategy != AttackStrategy::InterceptReplaceMeasureAfter {
            return Ok(());
        }
        for &(g, _) in announced {
            let Some(pos) = self.memory.groups.iter().position(|r| r.group_index == g) else {
                continue;
            };
            if !self.memory.groups[pos].outcomes.is_empty() {
                continue;
            }
            let (e1, e3) = (self.memory.groups[pos].kept[0], self.memory.groups[pos].kept[1]);
            let out = self.measure(channel.register, e1, e3, chance)?;
            self.memory.groups[pos].outcomes.push(out);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EveGuess {
    pub group_index: usize,
    /// `None` means Eve abstains.
    pub op: Option<EncodingOp>,
}

/// Eve's inference of Alice's operation on each coded group.
///
/// * measure-resend: the op mapping her outcome on the group to Alice's
///   announced outcome.
/// * replace-after: decode her kept-pair outcome against Alice's
///   announcement, exactly as Bob would.
/// * everything else: abstain.
pub fn eve_guess_bits(memory: &EveMemory, _checking: &[CheckingAnnouncement], encoding: &[EncodingAnnouncement]) -> Vec<EveGuess> {
    encoding
        .iter()
        .map(|a| {
            let record = memory.group(a.group_index);
            let outcome = record.and_then(|r| r.outcomes.first()).map(|o| o.kind);
            let op = match (memory.strategy, outcome) {
                (AttackStrategy::InterceptMeasureResend, Some(e)) => {
                    EncodingOp::ALL.into_iter().find(|&op| apply_encoding(op, e) == a.alice_outcome)
                }
                (AttackStrategy::InterceptReplaceMeasureAfter, Some(e)) => Some(decode_op(e, a.alice_outcome)),
                _ => None,
            };
            EveGuess {
                group_index: a.group_index,
                op,
            }
        })
        .collect()
}

/// Per-session digest of Eve's records for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EveSummary {
    pub strategy: AttackStrategy,
    pub outcome_counts: BTreeMap<BellKind, usize>,
    pub guesses: Vec<EveGuess>,
    pub correct_guesses: usize,
    pub abstentions: usize,
    /// Correct guesses over coded groups, abstentions scored at 1/4.
    pub guess_accuracy: Option<f64>,
}

impl EveSummary {
    /// `actual` lists Alice's true operations in coded-group order.
    pub fn new(memory: &EveMemory, guesses: Vec<EveGuess>, actual: &[EncodingOp]) -> Self {
        let correct = guesses
            .iter()
            .zip(actual)
            .filter(|(g, &op)| g.op == Some(op))
            .count();
        let abstentions = guesses.iter().filter(|g| g.op.is_none()).count();
        let guess_accuracy = if guesses.is_empty() {
            None
        } else {
            Some((correct as f64 + 0.25 * abstentions as f64) / guesses.len() as f64)
        };
        EveSummary {
            strategy: memory.strategy,
            outcome_counts: memory.outcome_counts(),
            guesses,
            correct_guesses: correct,
            abstentions,
            guess_accuracy,
        }
    }
}
