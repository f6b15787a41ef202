use crate::bellmap::decode_op;
use crate::qcore::{make_bell, BellKind, Chance, QubitId, Register};

use super::{
    CheckingAnnouncement, CheckingRecord, DetectionPredicate, EncodeTarget, EncodingAnnouncement, EncodingRecord, Group,
    Message, OpPolicy, ProtocolError, Role, SessionConfig, Verdict,
};

/// Allocator for photon labels. Bob's photons take `1..=4n`; everything
/// created later (re-prepared photons, ancillas) gets the next free label.
#[derive(Debug, Clone)]
pub struct PhotonIds {
    next: u32,
}

impl PhotonIds {
    pub fn starting_at(next: u32) -> Self {
        PhotonIds { next }
    }

    pub fn fresh(&mut self) -> QubitId {
        let id = QubitId(self.next);
        self.next += 1;
        id
    }
}

/// Output of the preparation step.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub register: Register,
    /// Groups as Bob formed them; `alice_qubits` are the photons he sent.
    pub groups: Vec<Group>,
    /// Ordered travel string, e.g. `2, 4, 6, 8, ...`.
    pub travel: Vec<QubitId>,
    pub photons: PhotonIds,
}

/// Bob's preparation: `2 * n_groups` pairs in Psi+. Pair `j` holds photons
/// `2j-1` (kept) and `2j` (sent); group `g` uses pairs `2g-1` and `2g`.
pub fn prepare_session(cfg: &SessionConfig) -> Result<Prepared, ProtocolError> {
    cfg.validate()?;
    let mut register = Register::new();
    let mut groups = Vec::with_capacity(cfg.n_groups);
    let mut travel = Vec::with_capacity(2 * cfg.n_groups);
    for g in 1..=cfg.n_groups as u32 {
        let base = 4 * (g - 1);
        let (p1, p2, p3, p4) = (QubitId(base + 1), QubitId(base + 2), QubitId(base + 3), QubitId(base + 4));
        register.insert(make_bell(BellKind::PsiPlus, p1, p2)?)?;
        register.insert(make_bell(BellKind::PsiPlus, p3, p4)?)?;
        travel.extend([p2, p4]);
        groups.push(Group {
            index: g as usize,
            bob_qubits: (p1, p3),
            alice_qubits: (p2, p4),
            role: Role::EncodingDecoding,
        });
    }
    Ok(Prepared {
        register,
        groups,
        travel,
        photons: PhotonIds::starting_at(4 * cfg.n_groups as u32 + 1),
    })
}

/// Alice stores arriving photons two at a time, in arrival order.
pub fn alice_receive(groups: Vec<Group>, delivered: &[QubitId]) -> Result<Vec<Group>, ProtocolError> {
    if delivered.len() != 2 * groups.len() {
        return Err(ProtocolError::LostPhotons {
            expected: 2 * groups.len(),
            got: delivered.len(),
        });
    }
    Ok(groups
        .into_iter()
        .zip(delivered.chunks(2))
        .map(|(g, pair)| Group {
            alice_qubits: (pair[0], pair[1]),
            ..g
        })
        .collect())
}

/// Marks `n_checking` groups, drawn uniformly without replacement, as
/// checking groups; the rest carry the message.
pub fn partition_groups(mut groups: Vec<Group>, n_checking: usize, chance: &mut dyn Chance) -> Result<Vec<Group>, ProtocolError> {
    if n_checking > groups.len() {
        return Err(ProtocolError::CheckingOutOfRange {
            n_checking,
            n_groups: groups.len(),
        });
    }
    let mut pool: Vec<usize> = (0..groups.len()).collect();
    for g in groups.iter_mut() {
        g.role = Role::EncodingDecoding;
    }
    for _ in 0..n_checking {
        let weights = vec![1.0; pool.len()];
        let i = pool.remove(chance.pick(&weights));
        groups[i].role = Role::Checking;
    }
    Ok(groups)
}

fn with_role(groups: &[Group], role: Role) -> impl Iterator<Item = &Group> {
    groups.iter().filter(move |g| g.role == role)
}

/// Alice's side of the check: a policy-drawn operation on one photon of
/// each checking group, then a Bell measurement of the group.
pub fn alice_checking(
    register: &mut Register,
    groups: &[Group],
    policy: &OpPolicy,
    target: EncodeTarget,
    chance: &mut dyn Chance,
) -> Result<Vec<CheckingAnnouncement>, ProtocolError> {
    let mut out = Vec::new();
    for g in with_role(groups, Role::Checking) {
        let op = crate::bellmap::EncodingOp::ALL[chance.pick(policy.weights())];
        register.apply_single(target.pick(g.alice_qubits), &op.operator())?;
        let alice_outcome = register.measure_bell(g.alice_qubits.0, g.alice_qubits.1, chance)?;
        out.push(CheckingAnnouncement {
            group_index: g.index,
            op,
            alice_outcome,
        });
    }
    Ok(out)
}

/// Bob measures each announced group and compares.
pub fn bob_checking(
    register: &mut Register,
    groups: &[Group],
    announcements: &[CheckingAnnouncement],
    predicate: DetectionPredicate,
    chance: &mut dyn Chance,
) -> Result<Vec<CheckingRecord>, ProtocolError> {
    announcements
        .iter()
        .map(|a| {
            let g = groups
                .iter()
                .find(|g| g.index == a.group_index)
                .ok_or(ProtocolError::MissingGroup(a.group_index))?;
            let bob_outcome = register.measure_bell(g.bob_qubits.0, g.bob_qubits.1, chance)?;
            Ok(CheckingRecord {
                group_index: a.group_index,
                op: a.op,
                alice_outcome: a.alice_outcome,
                bob_outcome,
                passed: predicate.passes(a.op, bob_outcome, a.alice_outcome),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckingResult {
    pub records: Vec<CheckingRecord>,
    pub verdict: Verdict,
}

impl CheckingResult {
    pub fn announcements(&self) -> Vec<CheckingAnnouncement> {
        self.records
            .iter()
            .map(|r| CheckingAnnouncement {
                group_index: r.group_index,
                op: r.op,
                alice_outcome: r.alice_outcome,
            })
            .collect()
    }
}

/// Verdict is `EveDetected` iff any checking group fails.
pub fn run_checking(
    register: &mut Register,
    groups: &[Group],
    policy: &OpPolicy,
    target: EncodeTarget,
    predicate: DetectionPredicate,
    chance: &mut dyn Chance,
) -> Result<CheckingResult, ProtocolError> {
    let announcements = alice_checking(register, groups, policy, target, chance)?;
    let records = bob_checking(register, groups, &announcements, predicate, chance)?;
    Ok(CheckingResult {
        verdict: verdict_of(&records),
        records,
    })
}

pub(crate) fn verdict_of(records: &[CheckingRecord]) -> Verdict {
    if records.iter().all(|r| r.passed) {
        Verdict::Clean
    } else {
        Verdict::EveDetected
    }
}

/// Alice codes two bits per group, in group order, then Bell-measures.
pub fn alice_encoding(
    register: &mut Register,
    groups: &[Group],
    message: &Message,
    target: EncodeTarget,
    chance: &mut dyn Chance,
) -> Result<Vec<EncodingAnnouncement>, ProtocolError> {
    let coded: Vec<&Group> = with_role(groups, Role::EncodingDecoding).collect();
    if message.len() != 2 * coded.len() {
        return Err(ProtocolError::CapacityMismatch {
            expected: 2 * coded.len(),
            got: message.len(),
        });
    }
    let mut out = Vec::with_capacity(coded.len());
    for (g, op) in coded.into_iter().zip(message.ops()) {
        register.apply_single(target.pick(g.alice_qubits), &op.operator())?;
        let alice_outcome = register.measure_bell(g.alice_qubits.0, g.alice_qubits.1, chance)?;
        out.push(EncodingAnnouncement {
            group_index: g.index,
            alice_outcome,
        });
    }
    Ok(out)
}

/// Bob measures his half of every announced coded group.
pub fn bob_measure_encoding(
    register: &mut Register,
    groups: &[Group],
    announcements: &[EncodingAnnouncement],
    chance: &mut dyn Chance,
) -> Result<Vec<EncodingRecord>, ProtocolError> {
    announcements
        .iter()
        .map(|a| {
            let g = groups
                .iter()
                .find(|g| g.index == a.group_index)
                .ok_or(ProtocolError::MissingGroup(a.group_index))?;
            let bob_outcome = register.measure_bell(g.bob_qubits.0, g.bob_qubits.1, chance)?;
            Ok(EncodingRecord {
                group_index: a.group_index,
                alice_outcome: a.alice_outcome,
                bob_outcome,
            })
        })
        .collect()
}

pub fn run_encoding(
    register: &mut Register,
    groups: &[Group],
    message: &Message,
    target: EncodeTarget,
    chance: &mut dyn Chance,
) -> Result<Vec<EncodingRecord>, ProtocolError> {
    let announcements = alice_encoding(register, groups, message, target, chance)?;
    bob_measure_encoding(register, groups, &announcements, chance)
}

/// Concatenates the decoded codewords in announcement order.
pub fn decode_message(announcements: &[EncodingAnnouncement], bob_outcomes: &[(usize, BellKind)]) -> Result<Message, ProtocolError> {
    if announcements.len() != bob_outcomes.len() {
        return Err(ProtocolError::LengthMismatch {
            announcements: announcements.len(),
            outcomes: bob_outcomes.len(),
        });
    }
    let mut ops = Vec::with_capacity(announcements.len());
    for a in announcements {
        let bob = bob_outcomes
            .iter()
            .find(|(g, _)| *g == a.group_index)
            .map(|(_, k)| *k)
            .ok_or(ProtocolError::MissingGroup(a.group_index))?;
        ops.push(decode_op(bob, a.alice_outcome));
    }
    Ok(Message::from_ops(&ops))
}
