use crate::adversary::{AttackStrategy, Eve, EveMemory};
use crate::qcore::{BellKind, Chance, QubitId, Register};

use super::phases::{
    alice_checking, alice_encoding, alice_receive, bob_checking, bob_measure_encoding, decode_message, partition_groups,
    prepare_session, verdict_of, PhotonIds,
};
use super::{
    CheckingAnnouncement, CheckingRecord, EncodingAnnouncement, EncodingRecord, Group, Message, ProtocolError, SessionConfig,
    SessionTranscript, Verdict,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Prepared,
    Delivered,
    Partitioned,
    Announced,
    Checked,
    Encoded,
    Finished,
}

impl Phase {
    fn name(self) -> &'static str {
        match self {
            Phase::Prepared => "prepared",
            Phase::Delivered => "delivered",
            Phase::Partitioned => "partitioned",
            Phase::Announced => "checking-announced",
            Phase::Checked => "checked",
            Phase::Encoded => "encoding-announced",
            Phase::Finished => "finished",
        }
    }
}

/// What an interceptor on the travel channel can reach.
pub struct Channel<'a> {
    pub register: &'a mut Register,
    pub photons: &'a mut PhotonIds,
}

/// A single session driven step by step.
///
/// Each step checks that the previous one ran; in particular the coding
/// steps refuse to run unless the checking verdict was `Clean`.
#[derive(Debug, Clone)]
pub struct Session {
    cfg: SessionConfig,
    register: Register,
    photons: PhotonIds,
    travel: Vec<QubitId>,
    groups: Vec<Group>,
    phase: Phase,
    checking_announcements: Vec<CheckingAnnouncement>,
    checking: Vec<CheckingRecord>,
    encoding_announcements: Vec<EncodingAnnouncement>,
    encoding: Vec<EncodingRecord>,
    verdict: Option<Verdict>,
    decoded: Message,
}

impl Session {
    pub fn prepare(cfg: SessionConfig) -> Result<Self, ProtocolError> {
        let p = prepare_session(&cfg)?;
        Ok(Session {
            cfg,
            register: p.register,
            photons: p.photons,
            travel: p.travel,
            groups: p.groups,
            phase: Phase::Prepared,
            checking_announcements: Vec::new(),
            checking: Vec::new(),
            encoding_announcements: Vec::new(),
            encoding: Vec::new(),
            verdict: None,
            decoded: Message::empty(),
        })
    }

    fn expect(&self, phase: Phase, attempted: &'static str) -> Result<(), ProtocolError> {
        if self.phase == phase {
            Ok(())
        } else {
            Err(ProtocolError::OutOfOrder {
                attempted,
                current: self.phase.name(),
            })
        }
    }

    pub fn config(&self) -> &SessionConfig {
        &self.cfg
    }

    pub fn travel(&self) -> &[QubitId] {
        &self.travel
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn verdict(&self) -> Option<Verdict> {
        self.verdict
    }

    pub fn channel(&mut self) -> Channel<'_> {
        Channel {
            register: &mut self.register,
            photons: &mut self.photons,
        }
    }

    /// Alice takes delivery of the travel string. A string of the wrong
    /// length aborts the session.
    pub fn deliver(&mut self, delivered: &[QubitId]) -> Result<(), ProtocolError> {
        self.expect(Phase::Prepared, "deliver")?;
        match alice_receive(self.groups.clone(), delivered) {
            Ok(groups) => {
                self.groups = groups;
                self.phase = Phase::Delivered;
                Ok(())
            }
            Err(e @ ProtocolError::LostPhotons { .. }) => {
                self.verdict = Some(Verdict::Aborted);
                self.phase = Phase::Finished;
                Err(e)
            }
            Err(e) => Err(e),
        }
    }

    pub fn partition(&mut self, chance: &mut dyn Chance) -> Result<(), ProtocolError> {
        self.expect(Phase::Delivered, "partition")?;
        self.groups = partition_groups(std::mem::take(&mut self.groups), self.cfg.n_checking, chance)?;
        self.phase = Phase::Partitioned;
        Ok(())
    }

    pub fn alice_check(&mut self, chance: &mut dyn Chance) -> Result<&[CheckingAnnouncement], ProtocolError> {
        self.expect(Phase::Partitioned, "alice_check")?;
        self.checking_announcements = alice_checking(
            &mut self.register,
            &self.groups,
            &self.cfg.checking_op_policy,
            self.cfg.encode_target,
            chance,
        )?;
        self.phase = Phase::Announced;
        Ok(&self.checking_announcements)
    }

    pub fn bob_check(&mut self, chance: &mut dyn Chance) -> Result<Verdict, ProtocolError> {
        self.expect(Phase::Announced, "bob_check")?;
        self.checking = bob_checking(
            &mut self.register,
            &self.groups,
            &self.checking_announcements,
            self.cfg.predicate,
            chance,
        )?;
        let verdict = verdict_of(&self.checking);
        self.verdict = Some(verdict);
        self.phase = if verdict == Verdict::Clean {
            Phase::Checked
        } else {
            Phase::Finished
        };
        Ok(verdict)
    }

    pub fn alice_encode(&mut self, chance: &mut dyn Chance) -> Result<&[EncodingAnnouncement], ProtocolError> {
        if self.verdict.is_some_and(|v| v != Verdict::Clean) {
            return Err(ProtocolError::Aborted);
        }
        self.expect(Phase::Checked, "alice_encode")?;
        self.encoding_announcements =
            alice_encoding(&mut self.register, &self.groups, &self.cfg.message, self.cfg.encode_target, chance)?;
        self.phase = Phase::Encoded;
        Ok(&self.encoding_announcements)
    }

    pub fn bob_decode(&mut self, chance: &mut dyn Chance) -> Result<&Message, ProtocolError> {
        self.expect(Phase::Encoded, "bob_decode")?;
        self.encoding = bob_measure_encoding(&mut self.register, &self.groups, &self.encoding_announcements, chance)?;
        let bob: Vec<(usize, BellKind)> = self.encoding.iter().map(|r| (r.group_index, r.bob_outcome)).collect();
        self.decoded = decode_message(&self.encoding_announcements, &bob)?;
        self.phase = Phase::Finished;
        Ok(&self.decoded)
    }

    pub fn transcript(&self) -> SessionTranscript {
        SessionTranscript {
            groups: self.groups.clone(),
            checking: self.checking.clone(),
            encoding: self.encoding.clone(),
            verdict: self.verdict.unwrap_or(Verdict::Aborted),
            decoded_bits: self.decoded.clone(),
        }
    }
}

/// Transcript plus what the eavesdropper kept.
#[derive(Debug, Clone)]
pub struct SessionRun {
    pub transcript: SessionTranscript,
    pub eve: EveMemory,
}

/// Runs a whole session with `attack` interposed on the travel channel.
pub fn run_session(cfg: &SessionConfig, attack: AttackStrategy, chance: &mut dyn Chance) -> Result<SessionRun, ProtocolError> {
    run_session_with(cfg, Eve::new(attack), chance)
}

/// As [`run_session`], with a preconfigured eavesdropper.
pub fn run_session_with(cfg: &SessionConfig, mut eve: Eve, chance: &mut dyn Chance) -> Result<SessionRun, ProtocolError> {
    let mut session = Session::prepare(cfg.clone())?;
    let travel = session.travel().to_vec();
    let delivered = eve.intercept(session.channel(), &travel, chance)?;
    match session.deliver(&delivered) {
        Ok(()) => {}
        Err(ProtocolError::LostPhotons { .. }) => {
            return Ok(SessionRun {
                transcript: session.transcript(),
                eve: eve.into_memory(),
            })
        }
        Err(e) => return Err(e),
    }
    session.partition(chance)?;
    let announced: Vec<(usize, BellKind)> = session
        .alice_check(chance)?
        .iter()
        .map(|a| (a.group_index, a.alice_outcome))
        .collect();
    eve.observe(session.channel(), &announced, chance)?;
    if session.bob_check(chance)? == Verdict::Clean {
        let announced: Vec<(usize, BellKind)> = session
            .alice_encode(chance)?
            .iter()
            .map(|a| (a.group_index, a.alice_outcome))
            .collect();
        eve.observe(session.channel(), &announced, chance)?;
        session.bob_decode(chance)?;
    }
    Ok(SessionRun {
        transcript: session.transcript(),
        eve: eve.into_memory(),
    })
}
