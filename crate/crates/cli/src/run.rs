use serde::Serialize;

use qsdc_core::adversary::{eve_guess_bits, AttackStrategy, EveSummary};
use qsdc_core::analysis::{
    detection_report, leakage_report, sweep, AnalysisError, DetectionReport, LeakageReport, NodeBudget,
};
use qsdc_core::identities::{check_all, IdentityCheck};
use qsdc_core::protocol::{
    run_session, CheckingAnnouncement, DetectionPredicate, EncodingRecord, Message, SessionTranscript, Verdict,
};
use qsdc_core::qcore::RandomStream;

use crate::config::Job;

#[derive(Debug, Clone, Serialize)]
pub struct SessionReport {
    pub n_groups: usize,
    pub n_checking: usize,
    pub strategy: AttackStrategy,
    pub predicate: DetectionPredicate,
    pub seed: u64,
    pub message: Message,
    pub transcript: SessionTranscript,
    pub eve: EveSummary,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub all_passed: bool,
    pub checks: Vec<IdentityCheck>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub rows: Vec<DetectionReport>,
    pub leakage: Vec<LeakageReport>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Report {
    Session(Box<SessionReport>),
    Detect(Box<DetectionReport>),
    Leakage(LeakageReport),
    Identities(IdentityReport),
    Sweep(SweepReport),
}

impl Report {
    /// Process exit status for a completed run.
    pub fn exit_code(&self) -> u8 {
        match self {
            Report::Identities(r) if !r.all_passed => 1,
            _ => 0,
        }
    }
}

pub fn execute(job: Job, budget: NodeBudget) -> Result<Report, AnalysisError> {
    Ok(match job {
        Job::Session { cfg, strategy } => {
            let run = run_session(&cfg, strategy, &mut RandomStream::new(cfg.seed))?;
            let t = &run.transcript;
            let checking: Vec<CheckingAnnouncement> = t
                .checking
                .iter()
                .map(|r| CheckingAnnouncement {
                    group_index: r.group_index,
                    op: r.op,
                    alice_outcome: r.alice_outcome,
                })
                .collect();
            let encoding: Vec<_> = t.encoding.iter().map(EncodingRecord::announcement).collect();
            let guesses = eve_guess_bits(&run.eve, &checking, &encoding);
            let actual = if t.verdict == Verdict::Clean { cfg.message.ops() } else { Vec::new() };
            let eve = EveSummary::new(&run.eve, guesses, &actual);
            Report::Session(Box::new(SessionReport {
                n_groups: cfg.n_groups,
                n_checking: cfg.n_checking,
                strategy,
                predicate: cfg.predicate,
                seed: cfg.seed,
                message: cfg.message.clone(),
                transcript: run.transcript,
                eve,
            }))
        }
        Job::Detect { strategy, opts } => Report::Detect(Box::new(detection_report(strategy, &opts)?)),
        Job::Leakage { strategy, budget } => Report::Leakage(leakage_report(strategy, budget)?),
        Job::Identities => {
            let checks = check_all();
            Report::Identities(IdentityReport {
                all_passed: checks.iter().all(|c| c.passed),
                checks,
            })
        }
        Job::Sweep { opts } => {
            let rows = sweep(&opts)?;
            let leakage = AttackStrategy::ALL
                .into_iter()
                .map(|s| leakage_report(s, budget))
                .collect::<Result<_, _>>()?;
            Report::Sweep(SweepReport { rows, leakage })
        }
    })
}
