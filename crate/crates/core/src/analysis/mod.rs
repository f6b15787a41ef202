//! Exact and sampled statistics of whole sessions under attack.
//!
//! The exact route re-runs the real protocol code under a replaying
//! [`Chance`](crate::qcore::Chance) until every branch has been visited.
//! [`algebra`] recomputes the same detection numbers from the swapping
//! tables without touching a state vector.

pub mod algebra;
pub mod exact;
pub mod montecarlo;
pub mod report;
pub mod tree;

use thiserror::Error;

use crate::protocol::ProtocolError;

pub use algebra::algebraic_detection;
pub use exact::{
    checking_config, coded_tree, compose_detection, exact_detection, exact_detection_with, exact_fidelity, exact_leakage,
    exact_session_detection, verdict_tree, CodedOutcome,
};
pub use montecarlo::{monte_carlo, McEstimate};
pub use report::{
    detection_report, leakage_report, published_detection, published_leakage, sweep, DetectionOptions, DetectionReport,
    LeakageReport, PredicateValue, PublishedClaim, SessionPoint, SESSION_SIZES,
};
pub use tree::{enumerate, EnumerationTree, Leaf, NodeBudget, DEFAULT_NODE_BUDGET, NODE_BUDGET_ENV};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("enumeration exceeded the node budget of {budget}")]
    BudgetExceeded { budget: usize },
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}
