//! Simulation and analysis of deterministic secure direct communication
//! built on entanglement swapping and local unitary coding.
//!
//! * [`qcore`]: state vectors, Bell measurement, seeded/enumerable chance.
//! * [`bellmap`]: swapping algebra, coding unitaries, correlation table.
//! * [`protocol`]: the two-party session.
//! * [`adversary`]: eavesdropping strategies and Eve's inference rule.
//! * [`analysis`]: exact branch enumeration, algebraic cross-check, Monte Carlo.
//! * [`identities`]: reference expansions checked against the engine.

pub mod adversary;
pub mod analysis;
pub mod bellmap;
pub mod identities;
pub mod protocol;
pub mod qcore;
