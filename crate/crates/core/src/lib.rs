//! Cost allocation for joint inventory management under interval demand.
//!
//! Agents that order jointly under the EOQ model share a fixed ordering cost
//! `a`. When each agent's demand is only known up to an interval, so is its
//! optimal order frequency `m_i`, and the cost of a coalition `S` becomes the
//! interval `2a·sqrt(Σ_{i∈S} m_i²)`. This crate builds that interval game,
//! evaluates the interval SOC-rule and the interval Shapley rule on it, and
//! checks the allocation axioms (CCA, IAE, TBA, BC, core membership).
//!
//! Module map:
//!
//! - [`interval`]: checked arithmetic on closed intervals.
//! - [`game`]: tabulated real-valued cost games, Shapley value, concavity, core.
//! - [`inventory`]: EOQ formulas, interval inventory situations, border games.
//! - [`rules`]: the allocation rules and the independence fixtures.
//! - [`properties`]: the axiom checks.
//! - [`format`] and [`report`]: input files and rendered comparison tables.

pub mod error;
pub mod fixtures;
pub mod format;
pub mod game;
pub mod interval;
pub mod inventory;
pub mod properties;
pub mod random;
pub mod report;
pub mod rules;
pub mod tolerance;

pub use error::{Error, Result};
pub use game::{AgentSet, Coalition, CostGame, RealAllocation};
pub use interval::Interval;
pub use inventory::{
    DeterministicAgent, IntervalAgent, IntervalGame, IntervalInventorySituation, SocConditionReport,
};
pub use properties::{Property, PropertyReport};
pub use rules::{IntervalAllocation, Rule};
