//! Design and dynamic maintenance of parallel redundant systems.
//!
//! The crate builds the continuous-time maintenance MDP of a design, solves its
//! penalized average-cost problem, evaluates policies exactly, and assembles
//! Pareto fronts of long-run operational cost against failure probability.

pub mod app;
pub mod ctmdp;
pub mod dop;
pub mod error;
pub mod exact;
pub mod front;
mod linalg;
pub mod mdp;
pub mod model;
pub mod numfmt;
pub mod sim;

pub use error::{Error, Result};
pub use model::{ComponentType, Constraint, Design, Instance, PenaltyBasis};
