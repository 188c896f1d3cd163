//! Stable matchings in two-sided markets with path-independent choice
//! functions: deferred acceptance, rotation posets, enumeration of all stable
//! matchings, max-weight optimization by minimum cut, and the polyhedral
//! description of the stable matching polytope.

pub mod agentset;
pub mod algorithms;
pub mod cli;
pub mod error;
pub mod format;
pub mod linalg;
pub mod market;
pub mod matching;
pub mod maxflow;
pub mod optimize;
pub mod oracle;
pub mod polytope;
pub mod represent;
pub mod ringsets;

pub use agentset::AgentSet;
pub use error::{Error, Result};
pub use market::{AgentId, ChoiceSpec, Instance, InstanceBuilder, Pair, Property, Side};
pub use matching::{Matching, PairSet};
pub use optimize::Weights;
pub use represent::{AffineMap, Rotation, RotationPoset};
