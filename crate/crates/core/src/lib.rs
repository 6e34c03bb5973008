pub mod certainty;
pub mod decision;
pub mod formula;
pub mod generate;
pub mod miller;
mod pattern;
pub mod rewrite;
pub mod proofs;
pub mod rational;
pub mod semantics;
pub mod structures;

pub use formula::{parse, AgentId, Formula, Language, Relation, WeightAtom, WeightTerm};
pub use rational::Rational;
