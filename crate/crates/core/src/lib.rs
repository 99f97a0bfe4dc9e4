//! Bounded synthesis of reactive while-programs from LTL specifications.

pub mod bench;
pub mod encode;
pub mod graph;
pub mod ltl;
pub mod program;
pub mod rungraph;
pub mod sat;
pub mod synth;
pub mod twoway;
pub mod verify;
