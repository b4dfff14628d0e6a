//! Free-groupoid retracts of groupoid pushouts.
//!
//! Given a pushout of groupoids `A <- C -> B` over a common object set,
//! with `C` totally disconnected, [`pushout`] builds an explicit free
//! groupoid retract `Fr W` of the pushout, the retraction onto it and the
//! inclusion back, and a loop witnessing that its vertex groups have rank at
//! least one. [`van_kampen`] applies this to graph models of spaces to
//! certify loops that do not contract.

pub mod free_groupoid;
pub mod graph;
pub mod pushout;
pub mod van_kampen;

pub use free_groupoid::{loop_coordinates, tree_path, FreeGroupElement, Letter, Sign, Word, WordError};
pub use graph::{
    components, euler_ranks, graph_pushout, spanning_forest, spanning_forest_containing, DirectedGraph, EdgeId, Forest,
    GraphError, TieBreak, VertexId, VertexPartition,
};
pub use pushout::{GLetter, GWord, PushoutInstance, RetractError, RetractReport, Side};
pub use van_kampen::{
    detect_z_retract, pbi_fails, pbp_check, Decomposition, PbpScenario, SpaceError, ZRetractCertificate,
};

pub mod cli;
pub mod dot;
