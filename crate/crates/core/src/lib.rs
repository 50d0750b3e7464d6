//! Fault-tolerant reachability and strong-connectivity preservers for
//! directed graphs, with exhaustive verifiers and lower-bound generators.

pub mod error;
pub mod experiment;
pub mod graph;
pub mod io;
pub mod lowerbound;
pub mod ftrs;
pub mod path;
pub mod preserver;
pub mod random;
pub mod reach;
pub mod scc;
pub mod split;
pub mod verify;

mod flow;

pub use error::{Error, Result};
pub use graph::{DiGraph, EdgeId, EdgeMask, EdgeView, PairSet, Subgraph, Vertex};
pub use reach::{Direction, SccPartition};
pub use preserver::{BuildOptions, Certification, Preserver, Provenance};
pub use split::SplitGraph;
pub use verify::{Counterexample, VerificationReport, VerifyOptions, Witness};
