//! Builder outputs: an edge subset of the parent plus how it was made.

use crate::graph::{EdgeId, Subgraph, Vertex};
use crate::reach::Direction;
use crate::verify::{VerificationReport, VerifyOptions};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "builder", rename_all = "snake_case")]
pub enum Provenance {
    Anchored {
        anchor: Vertex,
        direction: Direction,
        k: usize,
    },
    PairwiseMinimal {
        pairs: usize,
    },
    PairwiseGreedy {
        pairs: usize,
        hubs: Vec<Vertex>,
        max_freq: usize,
    },
    H0 {
        order: Vec<Vertex>,
    },
    OneFtScc {
        whole_graph: bool,
    },
    ProcedureB(Sampling),
    KftScc {
        k: usize,
        seed: u64,
        retries: usize,
        fallback_all_anchors: bool,
        sampling: Sampling,
    },
}

/// Everything Procedure B drew from its RNG.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sampling {
    pub seed: u64,
    pub k: usize,
    pub r: usize,
    pub alpha: f64,
    pub iterations: usize,
    pub edge_sample_prob: f64,
    pub anchor_count: usize,
    /// `|J|` of every round, in round order.
    pub sampled_failures: Vec<usize>,
    pub anchors: Vec<Vertex>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Certification {
    Verified { failure_sets_checked: u64 },
    /// Not checked exhaustively; `reason` says why.
    Unverified { reason: String },
}

#[derive(Clone, Debug)]
pub struct Preserver<'g> {
    pub subgraph: Subgraph<'g>,
    pub provenance: Provenance,
    pub certification: Certification,
}

impl<'g> Preserver<'g> {
    pub fn unverified(subgraph: Subgraph<'g>, provenance: Provenance, reason: &str) -> Self {
        Preserver {
            subgraph,
            provenance,
            certification: Certification::Unverified {
                reason: reason.to_string(),
            },
        }
    }

    pub fn edge_ids(&self) -> Vec<EdgeId> {
        self.subgraph.edge_ids()
    }

    pub fn edge_count(&self) -> usize {
        self.subgraph.edge_count()
    }

    pub fn is_verified(&self) -> bool {
        matches!(self.certification, Certification::Verified { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuildOptions {
    /// Run the exhaustive verifier on the output.
    pub certify: bool,
    pub verify: VerifyOptions,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            certify: true,
            verify: VerifyOptions::default(),
        }
    }
}

impl BuildOptions {
    pub fn unverified() -> Self {
        BuildOptions {
            certify: false,
            ..Default::default()
        }
    }
}

/// Turns a verifier outcome into a certification. A failed report means a
/// builder bug and panics; a budget error leaves the output unverified.
pub(crate) fn certify(
    label: &str,
    outcome: crate::error::Result<VerificationReport>,
) -> crate::error::Result<Certification> {
    match outcome {
        Ok(report) => {
            assert!(
                report.passed(),
                "{label}: output failed verification: {:?}",
                report.counterexample()
            );
            Ok(Certification::Verified {
                failure_sets_checked: report.failure_sets_checked(),
            })
        }
        Err(crate::error::Error::BudgetExceeded { needed, cap }) => {
            log::warn!("{label}: {needed} failure sets exceed cap {cap}; output left unverified");
            Ok(Certification::Unverified {
                reason: format!("{needed} failure sets exceed cap {cap}"),
            })
        }
        Err(e) => Err(e),
    }
}
