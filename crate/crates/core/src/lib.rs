//! Estimating the size and average degree of a social graph from a random
//! walk that can only visit public nodes.
//!
//! The walk runs on the largest connected component of public nodes. Two
//! families of estimators are provided: the naive ones, which converge to
//! properties of that cluster, and corrected ones that use each sample's full
//! degree to recover properties of the whole graph.

pub mod access;
pub mod estimators;
pub mod experiment;
pub mod graph;
pub mod ingest;
pub mod numeric;
pub mod synth;
pub mod theory;
pub mod walker;

pub use access::{AccessError, AccessModel, Crawler, QueryLedger};
pub use estimators::{estimate, EstimateError, EstimateReport};
pub use experiment::{ExperimentConfig, ExperimentError};
pub use graph::{largest_public_cluster, GraphError, Label, LabeledGraph, NodeId, PublicClusterView, Topology};
pub use ingest::{IngestError, IngestedGraph};
pub use theory::{convergence_values, ConvergenceValues, DegreeMoments};
pub use walker::{run_walk, PublicDegreeMode, WalkConfig, WalkError, WalkRecord};
