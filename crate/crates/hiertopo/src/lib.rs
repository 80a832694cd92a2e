//! Graph-topology engineering for hierarchical-product networks.
//!
//! The crate builds modular network topologies as hierarchical products of
//! rooted base graphs, computes and cross-validates their structural and
//! spectral invariants, benchmarks them with a probabilistic
//! entanglement-spreading simulation, and places quantum circuits onto
//! complete-graph hierarchies with a partition-and-rotate heuristic.
//!
//! Modules:
//! - [`graph`]: weighted simple rooted graphs, distances, invariants,
//!   Cheeger cuts.
//! - [`products`]: the hierarchical product (plain, weighted, truncated),
//!   hierarchy assembly, node addressal.
//! - [`closed_forms`]: analytic recursions used as oracles against
//!   measured values.
//! - [`spectral`]: dense and recursive Laplacian spectra, spectral bounds.
//! - [`ghz`]: deterministic and probabilistic spreading-time benchmarks.
//! - [`placement`]: circuit graphs, balanced partitioning,
//!   partition-and-rotate placement.

pub mod closed_forms;
pub mod error;
pub mod ghz;
pub mod graph;
pub mod placement;
pub mod products;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{CheegerCut, CheegerMode, Graph, InvariantRecord, Metric};
pub use products::{build_hierarchy, hproduct, truncated_hproduct, HierarchySpec, NodeAddress};
pub use spectral::{dense_spectrum, recursive_spectrum, Spectrum};
