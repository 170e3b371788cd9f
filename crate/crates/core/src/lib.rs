//! Package-quality metrics and modularity-driven package refactoring for
//! class dependency graphs.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the session
//! service and the command line live in the `repkg` crate.

#![no_std]

extern crate alloc;

pub mod community;
pub mod error;
pub mod graph;
pub mod membership;
pub mod metrics;
pub mod modularity;
pub mod refactor;

pub use error::{Error, Result};
pub use graph::{DependencyGraph, Edge, Edit, Node, Strength};
pub use membership::{membership_from_labels, Membership, PackageTable};
pub use metrics::{InstabilityReport, PackageInstability, SdpViolation};
pub use modularity::{QualityValue, Variant};
pub use refactor::{Mode, Movement, RefactorResult};
