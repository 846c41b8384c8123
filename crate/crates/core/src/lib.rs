//! Automatic discovery and extraction of user-generated content from HTML.
//!
//! The pipeline parses pages into immutable DOM trees, fingerprints
//! subtrees with canopied tag hashes, clusters repeating structures by
//! diff-based similarity, types each cluster's fields probabilistically,
//! keeps the clusters that look like UGC (origin + timestamp + message),
//! and emits reusable wrappers that extract typed records from any page
//! built on the same template. A separate interaction layer discovers
//! pagination and expansion controls and drives them through a pluggable
//! page driver, caching every rendered state for extraction.

pub mod config;
pub mod dom;
pub mod error;
pub mod eval;
pub mod interact;
pub mod miner;
pub mod similarity;
pub mod snapshot;
pub mod taghash;
pub mod typing;
pub mod wrapper;

pub use config::Config;
pub use dom::{Document, FieldPath, NodeId, StructuralXPath};
pub use error::{Error, Result};
pub use taghash::TagHash;
pub use wrapper::{discover, Record, Wrapper};
