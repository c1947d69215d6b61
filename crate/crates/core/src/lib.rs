//! Spatial-scene-graph toolkit and zero-shot navigation harness.
//!
//! Builds hierarchical floor -> room -> object graphs from indoor point
//! clouds, serves agent-centric spatial queries over them, renders the
//! top-down map and compass observation images, and runs discrete
//! navigation episodes with pluggable policies.

pub mod geometry;

pub use geometry::{Point3, PointCloud, Pose};
pub mod cli;
