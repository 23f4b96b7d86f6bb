//! Finite-model checking for topological unosemigroups.
//!
//! Finite spaces are stored as minimal-neighborhood maps and semigroups as
//! Cayley tables. The crate decides dicontinuity of unit operations, builds
//! the standard constructions, and runs exhaustive or sampled searches.

pub mod certs;
pub mod constructions;
pub mod finsg;
pub mod fintop;
pub mod fixtures;
pub mod hm;
pub mod pointset;
pub mod search;
pub mod unocore;

pub use finsg::{FiniteSemigroup, InverseStructure, SemigroupError};
pub use fintop::{FiniteTopology, TopologyError};
pub use pointset::PointSet;
pub use unocore::{Side, UnoError, UnoStructure};
