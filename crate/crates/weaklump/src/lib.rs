//! Exact analysis of strong, exact and weak lumping for left-invariant random walks
//! on finite permutation groups, lumped to the left cosets of a subgroup.

pub mod algebra;
pub mod error;
pub mod exec;
pub mod group;
pub mod hecke;
pub mod io;
pub mod linalg;
pub mod lumping;
pub mod markov;
pub mod scalar;
pub mod shuffles;
pub mod simulate;

pub use error::{Error, Result};
