//! Pseudo-differential operators on locally compact abelian groups, discretized.

pub mod asymptotics;
pub mod config;
pub mod error;
pub mod fourier;
pub mod lca;
pub mod linalg;
pub mod pdo;
pub mod runner;
pub mod spectral;
pub mod symbols;

pub use error::{Error, Result};
