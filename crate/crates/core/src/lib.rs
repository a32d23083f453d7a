//! Space-time circuit-to-Hamiltonian constructions and their numerical
//! certification at desk scale.

pub mod circuit;
pub mod configspace;
pub mod error;
pub mod fermion;
pub mod linalg;
pub mod markov;
pub mod operators;
pub mod qma;
pub mod sparse;
pub mod spectra;

pub use error::{Error, Result};
