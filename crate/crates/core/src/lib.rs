//! N-level quantum energy transport.
//!
//! The crate builds the composite level space, the discrete-Fourier transition
//! maps and transport operator between levels, the GKSL generator driven by
//! those maps, and the structural subspaces and invariant states of the
//! resulting quantum Markov semigroup.

pub mod cli;
pub mod config;
pub mod error;
pub mod gksl;
pub mod hilbert;
pub mod invariants;
pub mod linalg;
pub mod operator;
pub mod sample;
pub mod subspace;
pub mod suite;
pub mod transition;

pub use error::{Error, Result};
pub use hilbert::{BasisIndex, Block, BohrFrequency, LevelStructure, State};
pub use operator::{c64, Operator, Vector};
pub use subspace::Subspace;
