#![allow(clippy::needless_range_loop)]
//! Finite-dimensional quantum permutations, quantum automorphisms of graphs, the quantum
//! isomorphism game and quantum deck transformations of finite covers.

pub mod error;
pub mod linalg;
pub mod perm;
pub mod deck;
pub mod game;
pub mod graphs;
pub mod qaut;
pub mod qperm;
pub mod weyl;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, TolerancePolicy, C64};
pub use perm::Permutation;
pub use qperm::QuantumPermutation;
