//! Dense complex multilinear algebra over the discretized one-particle index set.

pub mod grid;
pub mod index;
pub mod legged;
pub mod pair;
pub mod perm;

pub use grid::{gauss_legendre_unit, RapidityGrid};
pub use index::{InternalIndexSpace, LegSpace};
pub use legged::{LeggedTensor, MAX_ENTRIES};
pub use pair::{embed_pairwise, EmbeddedOp, PairOp};
pub use perm::Permutation;
