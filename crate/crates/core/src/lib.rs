//! Exact computations in trinomial algebras `R(g) = K[T_ij] / (g)`.
//!
//! The crate computes the fine grading of `R(g)`, builds and recognizes
//! elementary locally nilpotent derivations, decides which degrees are roots,
//! and checks these statements against brute-force linear algebra on small
//! instances.

pub mod abelian;
pub mod cli;
pub mod derivation;
pub mod oracle;
pub mod ring;
pub mod roots;
