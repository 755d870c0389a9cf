//! Exact algebra for Novikov-type rings and transitive systems of modules, plus a
//! homology-level calculus of Dehn-twist words and closure maps.
//!
//! The crate is organised bottom-up:
//!
//! - [`novikov`]: formal sums `Σ c·t^α` with rational exponents and truncated inverses.
//! - [`ring`]: the [`Ring`](ring::Ring) trait shared by every coefficient ring.
//! - [`module`]: free modules, homomorphisms and their classes up to a unit group.
//! - [`transys`]: transitive systems, their morphisms, quotients and flattening.
//! - [`mcg`]: the symplectic model of H₁ of a surface and twist-word factorization.
//! - [`closure`]: closure records, surgery presentations, morphism words and rewriting.
//! - [`doc`]: versioned JSON documents consumed by the command line front end.

pub mod closure;
pub mod doc;
pub mod error;
pub mod mcg;
pub mod module;
pub mod novikov;
pub mod ring;
pub mod transys;

pub use error::{Error, Result};
