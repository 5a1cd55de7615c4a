//! Exact computational number theory for sequences of the form
//! aₙ = f(n)aₙ₋₁ + h₁(n)h₂(n)ⁿ, derangement numbers and their even/odd
//! refinements, and h-Schenker sums.
//!
//! Modules, bottom-up:
//! - [`exactint`]: valuations, CRT, modular helpers, sieves.
//! - [`polyring`]: integer polynomials, the f_d family, Sturm root counting.
//! - [`sequences`]: exact and modular generators for every family.
//! - [`periodicity`]: period prediction and basic-period detection mod d.
//! - [`hensel`]: lifting of residue classes with growing p-adic valuation.
//! - [`primescan`]: parallel per-prime classification with persistence.
//! - [`diophantine`]: factorial and prime-power equations.
//! - [`divisibility`]: the (n − b − 1) | aₙ predicate and its propositions.
//! - [`acceptance`]: the end-to-end acceptance checks.

pub mod error;
pub mod exactint;
pub mod polyring;
pub mod sequences;
pub mod periodicity;
pub mod hensel;
pub mod primescan;
pub mod diophantine;
pub mod divisibility;
pub mod acceptance;

pub use error::{Error, Result};
