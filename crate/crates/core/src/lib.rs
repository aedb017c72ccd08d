//! Lowering of group presentations to linear-system non-local games, plus a
//! numerical representation lab.
//!
//! The compiler side takes presentations at the top of a typed hierarchy —
//! extended homogeneous-linear-plus-conjugacy groups, through homogeneous
//! and linear-plus-conjugacy stages — down to solution groups of binary
//! linear systems, tracking generator maps and checking closed-form size
//! forecasts against measured pass outputs. The lab side measures
//! approximate representations in the normalized Hilbert-Schmidt norm,
//! rounds them stable-style with certified constants, lifts them along
//! every compiler pass, amplifies them by tensor powers, enumerates finite
//! homomorphisms, and converts representations into strategies for the
//! associated games.
//!
//! Modules, bottom up: [`gf2`] (exact GF(2) linear algebra), [`word`]
//! (free-group words and generator maps), [`presentation`] (the typed
//! hierarchy and file formats), [`internalize`] (the recursive word family
//! and its ancilla construction), [`compiler`] (the lowering passes and the
//! flagship pipeline), [`cmat`] (dense complex matrices and eigensolvers),
//! [`replab`] (approximate representations, roundings, lifts,
//! amplification, homomorphism search), [`games`] (strategies,
//! correlations, biases), and [`selftest`] (the acceptance suite).

pub mod cmat;
pub mod compiler;
pub mod error;
pub mod games;
pub mod gf2;
pub mod internalize;
pub mod presentation;
pub mod replab;
pub mod selftest;
pub mod word;

pub use error::{Error, Result};
