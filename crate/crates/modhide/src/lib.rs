//! Source-to-source Java obfuscator that replaces integer literals with
//! semantically equivalent chains of modular reductions.
//!
//! The pipeline lexes Java source losslessly, normalizes statement layout,
//! picks one eligible integer literal per statement, and splices in an
//! expression of the form `(d*F(B%s,k))` whose runtime value equals the
//! original literal. `F` is a small reduction routine emitted alongside the
//! rewritten program. Repeated passes nest further `F` calls inside the
//! arguments of existing ones.

pub mod analysis;
pub mod config;
pub mod corpus;
pub mod error;
pub mod expr;
pub mod lexer;
pub mod moduli;
pub mod pipeline;
pub mod report;
pub mod rewrite;
pub mod seed;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
