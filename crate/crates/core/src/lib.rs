//! b-ary and beta-expansions, Parry admissibility, uniform Diophantine
//! exponents, Cantor-type constructions and their Bernoulli measures.

pub mod bary;
pub mod beta_shift;
pub mod constructions;
pub mod error;
pub mod measures_dim;
pub mod numerics;
pub mod words;

pub use error::{Error, Result};

/// Library version embedded in CLI outputs.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
