//! Residual chains indexed by ordinals, rooted coset trees, and wreath
//! towers over computable groups, with a brute-force oracle for finite
//! groups.

pub mod chains;
pub mod cli;
pub mod dsl;
pub mod groups;
pub mod oracle;
pub mod ordinal;
pub mod realize;
pub mod trees;

pub use ordinal::{CardinalBound, DepthClass};

/// Ordinal with arbitrary-precision coefficients.
pub type Ordinal = ordinal::Cnf<num_bigint::BigUint>;

/// Ordinal with machine-word coefficients, for callers that know their
/// values stay small.
pub type SmallOrdinal = ordinal::Cnf<u64>;
