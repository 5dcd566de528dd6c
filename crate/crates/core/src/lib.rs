//! Exact symbolic topology of structured countable subsets of the real line.
//!
//! Sets are described by [`SetExpr`] trees over exact rationals ([`Rat`]);
//! the library computes closures, derived sets, Cantor–Bendixson ranks and
//! discrete decompositions of linear images, and ships a brute-force
//! [`oracle`] to cross-check every symbolic answer.

pub mod algebra;
pub mod cli;
pub mod constructions;
pub mod dsl;
pub mod error;
pub mod expr;
pub mod normalize;
pub mod oracle;
pub mod points_file;
pub mod rat;
mod solver;
pub mod topology;

pub use algebra::{
    hypothesis_check, kbound, linear_image_decompose, minkowski_sum, tail_combine, RankVector,
};
pub use dsl::{parse, render};
pub use error::{Error, Result};
pub use expr::{Direction, Geom, MaybeSet, SetExpr, Tail};
pub use normalize::normalize;
pub use rat::{rat, Rat};
