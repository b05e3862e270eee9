//! Two cone complexes attached to the moduli space of n-marked stable
//! genus-zero curves, built as concrete min-plus valuations over exact
//! rationals:
//!
//! * [`tropical`]: the faithful tropicalization through the Plücker
//!   embedding of the Grassmannian of planes, with its section map;
//! * [`skeleton`]: the Berkovich skeleton of the log-regular model whose
//!   strata are indexed by compatible sets of boundary divisors.
//!
//! [`harness`] checks that the two agree and that both commute with the
//! forgetful map, point by point, over every combinatorial type.

pub mod error;
pub mod harness;
pub mod rational;
pub mod skeleton;
pub mod trees;
pub mod tropical;
pub mod valuation;

pub use error::{Error, Result};
pub use rational::Q;
