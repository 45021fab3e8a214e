//! Numerical laboratory for the mixed-norm spaces `H(p, q, α)` of analytic
//! functions on the unit disk: integral means, mixed norms, the inclusion
//! characterization between two such spaces, and checks of the supporting
//! estimates.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod function;
pub mod inclusion;
pub mod means;
pub mod norm;
pub mod parse;
pub mod quadrature;
pub mod rational;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use parse::parse_function;
pub use function::{AnalyticFunction, DiskPoint, Lacunary, LacunaryRule, Membership, SpaceParams, Verdict};
pub use rational::{ExtRational, Rational};
