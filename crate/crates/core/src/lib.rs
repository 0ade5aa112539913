//! Boundary variables for differential-operator Dirac structures and
//! Lagrangian subspaces on an interval.
//!
//! Operators are polynomial matrices in `s = d/dz` with exact rational
//! coefficients. Integration by parts is carried out on two-variable
//! polynomial matrices, and every identity the library produces is checked
//! exactly on polynomial trajectories.

pub mod algebra;
pub mod bdf;
pub mod cli;
pub mod constrained;
pub mod dirac;
pub mod harness;
pub mod lagrange;
pub mod realize;
