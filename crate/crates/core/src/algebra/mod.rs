//! Exact rational scalars, polynomials, polynomial matrices and the linear
//! algebra the rest of the crate is built on. No floating point here.

pub mod linalg;
pub mod matrix;
pub mod poly;
pub mod polymatrix;
pub mod rational;

pub use linalg::{
    hyperbolic_unit, inertia, inertia_congruence, polynomial_kernel_basis, rank_factorization,
    skew_canonical_congruence, solve_linear, symplectic_unit, AlgebraError, CongruenceBlock, Inertia,
    SymmetricCongruence,
};
pub use matrix::RatMatrix;
pub use poly::{poly_gcd, AllZero, Degree, Poly};
pub use polymatrix::PolyMatrix;
pub use rational::{int, parse_rational, rat, Rational};
