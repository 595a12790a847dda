//! Exact arithmetic, lattice linear algebra, and polytope primitives.

pub mod lattice;
pub mod lp;
pub mod matrix;
pub mod polytope;
pub mod rational;

pub use lattice::{primitivize, LatticeVector};
pub use matrix::{is_negative_definite, solve_linear, RationalMatrix, Solution};
pub use polytope::{Inequality, RationalPolytope};
pub use rational::{q, Rational};
