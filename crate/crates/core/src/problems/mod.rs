//! Benchmark problems: two algebraic systems, two 1-D boundary-value
//! problems and one 2-D boundary-value problem.

pub mod algebraic;
pub mod bvp1d;
pub mod pde2d;
