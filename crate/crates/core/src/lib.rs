//! Exact-arithmetic toolkit for inverse mixed integer linear optimization.
//!
//! Given a forward feasible set `S = {x | Ax <= b} ∩ (Z^r × R^(n-r))`, a
//! target vector `x0` and an estimated objective `c`, the inverse problem
//! asks for the objective `d` nearest to `c` (in the l1 or l-infinity norm)
//! under which `x0` is optimal for `max d'x over S`. Everything in this
//! crate runs on arbitrary-precision rationals; there is no floating point
//! and no tolerance anywhere.
//!
//! The main entry points are [`solver::solve_inverse`] (the cutting-plane
//! loop), [`milp::solve_milp`] (the branch-and-bound forward oracle),
//! [`decide`] (the six bound/value verification problems, their reductions
//! and certificates) and [`brute`] (independent enumeration-based reference
//! implementations used to cross-check everything else).

pub mod brute;
pub mod decide;
pub mod error;
pub mod geometry;
pub mod instance;
pub mod io;
pub mod lp;
pub mod milp;
pub mod rational;
pub mod solver;

pub use error::Error;
pub use rational::{Norm, Rat};
