//! Extended Hamiltonians.
//!
//! Starting from a seed Hamiltonian `L` that admits a solution `G` of
//! `X_L²(G) = -2(cL + c₀)G`, this crate builds the extended Hamiltonian
//! `H = ½p_u² - k²γ'L + k²c₀γ² + Ω/γ²` on one more degree of freedom,
//! generates its characteristic first integrals of arbitrary polynomial
//! degree, constructs the classical ladder functions and the quantum
//! shift/ladder operators, and verifies every identity symbolically or
//! numerically.
//!
//! Module map:
//!
//! * [`expr`] exact symbolic kernel (expression trees, canonical form,
//!   Poisson bracket, parser, evaluation)
//! * [`tagged_trig`] `S_κ`, `C_κ`, `T_κ` and the solutions `γ(u)`
//! * [`extension`] seeds, extended Hamiltonians, `G_n`, `U_{m,n}`, `K`, `K̄`,
//!   ladder functions and factorized integrals
//! * [`geometry`] metrics, Christoffel symbols and Ricci tensors
//! * [`intrinsic`] conformal Killing vectors and the warp conditions
//! * [`verification`] numeric harness (brackets, ranks, trajectories)
//! * [`catalog`] built-in systems
//! * [`quantum`] grid operators for the quantum extension
//! * [`cli`] the `extham` command-line front end

#![allow(clippy::needless_range_loop)]

pub mod catalog;
pub mod cli;
pub mod error;
pub mod expr;
pub mod sampling;
pub mod extension;
pub mod geometry;
pub mod intrinsic;
pub mod quantum;
pub mod tagged_trig;
pub mod verification;

pub use error::{Error, Result};
pub use expr::{Chart, Expr, PhasePoint, Symbol};
