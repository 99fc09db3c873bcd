//! Symbolic verification and construction of Darboux–Manakov–Zakharov (DMZ)
//! systems, their gauge orbits, exact solutions of the three-wave resonant
//! interaction equations, and semi-Hamiltonian systems of hydrodynamic type.
//!
//! The crate is layered bottom-up:
//!
//! - [`symkernel`] exact expressions, canonical rational forms, zero testing
//! - [`geometry`] vector fields, distributions, derived flags
//! - [`jets`] contact distributions, prolongation, pushforward
//! - [`dmz`] DMZ/GDMZ systems, involutivity, Lamé potentials, construction
//! - [`gauge`] gauge transformations and their invariants
//! - [`waves`] n-wave and modified n-wave residuals, Lamé systems
//! - [`hydro`] hydrodynamic-type systems, commuting flows, hodograph solver
//! - [`sysfile`] and [`cli`] the text system-file format and command runner

pub mod cli;
pub mod dmz;
pub mod gauge;
pub mod geometry;
pub mod hydro;
pub mod jets;
pub mod linalg;
pub mod residual;
pub mod symkernel;
pub mod sysfile;
pub mod waves;

pub use symkernel::{Expr, Verdict, ZeroTest};
