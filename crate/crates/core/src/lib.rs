//! Finite-volume solver for the isotropic mixed 3- and 4-wave kinetic
//! equation of a Bose gas thermal cloud.
//!
//! The unknowns are cell masses `N_i` on a truncated frequency mesh
//! `[omega_min, R]`. The collision operator couples cells through resonance
//! index sets (pivot sums, differences and shifted sums landing in a cell)
//! and is advanced in time with a fixed-step explicit integrator.
//!
//! * [`kernels`]: dispersion law `omega = |k|^rho` and the kernels `K1..K7`.
//! * [`mesh`]: grid, cell location and resonance index sets.
//! * [`collision`]: the seventeen-term discrete operator `J(N)`.
//! * [`oracle`]: exhaustive reference evaluation of `J(N)`.
//! * [`simulation`]: initial data, time stepping, observables.
//! * [`consistency`]: exact fluxes by quadrature and the residual study.
//! * [`config`], [`commands`]: key-value configuration and CLI drivers.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod collision;
pub mod commands;
pub mod config;
pub mod consistency;
pub mod error;
pub mod kernels;
pub mod mesh;
pub mod oracle;
pub mod simulation;

pub use collision::{Blocks, CollisionOperator, CrossGainArgument};
pub use error::{Error, Result};
pub use kernels::{Dispersion, KernelParams, Kernels};
pub use mesh::{Grid, IndexTables};
pub use simulation::{run, InitialCondition, Integrator, SimConfig};
