//! Simulation and analysis of diffusively coupled heterogeneous
//! nonlinear networks over directed graphs.
//!
//! A network of `N` nodes `dx_i/dt = f_i(x_i) + u_i` under the
//! consensus law `u_i = -sigma sum_j l_ij (x_i - x_j)` splits, in the
//! eigenbasis of the graph Laplacian, into a slow averaged unit `x_m`
//! and fast projected synchronization errors `e_v` that contract at a
//! rate proportional to the coupling strength. This crate builds that
//! decomposition, integrates the full, reduced, and boundary-layer
//! dynamics, and verifies the stability signatures of the strongly
//! coupled regime: convergence to the origin when the averaged unit is
//! contractive, and an attracting periodic orbit with period and shape
//! converging to the reduced limit cycle as the coupling grows.
//!
//! Modules map one-to-one onto the pipeline: [`graph`] (Laplacian and
//! spectral split), [`models`] (node vector fields), [`network`]
//! (closed loop and coordinate changes), [`integrate`] (deterministic
//! solvers and events), [`analysis`] (orbits, Floquet multipliers,
//! two-time-scale error bounds, sweeps), [`scenario`] (canned seeded
//! experiments), with [`config`], [`report`], and [`svg`] for the file
//! interfaces.

pub mod analysis;
pub mod config;
pub mod eig;
pub mod error;
pub mod graph;
pub mod integrate;
pub mod models;
pub mod network;
pub mod report;
pub mod sample;
pub mod scenario;
pub mod svg;

pub use error::{Error, Result};
