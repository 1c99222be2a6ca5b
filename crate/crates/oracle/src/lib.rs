//! Brute-force reference engines for the closed forms in `osc-core`.
//!
//! - [`mode_ode`]: integrates the linear Heisenberg equations for the mode
//!   operators with fixed-step RK4.
//! - [`fock`]: propagates a pure state in a truncated Fock space, with
//!   partial traces and Husimi extraction.
//! - [`contour`]: Taylor coefficients of analytic functions of two variables
//!   by discrete Cauchy integrals.
//! - [`operators`]: truncated ladder operators for identity checks.
//!
//! These are slow by design and exist to certify the analytic results.

pub mod contour;
pub mod error;
pub mod fock;
pub mod mode_ode;
pub mod operators;

pub use error::{OracleError, Result};
pub use fock::{fock_evolve, husimi_from_state, husimi_from_state_multimode, partial_trace, FockState};
pub use mode_ode::{linear_mode_oracle, linear_mode_trajectory, ModeODEState, StepConfig};
