//! Closed-form dynamics of driven, dissipative, coupled quantum harmonic
//! oscillators.
//!
//! The model is a chain of identical oscillators (frequency `ω₀`, nearest
//! neighbour coupling `k`) where every site is mixed with its own reservoir
//! oscillator through a time-dependent coupling `g(t)`, and the first site is
//! driven by a classical field `f(t) e^{-iω_L t}`. Because the Hamiltonian is
//! quadratic and the system and reservoir chains share the same coupling
//! matrix, the Heisenberg-picture operators have closed forms built from
//! `cos G(t)`, `sin G(t)` with `G(t) = ∫₀ᵗ g`, plus oscillatory drive
//! integrals evaluated by [`quadrature`].
//!
//! Units: `ħ = 1` and `k_B = 1`. Energies are reported as occupations
//! `⟨a†a⟩`, i.e. in units of `ħω₀`.
//!
//! Modules:
//! - [`params`]: physical parameters, drive, damping envelope.
//! - [`quadrature`]: adaptive Gauss–Kronrod for oscillatory integrands.
//! - [`pair`]: two oscillators with two reservoirs: coefficients, drive
//!   responses, energies.
//! - [`phase_space`]: Husimi functions, reduced density matrices, populations.
//! - [`chain`]: the `n`-site generalisation.

pub mod chain;
pub mod error;
pub mod pair;
pub mod params;
pub mod phase_space;
pub mod quadrature;
pub mod special;

pub use error::{Error, Result};
pub use params::{DampingEnvelope, DriveSpec, SystemParams};
pub use quadrature::QuadratureConfig;

pub use num_complex::Complex64;
