//! Numerical laboratory for the ensemble/thermodynamic derivation of the
//! one-dimensional Schrödinger equation.
//!
//! The crate follows the derivation end to end: momentum moments of a
//! phase-space density and the transport equations they satisfy
//! ([`phase_space`]), the infinitesimal Wigner-Moyal characteristic function
//! ([`wigner_moyal`]), entropy-driven fluctuation formulas and Gibbs entropies
//! ([`equilibrium`]), the Madelung / quantum Hamilton-Jacobi picture with
//! metastable decay ([`schrodinger_madelung`]) and the canonical-ensemble worked
//! example ([`boltzmann`]). Everything sits on the kernel in [`numerics`].

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod numerics;
pub mod units;

pub use error::{Error, Result};
pub use units::Units;
pub mod schrodinger_madelung;
pub mod equilibrium;
pub mod phase_space;
pub mod wigner_moyal;
pub mod boltzmann;
pub mod io;
pub mod families;
pub mod cli;
