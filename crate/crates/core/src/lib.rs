//! Desk-scale numerical laboratory for a reducible representation of the
//! canonical commutation relations of the quantized electromagnetic field.
//!
//! A single "oscillator" carries a wave function over a finite momentum grid
//! tensored with a two-helicity Fock space; N of them form an ensemble on
//! which collective operators act with 1/sqrt(N) normalization. The right
//! hand side of the CCR is then a nontrivial central operator whose vacuum
//! distribution Z(k) regularizes both ultraviolet and infrared behaviour of
//! field observables. The crate provides:
//!
//! - momentum quadrature and vacuum profiles ([`grid`]),
//! - truncated single-oscillator states and ladder operators ([`oscillator`]),
//! - dense ensembles, collective operators, displacements ([`ensemble`]),
//! - coincidence combinatorics for finite-N correlators and their permanent
//!   limit ([`combinatorics`]),
//! - spinor tetrads, Wigner phases, and covariance checks ([`poincare`]),
//! - field vectors and two-point functions ([`fields`]),
//! - radiation of a classical current and infrared sweeps ([`radiation`]),
//! - reusable residual checks shared by the test suite and the CLI ([`checks`]).

pub mod checks;
pub mod combinatorics;
pub mod config;
pub mod ensemble;
pub mod error;
pub mod fields;
pub mod fourvec;
pub mod grid;
pub mod oscillator;
pub mod poincare;
pub mod radiation;
pub mod stats;

pub use error::{Error, Result};
pub use fourvec::{CFourVector, FourVector};
pub use grid::{
    inner_product_z, GridHandle, GridSpec, Helicity, MomentumGrid, PolarizedAmplitude, ProfileTemplate,
    VacuumProfile,
};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
