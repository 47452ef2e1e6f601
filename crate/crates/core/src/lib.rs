//! Simulation and closed-form analysis of a two-level system swept through an
//! avoided crossing while driven longitudinally (RF) and transversely (MW).
//!
//! Layout:
//!
//! * [`specfun`]: Bessel, Fresnel, complex log-gamma, Stokes phase and
//!   parabolic-cylinder (Weber) functions.
//! * [`model`]: drive parameters, field vector, Hamiltonian and harmonic
//!   bookkeeping.
//! * [`integrate`]: adaptive Runge-Kutta propagation of the Schrödinger and
//!   Bloch equations.
//! * [`analytic`]: strong- and weak-drive transition probabilities,
//!   Caley-Klein parameters, zero-field special cases.
//! * [`blochpert`]: perturbative Bloch-vector solutions and the L/M kernel
//!   algebra.
//! * [`harness`]: config parsing, trace/sweep/compare runners, CSV and JSON
//!   export.
//!
//! All energies and frequencies are dimensionless in units of `sqrt(v)`, and
//! time is `tau = t * sqrt(v)`.

pub mod analytic;
pub mod blochpert;
pub mod error;
pub mod harness;
pub mod integrate;
pub mod model;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64;
