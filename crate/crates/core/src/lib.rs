//! Pseudo-spectral Faedo-Galerkin solver for the compressible Navier-Stokes-Poisson
//! system on the periodic torus, with energy/entropy diagnostics and a
//! regularization-limit sweep harness.

pub mod cli;
pub mod config;
pub mod continuity;
pub mod diagnostics;
pub mod error;
pub mod galerkin;
pub mod io;
pub mod poisson;
pub mod pressure;
pub mod quadrature;
pub mod sweep;
pub mod torus;

pub use error::{Error, Result};
