//! Finite-element solver for two-dimensional Biot poroelastodynamics in
//! truncated half-spaces, with perfectly matched layers.
//!
//! The pipeline is mesh → materials → stretching → forms → time loop →
//! metrics; [`runner`] wires the stages together from a TOML run
//! configuration.

pub mod error;
pub mod fem;
pub mod forms;
pub mod config;
pub mod materials;
pub mod mesh;
pub mod metrics;
pub mod presets;
pub mod runner;
pub mod sparse;
pub mod stretching;
pub mod timeint;
pub mod vtk;

pub use error::{Error, Result};
