//! Madelung-Bohm analysis of stationary hydrogen states and of the
//! accelerating Airy free-particle packet.
//!
//! The crate evaluates closed-form eigenfunctions, forms the Bohm and
//! quantum potentials, quantum accelerations, probability currents and the
//! hydrodynamic residuals, and packages verification campaigns as
//! [`report::VerificationReport`]s.

pub mod airy;
pub mod campaign;
pub mod error;
pub mod grid;
pub mod hydrogen;
pub mod madelung;
pub mod quadrature;
pub mod quantum_numbers;
pub mod report;
pub mod specfun;
pub mod units;

pub use error::{Error, Result};
pub use grid::{make_radial_grid, AxisGrid, RadialGrid, SpacingLaw};
pub use quantum_numbers::{validate, QuantumNumbers};
pub use units::{atomic_units, PhysicalConstants, UnitSystem};
