//! Numerical workbench for vacuum-field electrodynamics.
//!
//! The crate is organised by physical subsystem: [`grid`] carries the
//! discrete calculus, [`particle`] the point-charge models, [`fields`] the
//! canonical Maxwell evolution, [`radiation`] the self-force series,
//! [`reduction`] the bracket algebras, [`fock`] the coherent-state
//! linearization and [`quantum`] the 1-D wave solvers.

pub mod error;
pub mod fields;
pub mod fock;
pub mod grid;
pub mod particle;
pub mod quantum;
pub mod radiation;
pub mod reduction;
pub mod units;

pub use error::*;
pub use grid::{Grid3, ScalarField, VectorField};
pub use units::Units;
