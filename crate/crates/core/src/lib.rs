//! Numerical laboratory for the massive Maxwell–Klein–Gordon system on
//! Minkowski space: frames and generators, field algebra, commutator
//! identities, stress-energy and energy identities, evolution engines and
//! decay diagnostics.

pub mod algebra;
pub mod calculus;
pub mod decaylab;
pub mod energies;
pub mod error;
pub mod exec;
pub mod fields;
pub mod geometry;
pub mod grid;
pub mod gridcalc;
pub mod identities;
pub mod jet;
pub mod pipeline;
pub mod quadrature;
pub mod solver;
pub mod symmetries;

pub use error::{Error, Result};
