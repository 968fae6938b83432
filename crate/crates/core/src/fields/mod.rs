//! Field operations: covariant derivatives, curvature, currents, pointwise
//! frame components, charge handling and gridded states.

pub mod components;
pub mod norms;
pub mod ops;
pub mod snapshot;
pub mod split;
pub mod state;
