//! Lie and covariant derivatives along Poincaré generators and the exact
//! commutation identities they satisfy.

pub mod commutators;
pub mod manufactured;
pub mod null_lie;
pub mod refinement;
