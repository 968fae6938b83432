pub mod identity;
pub mod stress;
pub mod surfaces;
