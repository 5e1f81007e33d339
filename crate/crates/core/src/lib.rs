//! Exact lattice computations and asymptotic rate functions for kissing
//! configurations of the cross-polytope (the unit ℓ¹ ball).

pub mod error;
pub mod exact;
pub mod kissing;
pub mod lattice;
pub mod rates;
pub mod reproduce;

pub use error::{Error, Result};
