//! Exact root-datum equivalence over `Z[1/p]` and the representation theory
//! of perfected `SL2`.

pub mod error;
pub mod lattice;
pub mod rootdata;
pub mod scalars;
pub mod sl2_classical;
pub mod sl2_perfect;
pub mod zp_equiv;

pub use error::{Error, Result};
