//! Decision procedures for interpolant, explicit definition and referring
//! expression existence in description logics with nominals and/or role
//! inclusions, with witnesses for negative answers.

pub mod bits;
pub mod coherence;
pub mod decide;
pub mod error;
pub mod fixtures;
pub mod mosaic;
pub mod oracles;
pub mod satcheck;
pub mod semantics;
pub mod syntax;

pub use error::{Error, Result};
