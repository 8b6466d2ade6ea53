//! Exact Hochschild and cyclic homology of small linear and dg categories.

pub mod chain;
pub mod charclass;
pub mod error;
pub mod field;
pub mod hochschild;
pub mod io;
pub mod linalg;
pub mod mixed;
pub mod module;
pub mod presentation;
pub mod resolution;
pub mod workbench;
pub mod zoo;

pub use error::{Error, Result};
pub use field::{Field, FieldElement};
