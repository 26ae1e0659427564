//! Relative entropy dimensions of subshifts over ℤ and ℤ².

pub mod cli;
pub mod cover;
pub mod dimension;
pub mod error;
pub mod independence;
pub mod joinings;
pub mod lattice;
pub mod par;
pub mod subshift;

pub use error::{Error, Result};
