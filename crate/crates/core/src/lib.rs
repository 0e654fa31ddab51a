//! Switching gradient methods for `min f(w) s.t. g(w) <= 0`.

pub mod analysis;
pub mod error;
pub mod harness;
pub mod io;
pub mod oracle;
pub mod problem;
pub mod solvers;
pub mod switching;

pub use error::{Error, Result};
