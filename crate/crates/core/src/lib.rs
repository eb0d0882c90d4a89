//! Combinatorics and mixed-moment engines for type-B′ free probability.

pub mod bprime;
pub mod conv;
pub mod error;
pub mod indep;
pub mod io;
pub mod mk;
pub mod moments;
pub mod ncpart;
pub mod report;
pub mod scalars;
pub mod suites;

pub use error::{Error, Result};
