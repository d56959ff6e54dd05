pub mod bracket;
pub mod cli;
pub mod error;
pub mod flows;
pub mod fox;
pub mod function;
pub mod homology;
pub mod intersection;
pub mod lie;
pub mod persistence;
pub mod linalg;
pub mod rep;
pub mod strata;

pub use error::{Error, Result};
