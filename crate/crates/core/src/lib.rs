pub mod bounds;
pub mod complex;
pub mod contraction;
pub mod cube;
pub mod error;
pub mod experiment;
pub mod homology;
pub mod parallel;
pub mod rng;
pub mod stats;
pub mod unionfind;
pub mod witness;

pub use error::{Error, Result};
