pub mod align;
pub mod cli;
pub mod concept;
pub mod error;
pub mod measures;
pub mod media;
pub mod rank;
pub mod scratch;
pub mod synth;

pub use error::{Error, Result};
