pub mod cards;
pub mod detector;
pub mod error;
pub mod eval;
pub mod filters;
pub mod image;
pub mod matching;
pub mod morphology;
pub mod regions;
pub mod semantics;
pub mod synth;
pub mod templates;

pub use error::{Error, Result};
