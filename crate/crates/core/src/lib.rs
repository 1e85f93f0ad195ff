pub mod classifier;
pub mod codebook;
pub mod config;
pub mod dataset;
pub mod descriptor;
pub mod encoding;
pub mod error;
pub mod experiment;
pub mod model_io;
pub mod pipeline;
pub mod shape_io;
pub mod skeleton;
pub mod synth;

pub use error::{Error, Result};
