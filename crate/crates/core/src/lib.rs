//! Detection, linking and mobility estimation for round objects in frame
//! sequences, plus a synthetic benchmark.

pub mod config;
pub mod detection;
pub mod error;
pub mod imaging;
pub mod linking;
pub mod output;
pub mod pipeline;
pub mod run;
pub mod synthbench;
pub mod trajectory;

pub use error::{Error, Result};
