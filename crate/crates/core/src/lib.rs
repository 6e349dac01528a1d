pub mod cli;
pub mod datagen;
pub mod error;
pub mod experiments;
pub mod margin;
pub mod model;
pub mod oracle;
pub mod quad;
pub mod solver;

pub use error::{Error, Result};
