pub mod bounds;
pub mod cli;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod model;
pub mod robust;
pub mod sim;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
