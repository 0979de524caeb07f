pub mod bounds;
pub mod cli;
pub mod codes;
pub mod decoder;
pub mod enumerators;
pub mod error;
pub mod exec;
pub mod gf;
pub mod montecarlo;
pub mod numeric;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
