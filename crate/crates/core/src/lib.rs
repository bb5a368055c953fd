pub mod bank;
pub mod constants;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod norms;
pub mod oracle;
pub mod operators;
pub mod theorems;
pub mod verify;

pub use error::{Error, Result};
