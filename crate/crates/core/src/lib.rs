pub mod cli;
pub mod error;
pub mod fields;
pub mod lgp;
pub mod places;
pub mod springer;
pub mod weierstrass;

pub use error::{Error, Result};
