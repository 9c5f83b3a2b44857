pub mod cli;
pub mod dynamics;
pub mod error;
pub mod families;
pub mod intset;
mod parse;
pub mod points;
pub mod subshift;

pub use error::{Error, Result};
pub use parse::parse_vector;
