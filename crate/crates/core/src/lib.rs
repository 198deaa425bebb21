pub mod continuation;
pub mod error;
pub mod num;
pub mod poly;
pub mod rootwork;
pub mod series;
pub mod symbols;
pub mod taxonomy;

pub use error::{Error, Result};
