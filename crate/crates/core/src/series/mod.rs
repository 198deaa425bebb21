mod formal;
mod radius;
mod truncated;

pub use formal::*;
pub use radius::*;
pub use truncated::*;
