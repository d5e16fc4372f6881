pub mod error;
pub mod fields;
pub mod irreddetect;
pub mod polyexpr;
pub mod projgeom;
pub mod slicestats;
pub mod variety;

pub use error::{Error, Result};
