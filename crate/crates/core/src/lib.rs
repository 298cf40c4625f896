pub mod certificates;
pub mod dynamics;
pub mod error;
pub mod kummer2;
pub mod multitree;
pub mod qpoly;
pub mod wreath;

pub use error::{Error, Result};
