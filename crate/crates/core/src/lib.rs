pub mod check;
pub mod cli;
pub mod error;
pub mod fibration;
pub mod geodesic;
pub mod involution;
pub mod io;
pub mod linalg;
pub mod polar;
pub mod projection;
pub mod sample;
pub mod suite;

pub use error::{Error, Result};
