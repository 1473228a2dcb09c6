pub mod analysis;
pub mod decentral;
pub mod det;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod gf;
pub mod model;
pub mod rational;

pub use error::{Error, Result};
