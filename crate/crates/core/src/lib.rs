pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod flows;
pub mod group;
pub mod mixing;
pub mod random;
pub mod ring;
pub mod schema;
pub mod spectral;

pub use error::{Error, Result};
