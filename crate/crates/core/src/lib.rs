pub mod antichain;
pub mod dimension;
pub mod error;
pub mod ifs;
pub mod measure;
pub mod quantizer;
pub mod reference;
pub mod reproduce;
pub mod table;
pub mod weights;

pub use error::{Error, Result};
