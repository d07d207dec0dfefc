pub mod cli;
pub mod error;
pub mod measure;
pub mod moments;
pub mod oracle;
pub mod shift;
pub mod subnormality;
pub mod tree;
pub mod xi;

pub use error::{Error, Result};
