pub mod error;
pub mod cones;
pub mod linalg;
pub mod ortho;
pub mod spaces;
pub mod support;
pub mod decomp;
pub mod harness;
pub mod spec_file;

pub use error::{Error, Result};
pub use linalg::{Matrix, Vector};
