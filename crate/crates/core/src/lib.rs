pub mod axb;
pub mod error;
pub mod halfplane;
pub mod jordan;
pub mod kernel_lab;
pub mod lie;
pub mod linalg;
pub mod modular;
pub mod quad;
pub mod report;
pub mod spectral;
pub mod suite;
pub mod tube;

pub use error::{Error, Result};
