pub mod deloc;
pub mod densela;
pub mod ensembles;
pub mod error;
pub mod harness;
pub mod rng;
pub mod smallball;
pub mod structure;

pub use error::{Error, Result};
