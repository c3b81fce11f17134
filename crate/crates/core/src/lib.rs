pub mod error;
pub mod geometry;
pub mod io;
pub mod mcmc;
pub mod observables;
pub mod sampler;
pub mod stats;
pub mod study;
pub mod verify;

pub use error::{Error, Result};
