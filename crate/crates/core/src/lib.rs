//! Lattice six-vertex regularization of the sine-Gordon model: exact
//! finite-chain operators, Bethe Ansatz solutions, continuum observables and
//! power-law scaling fits.

pub mod bethe;
pub mod checks;
pub mod continuum;
pub mod error;
pub mod exec;
pub mod io;
pub mod params;
pub mod scaling;
pub mod spectra;
pub mod vertex;

pub use error::{Error, Result};
pub use exec::Execution;
pub use params::ModelParams;
