//! Linear and nonlinear analysis of a two-phase fluid model: an isothermal
//! damped Euler phase coupled through drag to a viscous compressible phase.

pub mod asymptotics;
pub mod cli;
pub mod convolve;
pub mod error;
pub mod evolve;
pub mod fft3;
pub mod fit;
pub mod green;
pub mod linalg;
pub mod model;
pub mod quad;
pub mod spectral;
pub mod waves;

pub use error::{Error, Result};
pub use model::{derive, DerivedParams, ModelParams};
