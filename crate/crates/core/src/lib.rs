//! Exact harmonic and wavelet analysis of signals on the 3D ball.

pub mod dd;
pub mod error;
pub mod flag_transform;
pub mod flaglet_transform;
pub mod format;
pub mod fourier_bessel;
pub mod quadrature;
pub mod radial_laguerre;
pub mod sphere_harmonics;
pub mod tiling;
pub mod voidfinder;

pub use error::{Error, Result};
