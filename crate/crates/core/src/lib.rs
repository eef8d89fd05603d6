//! Simulation and analysis of dispersive qubit readout with coherent,
//! thermal and single-photon probe light.
//!
//! The crate is organised bottom-up:
//!
//! - [`fock`]: truncated Fock-space states, tensor products, partial traces,
//!   entropies and Fock-basis dephasing.
//! - [`sources`]: the three probe channels acting on a qubit, measurement
//!   backaction and the literature dephasing rates.
//! - [`heterodyne`]: Monte-Carlo heterodyne detection, I/Q and spectral
//!   processing, and SNR extraction.
//! - [`thermo`]: field entropy, qubit–field mutual information and erasure cost.
//! - [`scatter`]: the symmetric two-port cavity detector driven by two thermal baths.
//! - [`calib`]: ac-Stark spectrum synthesis and fitting, emitted-photon
//!   integration and the saturation model.

pub mod calib;
pub mod error;
pub mod fock;
pub mod heterodyne;
pub mod params;
pub mod rng;
pub mod scatter;
pub mod sources;
pub mod thermo;

pub use error::{Error, Result};
pub use num_complex::Complex64;
