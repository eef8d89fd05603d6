//! Physical constants and device parameters.
//!
//! Rates (`chi`, `kappa`) are stored as angular frequencies in rad/s.
//! Carrier and demodulation frequencies are ordinary frequencies in Hz.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

/// Planck constant, J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = PLANCK / TAU;
/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Converts a frequency in Hz to an angular rate in rad/s.
#[inline]
pub fn angular(hz: f64) -> f64 {
    TAU * hz
}

/// Converts an angular rate in rad/s to Hz.
#[inline]
pub fn hertz(angular: f64) -> f64 {
    angular / TAU
}

/// Constants of the qubit–cavity device and the detection chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Dispersive shift χ, rad/s.
    pub chi: f64,
    /// Cavity energy decay rate κ, rad/s.
    pub kappa: f64,
    /// Cavity frequency with the qubit in |g⟩, Hz.
    pub cavity_freq_g: f64,
    /// Cavity frequency with the qubit in |e⟩, Hz.
    pub cavity_freq_e: f64,
    /// Qubit transition frequency, Hz.
    pub qubit_freq: f64,
    /// Demodulated offset of the |g⟩ resonance, Hz.
    pub demod_offset_g: f64,
    /// Demodulated offset of the |e⟩ resonance, Hz.
    pub demod_offset_e: f64,
    /// Digitizer sample rate, Hz.
    pub sample_rate: f64,
    /// Amplitude detection efficiency η.
    pub eta: f64,
}

impl SystemParams {
    /// The transmon/3D-cavity device: χ/2π = −6.3 MHz, κ/2π = 0.5 MHz,
    /// resonances at 5.6185 and 5.6060 GHz, thermal demodulation 20 MHz
    /// above the |g⟩ resonance, sampled at 100 MS/s.
    pub fn reference_device() -> Self {
        Self {
            chi: angular(-6.3e6),
            kappa: angular(0.5e6),
            cavity_freq_g: 5.6185e9,
            cavity_freq_e: 5.6060e9,
            qubit_freq: 5.122e9,
            demod_offset_g: 20.0e6,
            demod_offset_e: 32.5e6,
            sample_rate: 100.0e6,
            eta: 1.0,
        }
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.sample_rate
    }
}

impl Default for SystemParams {
    fn default() -> Self {
        Self::reference_device()
    }
}
