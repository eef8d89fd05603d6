//! Classical measurement channel: heterodyne sampling, demodulated records,
//! amplitude spectra and histogram SNR.

pub mod io;
pub mod sampler;
pub mod snr;
pub mod spectrum;
pub mod trace;

pub use sampler::{
    amplifier_moments, attenuate, sample_quadrature, sample_quadratures, AmplifierMoments, HusimiSampler,
    QuadratureSample,
};
pub use snr::{coherent_snr_mc, snr_model_coherent, SnrResult};
pub use spectrum::{
    amplitude_spectrum, amplitude_spectrum_windowed, difference_weight, fft_frequencies, thermal_measurement_signal,
    thermal_snr_mc, thermal_spectra, AmplitudeSpectrum, Window,
};
pub use trace::{simulate_thermal_trace, thermal_emitted_photons, trace_length, HeterodyneTrace, QubitLabel};
