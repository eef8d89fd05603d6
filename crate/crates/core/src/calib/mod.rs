//! Photon-number calibration: ac-Stark-split spectrum synthesis and
//! fitting, emitted-photon integration and the drive-saturation fit.

pub mod lm;
pub mod noise;
pub mod report;
pub mod saturation;
pub mod series;
pub mod spectrum;

pub use lm::{levenberg_marquardt, LmSolution, MAX_ITERATIONS, RELATIVE_STEP_TOLERANCE};
pub use noise::{add_gaussian_noise, NOISE_STREAM};
pub use report::FitReport;
pub use saturation::{fit_saturation, saturation_model, SaturationFit};
pub use series::{
    emitted_photons, read_photon_series_csv, read_saturation_csv, read_spectrum_csv, PhotonSeries, DEFAULT_SERIES_DT,
};
pub use spectrum::{
    fit_spectrum, fwhm_to_sigma, linewidth, synth_spectrum, synth_spectrum_with_tail, LinewidthMode,
    PhotonDistribution, SpectrumFixed, SpectrumModel,
};
