//! Photon-number calibration: spectrum fits, saturation fits and
//! emitted-photon integration, on measured or synthetic data.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use qreadout::calib::{
    add_gaussian_noise, emitted_photons, fit_saturation, fit_spectrum, read_photon_series_csv, read_saturation_csv,
    read_spectrum_csv, saturation_model, synth_spectrum, FitReport, LinewidthMode, PhotonDistribution, SpectrumFixed,
    SpectrumModel,
};
use qreadout::params::angular;
use qreadout::Result;

use super::{non_negative_grid, positive};
use crate::config::{Grid, Reader};
use crate::output::{cell, write_csv, write_json};

pub const SPECTRUM_JSON: &str = "calibrate_spectrum.json";
pub const SPECTRUM_CSV: &str = "calibrate_spectrum.csv";
pub const SPECTRUM_CSV_HEADER: &str = "freq_hz,data,fit";
pub const SATURATION_JSON: &str = "calibrate_saturation.json";
pub const PHOTONS_JSON: &str = "calibrate_photons.json";

/// Synthetic integrated intensity of generated spectra.
const SYNTHETIC_AMPLITUDE: f64 = 1.0e6;

/// Where the data come from.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    File(PathBuf),
    /// Generated from the stated truth, plus noise of relative size `noise`.
    Synthetic { noise: f64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTask {
    pub fixed: SpectrumFixed,
    pub init: SpectrumModel,
    /// Used for synthetic data only.
    pub truth: SpectrumModel,
    pub freq_grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaturationTask {
    pub a: f64,
    pub b: f64,
    pub p_grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CalibrateTask {
    Spectrum(SpectrumTask),
    Saturation(SaturationTask),
    Photons { kappa: f64, two_resonance: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibratePlan {
    pub task: CalibrateTask,
    pub data: DataSource,
}

fn distribution(name: &str, nbar: f64) -> std::result::Result<PhotonDistribution, String> {
    match name.trim().to_ascii_lowercase().as_str() {
        "poisson" => Ok(PhotonDistribution::Poisson { nbar }),
        "geometric" | "thermal" => Ok(PhotonDistribution::Geometric { nbar }),
        other => Err(format!("expected poisson or geometric, got `{other}`")),
    }
}

/// Linewidth mode by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mode(pub LinewidthMode);

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "thermal_on" => Ok(Self(LinewidthMode::ThermalOn)),
            "thermal_off" => Ok(Self(LinewidthMode::ThermalOff)),
            "coherent" => Ok(Self(LinewidthMode::Coherent)),
            other => Err(format!("expected thermal_on, thermal_off or coherent, got `{other}`")),
        }
    }
}

fn read_spectrum_task(r: &mut Reader, synthetic: bool) -> SpectrumTask {
    let peak_spacing: f64 = r.or("peak_spacing_hz", -12.6e6);
    if !(peak_spacing != 0.0 && peak_spacing.is_finite()) {
        r.violation("`peak_spacing_hz` must be non-zero");
    }
    let kappa_hz: f64 = r.or("kappa_hz", 0.5e6);
    positive(r, "kappa_hz", kappa_hz);
    let n_max: usize = r.or("n_max", 40);
    let dist_name: String = r.or("distribution", "poisson".to_string());
    let dist = distribution(&dist_name, 1.0).unwrap_or_else(|e| {
        r.violation(format!("`distribution`: {e}"));
        PhotonDistribution::Poisson { nbar: 1.0 }
    });
    let mode = r.or("linewidth_mode", Mode(LinewidthMode::Coherent)).0;
    let init_nbar: f64 = r.or("init_nbar", 1.0);
    let init_gamma: f64 = r.or("init_gamma_hz", 1.5e6);
    positive(r, "init_gamma_hz", init_gamma);
    if !(init_nbar >= 0.0) {
        r.violation(format!("`init_nbar` must be >= 0, got {init_nbar}"));
    }
    let init = SpectrumModel {
        peak_spacing,
        gamma_intrinsic: init_gamma,
        linewidth_mode: mode,
        distribution: dist.with_nbar(init_nbar),
        amplitude: SYNTHETIC_AMPLITUDE,
    };
    let mut truth = init;
    let mut freq_grid = Vec::new();
    if synthetic {
        let true_nbar: f64 = r.or("true_nbar", 1.5);
        if !(true_nbar >= 0.0) {
            r.violation(format!("`true_nbar` must be >= 0, got {true_nbar}"));
        }
        let gamma: f64 = r.or("gamma_hz", 0.8e6);
        positive(r, "gamma_hz", gamma);
        truth = SpectrumModel { gamma_intrinsic: gamma, distribution: dist.with_nbar(true_nbar), ..init };
        freq_grid = r.or("freq_grid", Grid("-110e6:10e6:0.1e6".parse::<Grid>().expect("valid default").0)).0;
    }
    SpectrumTask { fixed: SpectrumFixed { peak_spacing, kappa: angular(kappa_hz), n_max }, init, truth, freq_grid }
}

impl CalibratePlan {
    pub fn read(r: &mut Reader) -> Self {
        let kind: String = r.or("kind", "spectrum".to_string());
        let input: Option<PathBuf> = r.optional("input");
        let synthetic = input.is_none();
        let task = match kind.trim().to_ascii_lowercase().as_str() {
            "spectrum" => CalibrateTask::Spectrum(read_spectrum_task(r, synthetic)),
            "saturation" => {
                let (mut a, mut b, mut p_grid) = (10.0, 0.3, Vec::new());
                if synthetic {
                    a = r.or("a", a);
                    b = r.or("b", b);
                    positive(r, "a", a);
                    positive(r, "b", b);
                    p_grid = r.or("p_grid", Grid("0.04:0.6:0.04".parse::<Grid>().expect("valid default").0)).0;
                    non_negative_grid(r, "p_grid", &p_grid);
                }
                CalibrateTask::Saturation(SaturationTask { a, b, p_grid })
            }
            "photons" => {
                if synthetic {
                    r.violation("`kind = photons` needs an `input` photon-number series");
                }
                let kappa_hz: f64 = r.or("kappa_hz", 0.5e6);
                positive(r, "kappa_hz", kappa_hz);
                CalibrateTask::Photons { kappa: angular(kappa_hz), two_resonance: r.or("two_resonance", false) }
            }
            other => {
                r.violation(format!("`kind`: expected spectrum, saturation or photons, got `{other}`"));
                CalibrateTask::Photons { kappa: 1.0, two_resonance: false }
            }
        };
        let data = match input {
            Some(path) => DataSource::File(path),
            None if matches!(task, CalibrateTask::Photons { .. }) => DataSource::Synthetic { noise: 0.0, seed: 0 },
            None => {
                let noise: f64 = r.or("noise", 0.02);
                if !(noise >= 0.0 && noise.is_finite()) {
                    r.violation(format!("`noise` must be >= 0, got {noise}"));
                }
                let seed = if noise > 0.0 {
                    r.required("seed", "noisy synthetic data need an explicit seed").unwrap_or(0)
                } else {
                    r.optional("seed").unwrap_or(0)
                };
                DataSource::Synthetic { noise, seed }
            }
        };
        Self { task, data }
    }

    fn open(path: &Path) -> Result<BufReader<File>> {
        Ok(BufReader::new(File::open(path)?))
    }

    pub fn execute(&self, dir: &Path, hash: &str) -> Result<Vec<PathBuf>> {
        match &self.task {
            CalibrateTask::Spectrum(task) => self.run_spectrum(task, dir, hash),
            CalibrateTask::Saturation(task) => self.run_saturation(task, dir, hash),
            CalibrateTask::Photons { kappa, two_resonance } => {
                let DataSource::File(path) = &self.data else {
                    return Err(qreadout::Error::Config("photon integration needs an input series".into()));
                };
                let series = read_photon_series_csv(Self::open(path)?)?;
                let n_emit = emitted_photons(&series, *kappa, *two_resonance)?;
                let out = PhotonsOutput { samples: series.n_c.len(), dt: series.dt, two_resonance: *two_resonance, n_emit };
                Ok(vec![write_json(dir, PHOTONS_JSON, "calibrate", hash, &out)?])
            }
        }
    }

    /// Spectrum data and, for synthetic runs, the true photon number.
    pub fn spectrum_data(&self, task: &SpectrumTask) -> Result<(Vec<f64>, Vec<f64>, Option<f64>)> {
        match &self.data {
            DataSource::File(path) => {
                let (grid, data) = read_spectrum_csv(Self::open(path)?)?;
                Ok((grid, data, None))
            }
            DataSource::Synthetic { noise, seed } => {
                let clean = synth_spectrum(&task.truth, &task.freq_grid, task.fixed.n_max, task.fixed.kappa)?;
                let peak = clean.iter().cloned().fold(0.0, f64::max);
                let data = add_gaussian_noise(&clean, noise * peak, *seed)?;
                Ok((task.freq_grid.clone(), data, Some(task.truth.distribution.nbar())))
            }
        }
    }

    fn run_spectrum(&self, task: &SpectrumTask, dir: &Path, hash: &str) -> Result<Vec<PathBuf>> {
        let (grid, data, true_nbar) = self.spectrum_data(task)?;
        let (model, report) = fit_spectrum(&data, &grid, task.fixed, &task.init)?;
        let fit = synth_spectrum(&model, &grid, task.fixed.n_max, task.fixed.kappa)?;
        let out = SpectrumOutput { model, true_nbar, report };
        Ok(vec![
            write_json(dir, SPECTRUM_JSON, "calibrate", hash, &out)?,
            write_csv(dir, SPECTRUM_CSV, hash, |w| {
                writeln!(w, "{SPECTRUM_CSV_HEADER}")?;
                for ((f, d), m) in grid.iter().zip(&data).zip(&fit) {
                    writeln!(w, "{f},{},{}", cell(Some(*d)), cell(Some(*m)))?;
                }
                Ok(())
            })?,
        ])
    }

    fn run_saturation(&self, task: &SaturationTask, dir: &Path, hash: &str) -> Result<Vec<PathBuf>> {
        let (p_in, n_emit, truth) = match &self.data {
            DataSource::File(path) => {
                let (p, n) = read_saturation_csv(Self::open(path)?)?;
                (p, n, None)
            }
            DataSource::Synthetic { noise, seed } => {
                let clean: Vec<f64> = task.p_grid.iter().map(|p| saturation_model(*p, task.a, task.b)).collect();
                let top = clean.iter().cloned().fold(0.0, f64::max);
                (task.p_grid.clone(), add_gaussian_noise(&clean, noise * top, *seed)?, Some((task.a, task.b)))
            }
        };
        let fit = fit_saturation(&p_in, &n_emit)?;
        let out = SaturationOutput {
            a: fit.a,
            b: fit.b,
            slope: fit.slope,
            curvature: fit.curvature,
            true_a: truth.map(|t| t.0),
            true_b: truth.map(|t| t.1),
            report: fit.report,
        };
        Ok(vec![write_json(dir, SATURATION_JSON, "calibrate", hash, &out)?])
    }
}

#[derive(Serialize)]
struct SpectrumOutput {
    model: SpectrumModel,
    true_nbar: Option<f64>,
    report: FitReport,
}

#[derive(Serialize)]
struct SaturationOutput {
    a: Option<f64>,
    b: Option<f64>,
    slope: f64,
    curvature: f64,
    true_a: Option<f64>,
    true_b: Option<f64>,
    report: FitReport,
}

#[derive(Serialize)]
struct PhotonsOutput {
    samples: usize,
    dt: f64,
    two_resonance: bool,
    n_emit: f64,
}
