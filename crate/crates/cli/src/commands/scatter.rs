//! Symmetric two-port cavity detector: spectra and integrated signal.

use std::path::{Path, PathBuf};

use serde::Serialize;

use qreadout::params::{angular, SystemParams};
use qreadout::scatter::{power_spectrum, snr_integrated, write_csv as write_spectrum, Baths, IntegratedSnr, ScatterScene};
use qreadout::Result;

use super::positive;
use crate::config::Reader;
use crate::output::{write_csv, write_json};

pub const SPECTRUM_FILE: &str = "scatter.csv";
pub const INTEGRATED_FILE: &str = "scatter_integrated.json";

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterPlan {
    pub scene: ScatterScene,
}

#[derive(Serialize)]
struct IntegratedOutput<'a> {
    kappa_hz: f64,
    chi_hz: f64,
    chi_over_kappa: f64,
    nbar_hot: f64,
    nbar_cold: f64,
    integrated: &'a IntegratedSnr,
}

impl ScatterPlan {
    pub fn read(r: &mut Reader) -> Self {
        let kappa_hz: f64 = r.or("kappa_hz", 0.5e6);
        positive(r, "kappa_hz", kappa_hz);
        let chi_hz: f64 = r.or("chi_hz", 12.6e6);
        if !chi_hz.is_finite() {
            r.violation("`chi_hz` must be finite");
        }
        let nbar_hot: Option<f64> = r.optional("nbar_hot");
        let nbar_cold: Option<f64> = r.optional("nbar_cold");
        let t_hot: Option<f64> = r.optional("t_hot");
        let t_cold: Option<f64> = r.optional("t_cold");
        let carrier_hz: Option<f64> = r.optional("carrier_hz");
        let baths = match (t_hot, t_cold) {
            (None, None) => {
                if carrier_hz.is_some() {
                    r.violation("`carrier_hz` only applies with `t_hot` and `t_cold`");
                }
                let hot = nbar_hot.unwrap_or(1.0);
                let cold = nbar_cold.unwrap_or(0.0);
                for (key, v) in [("nbar_hot", hot), ("nbar_cold", cold)] {
                    if !(v >= 0.0 && v.is_finite()) {
                        r.violation(format!("`{key}` must be >= 0, got {v}"));
                    }
                }
                Baths::Flat { nbar_hot: hot, nbar_cold: cold }
            }
            (Some(t_hot), Some(t_cold)) => {
                if nbar_hot.is_some() || nbar_cold.is_some() {
                    r.violation("give bath occupancies or bath temperatures, not both");
                }
                let carrier_hz = carrier_hz.unwrap_or(SystemParams::reference_device().cavity_freq_g);
                positive(r, "t_hot", t_hot);
                positive(r, "t_cold", t_cold);
                positive(r, "carrier_hz", carrier_hz);
                Baths::Blackbody { t_hot, t_cold, carrier_hz }
            }
            _ => {
                r.violation("`t_hot` and `t_cold` must be given together");
                Baths::Flat { nbar_hot: 0.0, nbar_cold: 0.0 }
            }
        };
        let points: usize = r.or("points", 2001);
        if points < 2 {
            r.violation("`points` must be at least 2");
        }
        let span_hz: f64 = r.or("span_hz", 2.0 * chi_hz.abs().max(kappa_hz));
        positive(r, "span_hz", span_hz);
        let duration: f64 = r.or("duration", 1e-6);
        positive(r, "duration", duration);
        let scene = ScatterScene {
            kappa: angular(kappa_hz),
            chi: angular(chi_hz),
            detuning_grid: ScatterScene::symmetric_grid(angular(span_hz), points),
            baths,
            duration,
        };
        Self { scene }
    }

    pub fn execute(&self, dir: &Path, hash: &str) -> Result<Vec<PathBuf>> {
        self.scene.validate()?;
        let spectrum = power_spectrum(&self.scene);
        let integrated = snr_integrated(&self.scene);
        let (nbar_hot, nbar_cold) = self.scene.central_occupancies();
        let summary = IntegratedOutput {
            kappa_hz: qreadout::params::hertz(self.scene.kappa),
            chi_hz: qreadout::params::hertz(self.scene.chi),
            chi_over_kappa: self.scene.chi / self.scene.kappa,
            nbar_hot,
            nbar_cold,
            integrated: &integrated,
        };
        Ok(vec![
            write_csv(dir, SPECTRUM_FILE, hash, |w| write_spectrum(w, &spectrum))?,
            write_json(dir, INTEGRATED_FILE, "scatter", hash, &summary)?,
        ])
    }
}
