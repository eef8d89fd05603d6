//! Monte-Carlo readout SNR against emitted photons.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use qreadout::heterodyne::{coherent_snr_mc, snr_model_coherent, thermal_snr_mc, SnrResult};
use qreadout::params::SystemParams;
use qreadout::rng::derive_seed;
use qreadout::Result;

use super::{non_negative_grid, positive};
use crate::config::{Grid, Reader};
use crate::output::{cell, write_csv};

pub const FILE: &str = "snr.csv";
pub const HEADER: &str = "n_emit,family,eta,snr,snr_model,center_g,center_e,sigma_g,sigma_e";

/// Which sources to simulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnrSource {
    Coherent,
    Thermal,
    Both,
}

impl FromStr for SnrSource {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "coherent" => Ok(Self::Coherent),
            "thermal" => Ok(Self::Thermal),
            "both" => Ok(Self::Both),
            other => Err(format!("expected coherent, thermal or both, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnrPlan {
    pub source: SnrSource,
    pub n_grid: Vec<f64>,
    pub eta: f64,
    pub shots: usize,
    pub thermal_shots: usize,
    pub duration: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnrRow {
    pub n_emit: f64,
    pub family: &'static str,
    pub result: SnrResult,
    pub model: Option<f64>,
}

impl SnrPlan {
    pub fn read(r: &mut Reader) -> Self {
        let source = r.or("source", SnrSource::Both);
        let n_grid = r.or("n_grid", Grid(vec![1.0, 2.0, 4.0, 8.0])).0;
        non_negative_grid(r, "n_grid", &n_grid);
        let eta: f64 = r.or("eta", 1.0);
        if !(eta > 0.0 && eta <= 1.0) {
            r.violation(format!("`eta` must lie in (0, 1], got {eta}"));
        }
        let shots: usize = r.or("shots", 10_000);
        let thermal_shots: usize = r.or("thermal_shots", 2_000);
        for (key, value) in [("shots", shots), ("thermal_shots", thermal_shots)] {
            if value < 100 {
                r.violation(format!("`{key}` must be at least 100, got {value}"));
            }
        }
        let duration: f64 = r.or("duration", 2e-6);
        positive(r, "duration", duration);
        let seed = r.required("seed", "Monte-Carlo runs need an explicit seed").unwrap_or(0);
        Self { source, n_grid, eta, shots, thermal_shots, duration, seed }
    }

    pub fn rows(&self) -> Result<Vec<SnrRow>> {
        let params = SystemParams { eta: self.eta, ..SystemParams::reference_device() };
        let mut rows = Vec::new();
        for (i, &n) in self.n_grid.iter().enumerate() {
            let seed = derive_seed(self.seed, i as u64);
            if self.source != SnrSource::Thermal {
                rows.push(SnrRow {
                    n_emit: n,
                    family: "coherent",
                    result: coherent_snr_mc(n, self.eta, self.shots, seed)?,
                    model: Some(snr_model_coherent(n, self.eta)),
                });
            }
            if self.source != SnrSource::Coherent {
                // two resonances each emit n̄κT photons
                let nbar = n / (2.0 * params.kappa * self.duration);
                rows.push(SnrRow {
                    n_emit: n,
                    family: "thermal",
                    result: thermal_snr_mc(nbar, self.duration, &params, self.thermal_shots, seed)?,
                    model: None,
                });
            }
        }
        Ok(rows)
    }

    pub fn execute(&self, dir: &Path, hash: &str) -> Result<Vec<PathBuf>> {
        let rows = self.rows()?;
        let path = write_csv(dir, FILE, hash, |w| {
            writeln!(w, "{HEADER}")?;
            for row in &rows {
                let s = &row.result;
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{}",
                    row.n_emit,
                    row.family,
                    self.eta,
                    cell(Some(s.snr)),
                    cell(row.model),
                    cell(Some(s.center_g)),
                    cell(Some(s.center_e)),
                    cell(Some(s.sigma_g)),
                    cell(Some(s.sigma_e))
                )?;
            }
            Ok(())
        })?;
        Ok(vec![path])
    }
}
