//! Qubit coherence after each probe source, against emitted photons.

use std::path::{Path, PathBuf};

use qreadout::fock::{DensityMatrix, TruncationPolicy};
use qreadout::sources::{
    apply_source, coherence_curve, qubit_coherence, thermal_coherence_repeated_map, SourceKind, SourceSpec,
};
use qreadout::Result;

use super::{non_negative_grid, positive};
use crate::config::{Grid, Reader};
use crate::output::{cell, write_csv};

pub const FILE: &str = "backaction.csv";
pub const HEADER: &str =
    "n_emit,coherence_coherent,coherence_thermal,coherence_single_photon,model_exponential,model_single_photon";

const TAIL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct BackactionPlan {
    pub n_grid: Vec<f64>,
    pub n_cells: u64,
    pub dim: Option<usize>,
}

impl Default for BackactionPlan {
    fn default() -> Self {
        Self { n_grid: "0:8:0.5".parse::<Grid>().expect("valid default").0, n_cells: 10_000, dim: None }
    }
}

/// One row of the coherence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackactionRow {
    pub n_emit: f64,
    pub coherent: f64,
    pub thermal: f64,
    /// Absent above one photon, where no single-photon state exists.
    pub single_photon: Option<f64>,
    pub model_exponential: f64,
    pub model_single_photon: Option<f64>,
}

/// Smallest cutoff holding a coherent state of `n` photons to `1e−12`.
fn coherent_dim(n: f64) -> usize {
    (n + 12.0 * n.sqrt() + 24.0).ceil() as usize
}

/// Smallest cutoff holding a thermal mode of `nbar` photons to `1e−12`.
fn thermal_dim(nbar: f64) -> usize {
    if nbar <= 0.0 {
        return 2;
    }
    let q = nbar / (1.0 + nbar);
    ((TAIL_TOLERANCE.ln() / q.ln()).ceil() as usize + 1).max(2)
}

impl BackactionPlan {
    pub fn read(r: &mut Reader) -> Self {
        let d = Self::default();
        let n_grid = r.or("n_grid", Grid(d.n_grid)).0;
        non_negative_grid(r, "n_grid", &n_grid);
        let n_cells: u64 = r.or("n_cells", d.n_cells);
        positive(r, "n_cells", n_cells as f64);
        let dim: Option<usize> = r.optional("dim");
        if let Some(dim) = dim {
            if dim < 2 {
                r.violation("`dim` must be at least 2");
            }
        }
        Self { n_grid, n_cells, dim }
    }

    pub fn rows(&self) -> Result<Vec<BackactionRow>> {
        let plus = DensityMatrix::qubit_plus();
        self.n_grid
            .iter()
            .map(|&n| {
                let dim = self.dim.unwrap_or_else(|| coherent_dim(n));
                let policy = TruncationPolicy::new(dim, TAIL_TOLERANCE)?;
                let joint = apply_source(&SourceSpec::from_emission(SourceKind::Coherent, n)?, &plus, &policy)?;
                let coherent = qubit_coherence(&joint)?;
                let per_cell = n / (2.0 * self.n_cells as f64);
                let thermal_policy = TruncationPolicy::new(thermal_dim(per_cell), TAIL_TOLERANCE)?;
                let thermal = thermal_coherence_repeated_map(n, self.n_cells, &thermal_policy)?;
                let (single_photon, model_single_photon) = if n <= 1.0 {
                    let policy = TruncationPolicy::new(2, TAIL_TOLERANCE)?;
                    let joint =
                        apply_source(&SourceSpec::from_emission(SourceKind::SinglePhoton, n)?, &plus, &policy)?;
                    let model = coherence_curve(SourceKind::SinglePhoton, &[n])?[0].1;
                    (Some(qubit_coherence(&joint)?), Some(model))
                } else {
                    (None, None)
                };
                Ok(BackactionRow {
                    n_emit: n,
                    coherent,
                    thermal,
                    single_photon,
                    model_exponential: coherence_curve(SourceKind::Coherent, &[n])?[0].1,
                    model_single_photon,
                })
            })
            .collect()
    }

    pub fn execute(&self, dir: &Path, hash: &str) -> Result<Vec<PathBuf>> {
        let rows = self.rows()?;
        let path = write_csv(dir, FILE, hash, |w| {
            writeln!(w, "{HEADER}")?;
            for row in &rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    row.n_emit,
                    cell(Some(row.coherent)),
                    cell(Some(row.thermal)),
                    cell(row.single_photon),
                    cell(Some(row.model_exponential)),
                    cell(row.model_single_photon)
                )?;
            }
            Ok(())
        })?;
        Ok(vec![path])
    }
}
