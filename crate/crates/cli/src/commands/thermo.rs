//! Information frontier: entropies, mutual information and erasure cost.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use qreadout::fock::TruncationPolicy;
use qreadout::sources::SourceKind;
use qreadout::thermo::{efficiency_scan, write_csv as write_reports, InfoReport};
use qreadout::Result;

use super::{non_negative_grid, positive};
use crate::config::{Grid, Reader};
use crate::output::write_csv;

pub const FILE: &str = "thermo.csv";

/// One family or all three.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Families(pub &'static [SourceKind]);

impl FromStr for Families {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.trim().eq_ignore_ascii_case("all") {
            return Ok(Self(&SourceKind::ALL));
        }
        let kind: SourceKind = s.parse().map_err(|e: qreadout::Error| e.to_string())?;
        let index = SourceKind::ALL.iter().position(|k| *k == kind).expect("listed kind");
        Ok(Self(&SourceKind::ALL[index..index + 1]))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThermoPlan {
    pub families: Families,
    pub n_grid: Vec<f64>,
    pub dim: usize,
    pub t_demon: f64,
}

impl ThermoPlan {
    pub fn read(r: &mut Reader) -> Self {
        let families = r.or("family", Families(&SourceKind::ALL));
        let grid: Option<Grid> = r.optional("n_grid");
        let single: Option<f64> = r.optional("n");
        let n_grid = match (grid, single) {
            (Some(_), Some(_)) => {
                r.violation("give either `n` or `n_grid`, not both");
                Vec::new()
            }
            (Some(g), None) => g.0,
            (None, Some(n)) => vec![n],
            (None, None) => "0.05:1:0.05".parse::<Grid>().expect("valid default").0,
        };
        non_negative_grid(r, "n_grid", &n_grid);
        if families.0.contains(&SourceKind::SinglePhoton) {
            if let Some(n) = n_grid.iter().find(|n| **n > 1.0) {
                r.violation(format!("n_emit > 1 for single photon (got {n})"));
            }
        }
        let dim: usize = r.or("dim", 32);
        if dim < 2 {
            r.violation("`dim` must be at least 2");
        }
        let t_demon: f64 = r.or("t_demon", 0.01);
        positive(r, "t_demon", t_demon);
        Self { families, n_grid, dim, t_demon }
    }

    pub fn reports(&self) -> Result<Vec<InfoReport>> {
        let policy = TruncationPolicy::new(self.dim, 1e-10)?;
        let mut reports = Vec::new();
        for &family in self.families.0 {
            reports.extend(efficiency_scan(family, &self.n_grid, &policy, self.t_demon)?);
        }
        Ok(reports)
    }

    pub fn execute(&self, dir: &Path, hash: &str) -> Result<Vec<PathBuf>> {
        let reports = self.reports()?;
        Ok(vec![write_csv(dir, FILE, hash, |w| write_reports(w, &reports))?])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_names() {
        assert_eq!("all".parse::<Families>().unwrap().0.len(), 3);
        assert_eq!("single_photon".parse::<Families>().unwrap().0, &[SourceKind::SinglePhoton]);
        assert!("laser".parse::<Families>().is_err());
    }

    #[test]
    fn single_photon_at_one_gives_one_bit() {
        let plan = ThermoPlan { families: Families(&[SourceKind::SinglePhoton]), n_grid: vec![1.0], dim: 32, t_demon: 0.01 };
        let r = plan.reports().unwrap();
        assert!((r[0].mutual_info - 1.0).abs() < 1e-9);
        assert!((r[0].s_field - 1.0).abs() < 1e-9);
    }
}
