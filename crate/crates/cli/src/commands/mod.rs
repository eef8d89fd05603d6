//! Validated run plans, one per subcommand.

pub mod backaction;
pub mod calibrate;
pub mod scatter;
pub mod snr;
pub mod thermo;

use std::path::{Path, PathBuf};

use qreadout::Result;

use crate::config::{Reader, Settings};

/// Everything a command needs, checked before any work starts.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub command: &'static str,
    pub threads: Option<usize>,
    pub job: Job,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    Backaction(backaction::BackactionPlan),
    Snr(snr::SnrPlan),
    Thermo(thermo::ThermoPlan),
    Scatter(scatter::ScatterPlan),
    Calibrate(calibrate::CalibratePlan),
}

impl Plan {
    /// Reads every key the command uses. Returns all violations at once.
    pub fn build(command: &'static str, settings: &Settings) -> std::result::Result<Self, Vec<String>> {
        let mut r = Reader::new(settings);
        let threads: Option<usize> = r.optional("threads");
        if threads == Some(0) {
            r.violation("`threads` must be at least 1");
        }
        let job = match command {
            "backaction" => Job::Backaction(backaction::BackactionPlan::read(&mut r)),
            "snr" => Job::Snr(snr::SnrPlan::read(&mut r)),
            "thermo" => Job::Thermo(thermo::ThermoPlan::read(&mut r)),
            "scatter" => Job::Scatter(scatter::ScatterPlan::read(&mut r)),
            "calibrate" => Job::Calibrate(calibrate::CalibratePlan::read(&mut r)),
            other => {
                r.violation(format!("unknown command `{other}`"));
                Job::Backaction(backaction::BackactionPlan::default())
            }
        };
        let violations = r.finish();
        if violations.is_empty() {
            Ok(Self { command, threads, job })
        } else {
            Err(violations)
        }
    }

    /// Runs the job and returns the files written.
    pub fn execute(&self, dir: &Path, hash: &str) -> Result<Vec<PathBuf>> {
        match &self.job {
            Job::Backaction(p) => p.execute(dir, hash),
            Job::Snr(p) => p.execute(dir, hash),
            Job::Thermo(p) => p.execute(dir, hash),
            Job::Scatter(p) => p.execute(dir, hash),
            Job::Calibrate(p) => p.execute(dir, hash),
        }
    }
}

/// Requires `value > 0`, recording a violation otherwise.
pub(crate) fn positive(r: &mut Reader, key: &str, value: f64) {
    if !(value > 0.0 && value.is_finite()) {
        r.violation(format!("`{key}` must be positive, got {value}"));
    }
}

/// Requires every grid value to be finite and `>= 0`.
pub(crate) fn non_negative_grid(r: &mut Reader, key: &str, grid: &[f64]) {
    if let Some(bad) = grid.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
        r.violation(format!("`{key}` values must be >= 0, got {bad}"));
    }
}
