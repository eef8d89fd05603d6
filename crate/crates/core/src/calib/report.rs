//! JSON-serialisable fit summaries.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    /// Fitted parameters.
    pub parameters: BTreeMap<String, f64>,
    /// One-standard-error uncertainties of the fitted parameters.
    pub uncertainties: BTreeMap<String, f64>,
    /// Quantities computed from the fitted parameters.
    pub derived: BTreeMap<String, Option<f64>>,
    pub residual_norm: f64,
    pub iterations: usize,
    /// Warnings about conditioning, truncation or degeneracy.
    pub flags: Vec<String>,
}

impl FitReport {
    pub fn new(residual_norm: f64, iterations: usize) -> Self {
        Self {
            parameters: BTreeMap::new(),
            uncertainties: BTreeMap::new(),
            derived: BTreeMap::new(),
            residual_norm,
            iterations,
            flags: Vec::new(),
        }
    }

    pub fn parameter(&mut self, name: &str, value: f64, std_error: f64) {
        self.parameters.insert(name.to_owned(), value);
        self.uncertainties.insert(name.to_owned(), std_error);
    }

    pub fn derived(&mut self, name: &str, value: impl Into<Option<f64>>) {
        self.derived.insert(name.to_owned(), value.into());
    }

    pub fn flag(&mut self, message: impl Into<String>) {
        self.flags.push(message.into());
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }
}
