//! Probe-light channels and measurement backaction.
//!
//! Each source maps a qubit state onto a joint qubit ⊗ field state:
//!
//! - coherent light fills the `mode_g` resonance only when the qubit is in |g⟩,
//! - thermal light is a classical mixture over which resonance got populated,
//!   kept as two explicit modes (`mode_e ⊗ mode_g`),
//! - single-photon light emits `|1⟩` into `mode_e` with amplitude `sin(θ/2)`
//!   when the qubit is in |e⟩.
//!
//! All three channels leave the σ_z populations untouched and only shrink the
//! qubit coherence.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{
    coherent_state, partial_trace, thermal_populations, DensityMatrix, FockVector, TruncationPolicy, MODE_E,
    MODE_G, QUBIT,
};

/// The three families of probe light.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Coherent,
    Thermal,
    SinglePhoton,
}

impl SourceKind {
    pub const ALL: [SourceKind; 3] = [SourceKind::Coherent, SourceKind::Thermal, SourceKind::SinglePhoton];

    pub fn as_str(&self) -> &'static str {
        match self {
            SourceKind::Coherent => "coherent",
            SourceKind::Thermal => "thermal",
            SourceKind::SinglePhoton => "single_photon",
        }
    }
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SourceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "coherent" => Ok(SourceKind::Coherent),
            "thermal" => Ok(SourceKind::Thermal),
            "single_photon" | "singlephoton" | "1ph" => Ok(SourceKind::SinglePhoton),
            other => Err(Error::Config(format!("unknown source family `{other}`"))),
        }
    }
}

/// Probe light for one measurement cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceSpec {
    /// Coherent state `|α⟩` in the `mode_g` resonance.
    Coherent { alpha: Complex64 },
    /// Thermal light with the given mean occupancy in each resonance.
    Thermal { nbar_per_mode: f64 },
    /// Effective single photon from an e–f rotation by `theta`.
    SinglePhoton { theta: f64 },
}

/// Mean photon number emitted by the cavity in one measurement.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct EmissionBudget {
    pub n_emit: f64,
}

impl SourceSpec {
    pub fn coherent(alpha: Complex64) -> Result<Self> {
        if !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(Error::Domain("coherent amplitude must be finite".into()));
        }
        Ok(Self::Coherent { alpha })
    }

    pub fn thermal(nbar_per_mode: f64) -> Result<Self> {
        if !(nbar_per_mode >= 0.0) || !nbar_per_mode.is_finite() {
            return Err(Error::Domain(format!("thermal occupancy must be >= 0, got {nbar_per_mode}")));
        }
        Ok(Self::Thermal { nbar_per_mode })
    }

    pub fn single_photon(theta: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::Domain(format!("rotation angle must lie in [0, π], got {theta}")));
        }
        Ok(Self::SinglePhoton { theta })
    }

    /// Source of the given family emitting `n_emit` photons in a single cell:
    /// `|α|² = n`, two resonances at `n/2` each, or `sin²(θ/2) = n`.
    pub fn from_emission(kind: SourceKind, n_emit: f64) -> Result<Self> {
        if !(n_emit >= 0.0) || !n_emit.is_finite() {
            return Err(Error::Domain(format!("emitted photon number must be >= 0, got {n_emit}")));
        }
        match kind {
            SourceKind::Coherent => Self::coherent(Complex64::new(n_emit.sqrt(), 0.0)),
            SourceKind::Thermal => Self::thermal(n_emit / 2.0),
            SourceKind::SinglePhoton => {
                if n_emit > 1.0 {
                    return Err(Error::Domain(format!(
                        "single-photon light emits at most one photon, got n_emit = {n_emit}"
                    )));
                }
                Self::single_photon(2.0 * n_emit.sqrt().asin())
            }
        }
    }

    pub fn kind(&self) -> SourceKind {
        match self {
            SourceSpec::Coherent { .. } => SourceKind::Coherent,
            SourceSpec::Thermal { .. } => SourceKind::Thermal,
            SourceSpec::SinglePhoton { .. } => SourceKind::SinglePhoton,
        }
    }

    pub fn emission(&self) -> EmissionBudget {
        let n_emit = match *self {
            SourceSpec::Coherent { alpha } => alpha.norm_sqr(),
            SourceSpec::Thermal { nbar_per_mode } => 2.0 * nbar_per_mode,
            SourceSpec::SinglePhoton { theta } => (theta / 2.0).sin().powi(2),
        };
        EmissionBudget { n_emit }
    }
}

fn check_qubit(qubit: &DensityMatrix) -> Result<()> {
    if qubit.dims() != [2] {
        return Err(Error::InvalidState(format!("expected a single qubit, got dims {:?}", qubit.dims())));
    }
    if !qubit.has_label(QUBIT) {
        return Err(Error::UnknownLabel(QUBIT.into()));
    }
    Ok(())
}

/// `ρ ↦ V ρ V†` with `V|i⟩ = |i⟩ ⊗ |φ_i⟩`.
fn controlled_isometry(qubit: &DensityMatrix, branches: [&FockVector; 2], label: &str) -> Result<DensityMatrix> {
    let d = branches[0].dim();
    debug_assert_eq!(d, branches[1].dim());
    let q = qubit.matrix();
    let mut m = DMatrix::from_element(2 * d, 2 * d, Complex64::new(0.0, 0.0));
    for i in 0..2 {
        for j in 0..2 {
            let rho_ij = q[(i, j)];
            if rho_ij == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (a, phi_a) in branches[i].amplitudes().iter().enumerate() {
                for (b, phi_b) in branches[j].amplitudes().iter().enumerate() {
                    m[(i * d + a, j * d + b)] = rho_ij * phi_a * phi_b.conj();
                }
            }
        }
    }
    DensityMatrix::new(m, vec![2, d], vec![QUBIT.to_string(), label.to_string()])
}

/// Two-mode thermal channel on `qubit ⊗ mode_e ⊗ mode_g`.
///
/// With probability `p_n/2` the `mode_e` resonance holds `n` photons, which it
/// only does if the qubit is in |e⟩ (the |g⟩ branch stays in vacuum);
/// symmetrically for `mode_g`.
fn thermal_channel(qubit: &DensityMatrix, nbar_per_mode: f64, policy: &TruncationPolicy) -> Result<DensityMatrix> {
    let (p, _) = thermal_populations(nbar_per_mode, policy)?;
    let d = policy.dim();
    let field = d * d;
    let q = qubit.matrix();
    let mut m = DMatrix::from_element(2 * field, 2 * field, Complex64::new(0.0, 0.0));
    // field index of (n_e, n_g) is n_e * d + n_g; qubit index 0 = g, 1 = e
    let mut add_branch = |weight: f64, field_g: usize, field_e: usize| {
        let targets = [field_g, field_e + field];
        for i in 0..2 {
            for j in 0..2 {
                m[(targets[i], targets[j])] += q[(i, j)] * weight;
            }
        }
    };
    for (n, &pn) in p.iter().enumerate() {
        if pn == 0.0 {
            continue;
        }
        add_branch(pn / 2.0, 0, n * d);
        add_branch(pn / 2.0, n, 0);
    }
    DensityMatrix::new(
        m,
        vec![2, d, d],
        vec![QUBIT.to_string(), MODE_E.to_string(), MODE_G.to_string()],
    )
}

/// Applies one measurement cell of `source` to `qubit`.
pub fn apply_source(source: &SourceSpec, qubit: &DensityMatrix, policy: &TruncationPolicy) -> Result<DensityMatrix> {
    check_qubit(qubit)?;
    match *source {
        SourceSpec::Coherent { alpha } => {
            let lit = coherent_state(alpha, policy)?;
            let dark = FockVector::number(0, policy.dim())?;
            controlled_isometry(qubit, [&lit, &dark], MODE_G)
        }
        SourceSpec::Thermal { nbar_per_mode } => thermal_channel(qubit, nbar_per_mode, policy),
        SourceSpec::SinglePhoton { theta } => {
            let d = policy.dim();
            if d < 2 {
                return Err(Error::TailTooHeavy {
                    tail: (theta / 2.0).sin().powi(2),
                    tolerance: policy.tail_tolerance(),
                    dim: d,
                });
            }
            let vacuum = FockVector::number(0, d)?;
            let mut amps = vacuum.amplitudes().clone();
            amps[0] = Complex64::new((theta / 2.0).cos(), 0.0);
            amps[1] = Complex64::new((theta / 2.0).sin(), 0.0);
            let emitted = FockVector::unnormalized(amps)?;
            controlled_isometry(qubit, [&vacuum, &emitted], MODE_E)
        }
    }
}

/// `2|ρ_ge|` of the reduced qubit state.
pub fn qubit_coherence(joint: &DensityMatrix) -> Result<f64> {
    let q = partial_trace(joint, &[QUBIT])?;
    Ok(2.0 * q.element(0, 1).norm())
}

/// Coherence left after `n_cells` infinitesimal thermal cells sharing
/// `n_emit` photons: `⟨0|ρ_th|0⟩^N` with `n_emit / 2N` photons per cell.
pub fn thermal_coherence_repeated_map(n_emit: f64, n_cells: u64, policy: &TruncationPolicy) -> Result<f64> {
    if n_cells == 0 {
        return Err(Error::Domain("need at least one cell".into()));
    }
    let (p, _) = thermal_populations(n_emit / (2.0 * n_cells as f64), policy)?;
    Ok((n_cells as f64 * p[0].ln()).exp())
}

/// Closed-form backaction curve: `e^{−n/2}` for coherent and thermal light,
/// `√(1−n)` for single photons.
pub fn coherence_curve(kind: SourceKind, n_emit_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    n_emit_grid
        .iter()
        .map(|&n| {
            if !(n >= 0.0) {
                return Err(Error::Domain(format!("emitted photon number must be >= 0, got {n}")));
            }
            let coherence = match kind {
                SourceKind::Coherent | SourceKind::Thermal => (-n / 2.0).exp(),
                SourceKind::SinglePhoton => {
                    if n > 1.0 {
                        return Err(Error::Domain(format!("n_emit > 1 for single photon ({n})")));
                    }
                    (1.0 - n).sqrt()
                }
            };
            Ok((n, coherence))
        })
        .collect()
}

/// Inputs of the literature dephasing-rate formulas. Rates in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateParams {
    pub kappa: f64,
    pub chi: f64,
    /// Drive detuning Δ_r.
    pub delta_r: f64,
    /// Intracavity photons with the qubit in |g⟩.
    pub nbar_plus: f64,
    /// Intracavity photons with the qubit in |e⟩.
    pub nbar_minus: f64,
    /// Cavity Fock state during thermal dephasing.
    pub n_fock: u32,
}

impl RateParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0) {
            return Err(Error::Domain("kappa must be positive".into()));
        }
        Ok(())
    }
}

/// Dephasing rate of a coherent drive,
/// `Γ = (n̄₊ + n̄₋) κ χ² / (κ²/4 + χ² + Δ_r²)`.
pub fn dephasing_rate_coherent(p: &RateParams) -> f64 {
    (p.nbar_plus + p.nbar_minus) * p.kappa * p.chi * p.chi
        / (p.kappa * p.kappa / 4.0 + p.chi * p.chi + p.delta_r * p.delta_r)
}

/// Thermal-photon dephasing rate with the cavity in Fock state `N`,
/// `Γ = κ (2 n̄ N + n̄ + N)`; `nbar_plus` carries `n̄`.
pub fn dephasing_rate_thermal(p: &RateParams) -> f64 {
    let n = p.n_fock as f64;
    let nbar = p.nbar_plus;
    p.kappa * (2.0 * nbar * n + nbar + n)
}
