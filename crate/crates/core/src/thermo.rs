//! Information accounting of the unread field measurement.
//!
//! The qubit starts in `|+⟩`, a source writes into the cavity field, and the
//! field is then measured in the Fock basis without reading the result. The
//! field entropy `S_f` is what a demon must erase at temperature `T_D`; the
//! mutual information `I = S_q + S_f − S_tot` is what the field learned
//! about the qubit. `S_f = I` is the efficiency frontier.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{
    dephase_fock_basis, partial_trace, von_neumann_entropy, DensityMatrix, LogBase, TruncationPolicy, QUBIT,
};
use crate::params::BOLTZMANN;
use crate::sources::{apply_source, SourceKind, SourceSpec};

/// Entropy bookkeeping for one source setting. Entropies in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfoReport {
    pub family: SourceKind,
    pub n_cav: f64,
    pub s_field: f64,
    pub s_qubit: f64,
    pub s_total: f64,
    pub mutual_info: f64,
    /// `k_B T_D S_f`, joules.
    pub erasure_cost: f64,
}

impl InfoReport {
    /// Distance from the `S = I` frontier, `S_f − I`.
    pub fn inefficiency(&self) -> f64 {
        self.s_field - self.mutual_info
    }
}

fn field_labels(joint: &DensityMatrix) -> Result<Vec<&str>> {
    if !joint.has_label(QUBIT) {
        return Err(Error::UnknownLabel(QUBIT.into()));
    }
    let fields: Vec<&str> = joint.labels().iter().map(String::as_str).filter(|l| *l != QUBIT).collect();
    if fields.is_empty() {
        return Err(Error::Domain("joint state has no field subsystem".into()));
    }
    Ok(fields)
}

/// Joint state after the source acted on `|+⟩` and the field was measured
/// (unread) in the Fock basis.
pub fn post_measurement_state(source: &SourceSpec, policy: &TruncationPolicy) -> Result<DensityMatrix> {
    let joint = apply_source(source, &DensityMatrix::qubit_plus(), policy)?;
    let fields = field_labels(&joint)?;
    dephase_fock_basis(&joint, &fields)
}

/// Entropy of the reduced field state, bits.
pub fn field_entropy(joint: &DensityMatrix) -> Result<f64> {
    let fields = field_labels(joint)?;
    Ok(von_neumann_entropy(&partial_trace(joint, &fields)?, LogBase::Two))
}

/// `I = S_q + S_f − S_tot`, bits.
pub fn mutual_information(joint: &DensityMatrix) -> Result<f64> {
    let (_, _, _, i) = entropies(joint)?;
    Ok(i)
}

/// `(S_q, S_f, S_tot, I)` in bits.
fn entropies(joint: &DensityMatrix) -> Result<(f64, f64, f64, f64)> {
    let fields = field_labels(joint)?;
    let s_q = von_neumann_entropy(&partial_trace(joint, &[QUBIT])?, LogBase::Two);
    let s_f = von_neumann_entropy(&partial_trace(joint, &fields)?, LogBase::Two);
    let s_tot = von_neumann_entropy(joint, LogBase::Two);
    Ok((s_q, s_f, s_tot, s_q + s_f - s_tot))
}

/// Minimal erasure work `k_B T_D S` for an entropy given in bits.
pub fn erasure_cost(s_field_bits: f64, t_d: f64) -> Result<f64> {
    if !(t_d > 0.0) {
        return Err(Error::Domain(format!("demon temperature must be positive, got {t_d}")));
    }
    Ok(BOLTZMANN * t_d * s_field_bits * std::f64::consts::LN_2)
}

/// Full report for one source.
pub fn info_report(source: &SourceSpec, policy: &TruncationPolicy, t_d: f64) -> Result<InfoReport> {
    let joint = post_measurement_state(source, policy)?;
    let (s_qubit, s_field, s_total, mutual_info) = entropies(&joint)?;
    Ok(InfoReport {
        family: source.kind(),
        n_cav: source.emission().n_emit,
        s_field,
        s_qubit,
        s_total,
        mutual_info,
        erasure_cost: erasure_cost(s_field, t_d)?,
    })
}

/// Reports along a photon-number grid for one family. `n_cav` is `|α|²`,
/// the two-mode thermal total, or `sin²(θ/2)`.
pub fn efficiency_scan(
    family: SourceKind,
    n_grid: &[f64],
    policy: &TruncationPolicy,
    t_d: f64,
) -> Result<Vec<InfoReport>> {
    n_grid
        .iter()
        .map(|&n| {
            let report = info_report(&SourceSpec::from_emission(family, n)?, policy, t_d)?;
            Ok(InfoReport { n_cav: n, ..report })
        })
        .collect()
}

pub const CSV_HEADER: &str = "family,n_cav,S_f_bits,S_q_bits,S_tot_bits,I_bits,erasure_cost_J";

/// Writes reports as CSV rows under [`CSV_HEADER`].
pub fn write_csv<W: Write>(mut out: W, reports: &[InfoReport]) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in reports {
        writeln!(
            out,
            "{},{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            r.family, r.n_cav, r.s_field, r.s_qubit, r.s_total, r.mutual_info, r.erasure_cost
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{tensor, MODE_E};

    fn policy() -> TruncationPolicy {
        TruncationPolicy::new(24, 1e-12).unwrap()
    }

    #[test]
    fn full_single_photon_extracts_one_bit() {
        let r = info_report(&SourceSpec::from_emission(SourceKind::SinglePhoton, 1.0).unwrap(), &policy(), 0.01)
            .unwrap();
        assert!((r.mutual_info - 1.0).abs() < 1e-12);
        assert!((r.s_field - 1.0).abs() < 1e-12);
        assert!(r.inefficiency().abs() < 1e-12);
    }

    #[test]
    fn full_single_photon_post_state() {
        let rho = post_measurement_state(&SourceSpec::single_photon(std::f64::consts::PI).unwrap(), &policy()).unwrap();
        // (|g,0⟩⟨g,0| + |e,1⟩⟨e,1|)/2
        let g0 = rho.index_of(&[0, 0]);
        let e1 = rho.index_of(&[1, 1]);
        for r in 0..rho.dim() {
            for c in 0..rho.dim() {
                let expected = if r == c && (r == g0 || r == e1) { 0.5 } else { 0.0 };
                assert!((rho.element(r, c).re - expected).abs() < 1e-15);
                assert!(rho.element(r, c).im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn vacuum_sources_give_zero_report() {
        for kind in SourceKind::ALL {
            let r = info_report(&SourceSpec::from_emission(kind, 0.0).unwrap(), &policy(), 0.02).unwrap();
            assert!(r.s_field.abs() < 1e-12);
            assert!(r.s_qubit.abs() < 1e-12);
            assert!(r.s_total.abs() < 1e-12);
            assert!(r.mutual_info.abs() < 1e-12);
            assert_eq!(r.erasure_cost, 0.0);
        }
    }

    #[test]
    fn product_state_carries_no_information() {
        let field = crate::fock::thermal_state(0.4, &policy()).unwrap().relabel([MODE_E]).unwrap();
        let joint = tensor(&DensityMatrix::qubit_plus(), &field).unwrap();
        assert!(mutual_information(&joint).unwrap().abs() < 1e-10);
    }

    #[test]
    fn coherent_light_extracts_less_than_a_bit() {
        let r = info_report(&SourceSpec::from_emission(SourceKind::Coherent, 1.0).unwrap(), &policy(), 0.01).unwrap();
        assert!(r.mutual_info > 0.0 && r.mutual_info < 1.0);
    }

    #[test]
    fn erasure_cost_arithmetic() {
        assert_eq!(erasure_cost(0.0, 0.01).unwrap(), 0.0);
        let one = erasure_cost(1.0, 0.01).unwrap();
        assert!((one - 9.57e-26).abs() < 0.01e-26);
        assert_eq!(erasure_cost(2.0, 0.01).unwrap(), 2.0 * one);
        assert!(erasure_cost(1.0, 0.0).is_err());
    }

    #[test]
    fn labels_required() {
        let q = DensityMatrix::qubit_plus();
        assert!(field_entropy(&q).is_err());
        let f = crate::fock::thermal_state(0.1, &policy()).unwrap();
        assert!(matches!(mutual_information(&f), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn scan_rejects_single_photon_beyond_one() {
        assert!(efficiency_scan(SourceKind::SinglePhoton, &[0.5, 1.5], &policy(), 0.01).is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let reports = efficiency_scan(SourceKind::Coherent, &[0.0, 0.5], &policy(), 0.01).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &reports).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 3);
        assert!(lines[2].starts_with("coherent,0.5,"));
    }
}
