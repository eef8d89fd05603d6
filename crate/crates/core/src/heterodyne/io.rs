//! CSV and binary serialisation of traces and spectra.
//!
//! Binary record layout, all little-endian:
//! `b"QRTR"`, `u32` version, `f64` dt, `u64` length, then `length` pairs of
//! `f64` (re, im). Preparation label and offset are not part of the record.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::spectrum::AmplitudeSpectrum;
use super::trace::{HeterodyneTrace, QubitLabel};

pub const TRACE_MAGIC: [u8; 4] = *b"QRTR";
pub const TRACE_VERSION: u32 = 1;

pub const SPECTRUM_CSV_HEADER: &str = "freq_hz,amplitude";
pub const TRACE_CSV_HEADER: &str = "time_s,i,q";

#[derive(Serialize, Deserialize)]
struct SpectrumRow {
    freq_hz: f64,
    amplitude: f64,
}

#[derive(Serialize, Deserialize)]
struct TraceRow {
    time_s: f64,
    i: f64,
    q: f64,
}

pub fn write_spectrum_csv<W: Write>(out: W, spectrum: &AmplitudeSpectrum) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (&freq_hz, &amplitude) in spectrum.freqs.iter().zip(&spectrum.amplitudes) {
        w.serialize(SpectrumRow { freq_hz, amplitude })?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_spectrum_csv<R: Read>(input: R, background_subtracted: bool) -> Result<AmplitudeSpectrum> {
    let mut freqs = Vec::new();
    let mut amplitudes = Vec::new();
    for row in csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input).deserialize() {
        let row: SpectrumRow = row?;
        freqs.push(row.freq_hz);
        amplitudes.push(row.amplitude);
    }
    AmplitudeSpectrum::new(freqs, amplitudes, background_subtracted)
}

pub fn write_trace_csv<W: Write>(out: W, trace: &HeterodyneTrace) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (k, z) in trace.samples.iter().enumerate() {
        w.serialize(TraceRow { time_s: k as f64 * trace.dt, i: z.re, q: z.im })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a trace; `dt` is taken from the first two time stamps.
pub fn read_trace_csv<R: Read>(input: R, label: QubitLabel, demod_offset: f64) -> Result<HeterodyneTrace> {
    let mut times = Vec::new();
    let mut samples = Vec::new();
    for row in csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input).deserialize() {
        let row: TraceRow = row?;
        times.push(row.time_s);
        samples.push(Complex64::new(row.i, row.q));
    }
    if times.len() < 2 {
        return Err(Error::InvalidState(format!("a trace needs at least 2 samples, got {}", times.len())));
    }
    HeterodyneTrace::new(samples, times[1] - times[0], label, demod_offset)
}

pub fn write_trace_binary<W: Write>(mut out: W, trace: &HeterodyneTrace) -> Result<()> {
    out.write_all(&TRACE_MAGIC)?;
    out.write_all(&TRACE_VERSION.to_le_bytes())?;
    out.write_all(&trace.dt.to_le_bytes())?;
    out.write_all(&(trace.samples.len() as u64).to_le_bytes())?;
    for z in &trace.samples {
        out.write_all(&z.re.to_le_bytes())?;
        out.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

fn read_array<const N: usize, R: Read>(input: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    input.read_exact(&mut buf)?;
    Ok(buf)
}

pub fn read_trace_binary<R: Read>(mut input: R, label: QubitLabel, demod_offset: f64) -> Result<HeterodyneTrace> {
    let magic: [u8; 4] = read_array(&mut input)?;
    if magic != TRACE_MAGIC {
        return Err(Error::InvalidState("not a trace record: bad magic".into()));
    }
    let version = u32::from_le_bytes(read_array(&mut input)?);
    if version != TRACE_VERSION {
        return Err(Error::InvalidState(format!("unsupported trace record version {version}")));
    }
    let dt = f64::from_le_bytes(read_array(&mut input)?);
    let len = u64::from_le_bytes(read_array(&mut input)?) as usize;
    let mut samples = Vec::with_capacity(len.min(1 << 24));
    for _ in 0..len {
        let re = f64::from_le_bytes(read_array(&mut input)?);
        let im = f64::from_le_bytes(read_array(&mut input)?);
        samples.push(Complex64::new(re, im));
    }
    HeterodyneTrace::new(samples, dt, label, demod_offset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heterodyne::spectrum::amplitude_spectrum;
    use crate::heterodyne::trace::simulate_thermal_trace;
    use crate::params::SystemParams;

    fn sample_trace() -> HeterodyneTrace {
        simulate_thermal_trace(QubitLabel::G, &SystemParams::reference_device(), 1.0, 1e-6, 2).unwrap()
    }

    #[test]
    fn binary_round_trip_is_exact() {
        let t = sample_trace();
        let mut buf = Vec::new();
        write_trace_binary(&mut buf, &t).unwrap();
        assert_eq!(buf.len(), 4 + 4 + 8 + 8 + 16 * t.len());
        assert_eq!(&buf[..4], b"QRTR");
        let back = read_trace_binary(buf.as_slice(), t.qubit_label, t.demod_offset).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn binary_rejects_corruption() {
        let t = sample_trace();
        let mut buf = Vec::new();
        write_trace_binary(&mut buf, &t).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(read_trace_binary(bad.as_slice(), QubitLabel::G, 0.0).is_err());
        buf.truncate(buf.len() - 3);
        assert!(read_trace_binary(buf.as_slice(), QubitLabel::G, 0.0).is_err());
    }

    #[test]
    fn spectrum_csv_round_trip() {
        let s = amplitude_spectrum(&sample_trace(), None).unwrap();
        let mut buf = Vec::new();
        write_spectrum_csv(&mut buf, &s).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with(SPECTRUM_CSV_HEADER));
        let back = read_spectrum_csv(buf.as_slice(), false).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn trace_csv_round_trip() {
        let t = sample_trace();
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &t).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with(TRACE_CSV_HEADER));
        let back = read_trace_csv(buf.as_slice(), QubitLabel::G, t.demod_offset).unwrap();
        assert_eq!(back.samples, t.samples);
        assert!((back.dt - t.dt).abs() < 1e-20);
    }
}
