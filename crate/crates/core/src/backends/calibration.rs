use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::noise::QubitChannel;
use super::shots::ReadoutError;
use crate::error::{Error, Result};
use crate::pauli::NUM_QUBITS;

/// Duration the decoherence heuristic charges per measurement, in µs.
pub const MEASUREMENT_TIME_US: f64 = 1.0;

/// Label attached to results that use [`hardware_noise_model`].
pub const HARDWARE_MODEL_NOTE: &str =
    "approximate composite model: depolarizing p = 1 - exp(-t/T1), Z bias from T2/T1, calibrated readout confusion";

/// One row of a device calibration table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitCalibration {
    pub qubit: usize,
    #[serde(rename = "T1_us")]
    pub t1_us: f64,
    #[serde(rename = "T2_us")]
    pub t2_us: f64,
    #[serde(rename = "freq_GHz")]
    pub freq_ghz: f64,
    pub readout_err: f64,
    /// prob(meas 1 | prep 0)
    pub p01: f64,
    /// prob(meas 0 | prep 1)
    pub p10: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CxEdge {
    pub q_a: usize,
    pub q_b: usize,
    pub err: f64,
}

impl CxEdge {
    pub fn is_unusable(&self) -> bool {
        self.err >= 1.0
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CalibrationProfile {
    pub qubits: Vec<QubitCalibration>,
    pub cx: Vec<CxEdge>,
}

impl CalibrationProfile {
    pub fn qubit(&self, index: usize) -> Option<&QubitCalibration> {
        self.qubits.iter().find(|q| q.qubit == index)
    }

    pub fn worst_readout_qubit(&self) -> Option<usize> {
        self.qubits.iter().max_by(|a, b| a.readout_err.total_cmp(&b.readout_err)).map(|q| q.qubit)
    }

    pub fn unusable_edges(&self) -> impl Iterator<Item = &CxEdge> {
        self.cx.iter().filter(|e| e.is_unusable())
    }

    /// A qubit whose every listed CX edge is broken cannot be entangled with
    /// the rest of the device.
    pub fn is_unusable(&self, qubit: usize) -> bool {
        let mut edges = self.cx.iter().filter(|e| e.q_a == qubit || e.q_b == qubit).peekable();
        edges.peek().is_some() && edges.all(CxEdge::is_unusable)
    }
}

fn csv_row_error(row: usize, e: csv::Error) -> Error {
    Error::Calibration { row, message: e.to_string() }
}

fn parse_rows<T: serde::de::DeserializeOwned>(reader: impl Read) -> Result<Vec<(usize, T)>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    // Header is row 1; data rows count from 2.
    for (i, rec) in rdr.deserialize().enumerate() {
        let row = i + 2;
        out.push((row, rec.map_err(|e| csv_row_error(row, e))?));
    }
    Ok(out)
}

fn check_fraction(row: usize, name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Calibration { row, message: format!("{name} = {x} is outside [0, 1]") });
    }
    Ok(())
}

/// Parses a qubit table and an optional CX table.
pub fn parse_calibration(qubits: impl Read, cx: Option<impl Read>) -> Result<CalibrationProfile> {
    let rows: Vec<(usize, QubitCalibration)> = parse_rows(qubits)?;
    if rows.is_empty() {
        return Err(Error::Calibration { row: 1, message: "no qubit rows".into() });
    }
    for (row, q) in &rows {
        if !(q.t1_us > 0.0 && q.t1_us.is_finite()) || !(q.t2_us > 0.0 && q.t2_us.is_finite()) {
            return Err(Error::Calibration { row: *row, message: "T1 and T2 must be positive".into() });
        }
        check_fraction(*row, "readout_err", q.readout_err)?;
        check_fraction(*row, "p01", q.p01)?;
        check_fraction(*row, "p10", q.p10)?;
        if rows.iter().filter(|(_, other)| other.qubit == q.qubit).count() > 1 {
            return Err(Error::Calibration { row: *row, message: format!("qubit {} listed twice", q.qubit) });
        }
    }
    let mut profile = CalibrationProfile { qubits: rows.into_iter().map(|(_, q)| q).collect(), cx: Vec::new() };
    if let Some(cx) = cx {
        for (row, edge) in parse_rows::<CxEdge>(cx)? {
            check_fraction(row, "err", edge.err)?;
            if profile.qubit(edge.q_a).is_none() || profile.qubit(edge.q_b).is_none() {
                return Err(Error::Calibration { row, message: format!("edge ({}, {}) names an unknown qubit", edge.q_a, edge.q_b) });
            }
            profile.cx.push(edge);
        }
    }
    Ok(profile)
}

pub fn load_calibration(path: &Path, cx_path: Option<&Path>) -> Result<CalibrationProfile> {
    let qubits = std::fs::File::open(path)?;
    let cx = cx_path.map(std::fs::File::open).transpose()?;
    parse_calibration(qubits, cx)
}

/// The table shipped with the crate (a 27-qubit device, CX edges included).
pub fn reference_calibration() -> CalibrationProfile {
    parse_calibration(
        include_str!("../../data/hanoi_qubits.csv").as_bytes(),
        Some(include_str!("../../data/hanoi_cx.csv").as_bytes()),
    )
    .expect("bundled calibration table parses")
}

/// Channels and readout confusion for three chosen device qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardwareModel {
    pub qubits: [usize; NUM_QUBITS],
    pub channels: [QubitChannel; NUM_QUBITS],
    pub readout: [ReadoutError; NUM_QUBITS],
    pub note: String,
}

/// Z bias from the coherence ratio: η = 1 − (3/4)·T2/(2·T1), clipped to
/// [1/4, 1]. T2 = 2·T1 gives uniform depolarizing, T2 ≪ T1 pure dephasing.
pub fn bias_from_coherence(t1_us: f64, t2_us: f64) -> f64 {
    (1.0 - 0.75 * t2_us / (2.0 * t1_us)).clamp(0.25, 1.0)
}

pub fn hardware_noise_model(profile: &CalibrationProfile, qubits: [usize; NUM_QUBITS]) -> Result<HardwareModel> {
    for (i, q) in qubits.iter().enumerate() {
        if qubits[..i].contains(q) {
            return Err(Error::config(format!("qubit {q} selected twice")));
        }
    }
    let mut channels = [QubitChannel::IDENTITY; NUM_QUBITS];
    let mut readout = [ReadoutError::default(); NUM_QUBITS];
    for (slot, &q) in qubits.iter().enumerate() {
        let cal = profile.qubit(q).ok_or_else(|| Error::config(format!("qubit {q} is not in the calibration table")))?;
        if profile.is_unusable(q) {
            return Err(Error::config(format!("qubit {q} is unusable: every CX edge on it has error 1.0")));
        }
        let p = 1.0 - (-MEASUREMENT_TIME_US / cal.t1_us).exp();
        channels[slot] = QubitChannel::new(p, bias_from_coherence(cal.t1_us, cal.t2_us))?;
        readout[slot] = ReadoutError::new(cal.p01, cal.p10)?;
    }
    Ok(HardwareModel { qubits, channels, readout, note: HARDWARE_MODEL_NOTE.to_string() })
}
