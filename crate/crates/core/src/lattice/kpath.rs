use serde::{Deserialize, Serialize};

use super::hamiltonian::KPoint;
use crate::error::{Error, Result};

/// Default band-structure path. `U|K` marks a jump between equivalent points
/// drawn at a single axis position.
pub const DEFAULT_PATH: &str = "L,G,X,U|K,G";

pub const VALID_LABELS: [&str; 6] = ["L", "Γ", "X", "U", "K", "W"];

/// fcc high-symmetry points in units of 2π/a. `G` is accepted for Γ.
pub fn high_symmetry_point(label: &str) -> Result<KPoint> {
    let k = match label {
        "L" => KPoint::new(0.5, 0.5, 0.5),
        "Γ" | "G" | "Gamma" => KPoint::GAMMA,
        "X" => KPoint::new(1.0, 0.0, 0.0),
        "U" => KPoint::new(1.0, 0.25, 0.25),
        "K" => KPoint::new(0.75, 0.75, 0.0),
        "W" => KPoint::new(1.0, 0.5, 0.0),
        other => {
            return Err(Error::input(format!(
                "unknown high-symmetry label {other:?}; valid labels are {} (G is an alias for Γ)",
                VALID_LABELS.join(", ")
            )))
        }
    };
    Ok(k)
}

fn canonical(label: &str) -> &str {
    match label {
        "G" | "Gamma" => "Γ",
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KSample {
    pub k: KPoint,
    /// Cumulative path length in units of 2π/a.
    pub distance: f64,
    pub segment: usize,
}

/// Labelled axis position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tick {
    pub label: String,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KPath {
    /// Segment endpoints, `(start, end)` each with its label.
    pub segments: Vec<((String, KPoint), (String, KPoint))>,
    pub points_per_segment: usize,
    pub samples: Vec<KSample>,
    pub ticks: Vec<Tick>,
}

impl KPath {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn kpoints(&self) -> impl Iterator<Item = KPoint> + '_ {
        self.samples.iter().map(|s| s.k)
    }

    /// Parses `L,G,X,U|K,G` and samples it.
    pub fn parse(spec: &str, points_per_segment: usize) -> Result<Self> {
        let labels: Vec<&str> = spec.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        standard_kpath(&labels, points_per_segment)
    }
}

/// Samples the polyline through `labels`, `points_per_segment` points per
/// segment including both endpoints, so junction points appear twice.
///
/// A label of the form `A|B` ends the incoming segment at `A` and starts the
/// next one at `B` without advancing the path distance.
pub fn standard_kpath(labels: &[&str], points_per_segment: usize) -> Result<KPath> {
    if labels.len() < 2 {
        return Err(Error::input("a k-path needs at least two labels"));
    }
    if points_per_segment < 2 {
        return Err(Error::input("points per segment must be at least 2"));
    }

    // (arrive-at, leave-from) per stop
    let mut stops = Vec::with_capacity(labels.len());
    for label in labels {
        let (arrive, leave) = match label.split_once('|') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (*label, *label),
        };
        stops.push((
            (canonical(arrive).to_string(), high_symmetry_point(arrive)?),
            (canonical(leave).to_string(), high_symmetry_point(leave)?),
        ));
    }

    let mut segments = Vec::new();
    let mut samples = Vec::new();
    let mut ticks = Vec::new();
    let mut offset = 0.0;
    for (s, pair) in stops.windows(2).enumerate() {
        let start = pair[0].1.clone();
        let end = pair[1].0.clone();
        let tick_label = if pair[0].0 .0 == start.0 { start.0.clone() } else { format!("{}|{}", pair[0].0 .0, start.0) };
        ticks.push(Tick { label: tick_label, distance: offset });

        let length = start.1.distance(&end.1);
        for i in 0..points_per_segment {
            let t = i as f64 / (points_per_segment - 1) as f64;
            samples.push(KSample { k: start.1.lerp(&end.1, t), distance: offset + t * length, segment: s });
        }
        offset += length;
        segments.push((start, end));
    }
    let last = &stops[stops.len() - 1].0;
    ticks.push(Tick { label: last.0.clone(), distance: offset });

    Ok(KPath { segments, points_per_segment, samples, ticks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_path_has_zero_distance() {
        let p = standard_kpath(&["Γ", "Γ"], 5).unwrap();
        assert_eq!(p.len(), 5);
        assert!(p.samples.iter().all(|s| s.k == KPoint::GAMMA && s.distance == 0.0));
    }

    #[test]
    fn two_points_are_the_endpoints() {
        let p = standard_kpath(&["L", "Γ"], 2).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.samples[0].k, KPoint::new(0.5, 0.5, 0.5));
        assert_eq!(p.samples[1].k, KPoint::GAMMA);
        assert!((p.samples[1].distance - 0.75f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn long_path_is_monotone_except_at_junctions() {
        let p = standard_kpath(&["L", "Γ", "X", "U", "Γ"], 20).unwrap();
        assert_eq!(p.len(), 80);
        for (i, w) in p.samples.windows(2).enumerate() {
            let junction = (i + 1) % 20 == 0;
            if junction {
                assert_eq!(w[1].distance, w[0].distance);
                assert_eq!(w[1].k, w[0].k);
            } else {
                assert!(w[1].distance > w[0].distance, "sample {i}");
            }
        }
    }

    #[test]
    fn break_label_shares_axis_position() {
        let p = KPath::parse(DEFAULT_PATH, 10).unwrap();
        assert_eq!(p.len(), 40);
        let u_end = &p.samples[29];
        let k_start = &p.samples[30];
        assert_eq!(u_end.k, KPoint::new(1.0, 0.25, 0.25));
        assert_eq!(k_start.k, KPoint::new(0.75, 0.75, 0.0));
        assert_eq!(u_end.distance, k_start.distance);
        let labels: Vec<&str> = p.ticks.iter().map(|t| t.label.as_str()).collect();
        assert_eq!(labels, vec!["L", "Γ", "X", "U|K", "Γ"]);
    }

    #[test]
    fn unknown_label_lists_valid_ones() {
        let err = standard_kpath(&["L", "Q"], 5).unwrap_err().to_string();
        assert!(err.contains("Q") && err.contains("W"), "{err}");
    }

    #[test]
    fn too_short_inputs_are_rejected() {
        assert!(standard_kpath(&["L"], 5).is_err());
        assert!(standard_kpath(&["L", "X"], 1).is_err());
    }
}
