use serde::{Deserialize, Serialize};

use rqeom::backends::Backend;
use rqeom::eom::{Method, PoolKind};
use rqeom::lattice::MaterialParams;

pub const TOOL: &str = "rqeom";
const CSV_PREFIX: &str = "# rqeom manifest ";
const SVG_PREFIX: &str = "<!-- rqeom manifest ";
const SVG_SUFFIX: &str = " -->";

/// Everything that determines a run's output.
///
/// Material parameters and the resolved backend (including any calibration
/// derived noise) are stored by value, so a manifest re-runs without the
/// files it was built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// As given on the command line.
    pub material: String,
    pub material_params: MaterialParams,
    pub method: Method,
    /// Source-orbital counts; one entry except for the bias sweep.
    pub orbitals: Vec<usize>,
    pub sources: Option<Vec<usize>>,
    pub pool: PoolKind,
    pub backend: Backend,
    /// Calibration table behind a hardware backend, for the record.
    pub calibration: Option<String>,
    pub rank_tol: Option<f64>,
    pub trials: usize,
    pub seed: u64,
    pub path: Option<String>,
    pub points: Option<usize>,
    pub kpoints: Option<Vec<String>>,
    pub etas: Option<Vec<f64>>,
    pub outliers: Option<f64>,
    pub group: bool,
    pub out: Option<String>,
    pub svg: Option<String>,
    pub scatter: Option<String>,
}

impl RunManifest {
    fn to_json(&self) -> String {
        serde_json::to_string(self).expect("manifest serializes")
    }

    pub fn csv_header(&self) -> String {
        format!("{CSV_PREFIX}{}\n", self.to_json())
    }

    /// `--` may not appear inside an XML comment; JSON lets us escape it.
    pub fn svg_header(&self) -> String {
        format!("{SVG_PREFIX}{}{SVG_SUFFIX}\n", self.to_json().replace("--", "-\\u002d"))
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("bad manifest: {e}"))
    }

    /// Finds the manifest in a CSV, SVG or JSON output.
    pub fn extract(content: &str) -> Result<Self, String> {
        for line in content.lines().take(4) {
            if let Some(rest) = line.strip_prefix(CSV_PREFIX) {
                return Self::from_json(rest);
            }
            if let Some(rest) = line.strip_prefix(SVG_PREFIX) {
                return Self::from_json(rest.strip_suffix(SVG_SUFFIX).unwrap_or(rest));
            }
        }
        #[derive(Deserialize)]
        struct Wrapped {
            manifest: RunManifest,
        }
        serde_json::from_str::<Wrapped>(content).map(|w| w.manifest).map_err(|_| "no rqeom manifest found".to_string())
    }
}
