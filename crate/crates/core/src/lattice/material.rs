use serde::{Deserialize, Serialize};

use super::hamiltonian::{build_hamiltonian, exact_spectrum, KPoint};
use crate::error::{Error, Result};

/// Tolerance (eV) for the Γ-point gap self-check on silicon parameter sets.
pub const GAMMA_SELF_CHECK_TOL: f64 = 0.02;

const SI_GAMMA_GAPS: [f64; 4] = [12.16, 12.16, 12.16, 16.26];

const SI_TOML: &str = include_str!("../../materials/si.toml");
const GAAS_TOML: &str = include_str!("../../materials/gaas.toml");

/// Two-centre sp³ parameter set of a diamond/zincblende crystal (eV).
///
/// Field names in the config file match the physical symbols exactly
/// (`E_s_a`, `V_sa_pc`, ...). Anion quantities carry `a`, cation `c`;
/// `V_sa_pc` couples anion s to cation p, `V_sc_pa` cation s to anion p.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialParams {
    pub name: String,
    /// Ångström. Only documents the scale of k; k is given in 2π/a.
    pub lattice_constant: f64,
    #[serde(rename = "E_s_a")]
    pub e_s_a: f64,
    #[serde(rename = "E_s_c")]
    pub e_s_c: f64,
    #[serde(rename = "E_p_a")]
    pub e_p_a: f64,
    #[serde(rename = "E_p_c")]
    pub e_p_c: f64,
    #[serde(rename = "V_ss")]
    pub v_ss: f64,
    #[serde(rename = "V_sc_pa")]
    pub v_sc_pa: f64,
    #[serde(rename = "V_sa_pc")]
    pub v_sa_pc: f64,
    #[serde(rename = "V_xx")]
    pub v_xx: f64,
    #[serde(rename = "V_xy")]
    pub v_xy: f64,
}

impl MaterialParams {
    pub fn silicon() -> Self {
        Self::from_toml_str(SI_TOML).expect("bundled Si parameters are valid")
    }

    pub fn gallium_arsenide() -> Self {
        Self::from_toml_str(GAAS_TOML).expect("bundled GaAs parameters are valid")
    }

    /// Resolves `si` / `gaas` to the bundled sets, anything else as a path.
    pub fn resolve(name_or_path: &str) -> Result<Self> {
        match name_or_path.to_ascii_lowercase().as_str() {
            "si" | "silicon" => Ok(Self::silicon()),
            "gaas" => Ok(Self::gallium_arsenide()),
            _ => Self::load(name_or_path),
        }
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let params: MaterialParams = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        params.validate()?;
        Ok(params)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("material params serialize")
    }

    fn energies(&self) -> [(&'static str, f64); 10] {
        [
            ("lattice_constant", self.lattice_constant),
            ("E_s_a", self.e_s_a),
            ("E_s_c", self.e_s_c),
            ("E_p_a", self.e_p_a),
            ("E_p_c", self.e_p_c),
            ("V_ss", self.v_ss),
            ("V_sc_pa", self.v_sc_pa),
            ("V_sa_pc", self.v_sa_pc),
            ("V_xx", self.v_xx),
            ("V_xy", self.v_xy),
        ]
    }

    pub fn is_homopolar(&self) -> bool {
        self.e_s_a == self.e_s_c && self.e_p_a == self.e_p_c && self.v_sa_pc == self.v_sc_pa
    }

    fn is_silicon(&self) -> bool {
        matches!(self.name.to_ascii_lowercase().as_str(), "si" | "silicon")
    }

    /// Checks finiteness, warns on unusual signs, and for silicon verifies
    /// that the Γ-point gaps come out at 12.16 and 16.26 eV.
    pub fn validate(&self) -> Result<()> {
        for (key, value) in self.energies() {
            if !value.is_finite() {
                return Err(Error::config(format!("{key} is not finite")));
            }
        }
        if self.lattice_constant <= 0.0 {
            return Err(Error::config("lattice_constant must be positive"));
        }
        if self.v_ss >= 0.0 {
            log::warn!("{}: V_ss = {} is not negative", self.name, self.v_ss);
        }
        if self.is_silicon() {
            if !self.is_homopolar() {
                return Err(Error::config("silicon parameters must be homopolar"));
            }
            let energies = exact_spectrum(&build_hamiltonian(self, KPoint::GAMMA)?);
            for (n, expected) in SI_GAMMA_GAPS.iter().enumerate() {
                let gap = energies[n + 1] - energies[0];
                if (gap - expected).abs() > GAMMA_SELF_CHECK_TOL {
                    return Err(Error::config(format!(
                        "silicon Γ gap {} is {gap:.4} eV, expected {expected} ± {GAMMA_SELF_CHECK_TOL}",
                        n + 1
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_sets_load() {
        let si = MaterialParams::silicon();
        assert!(si.is_homopolar());
        let gaas = MaterialParams::gallium_arsenide();
        assert!(!gaas.is_homopolar());
    }

    #[test]
    fn unknown_key_is_rejected() {
        let text = format!("{}\nV_sss = 1.0\n", SI_TOML);
        assert!(matches!(MaterialParams::from_toml_str(&text), Err(Error::Config(_))));
    }

    #[test]
    fn missing_key_is_rejected() {
        let text: String = SI_TOML.lines().filter(|l| !l.starts_with("V_xy")).collect::<Vec<_>>().join("\n");
        assert!(MaterialParams::from_toml_str(&text).is_err());
    }

    #[test]
    fn silicon_self_check_catches_bad_parameters() {
        let mut si = MaterialParams::silicon();
        si.v_xx += 0.1;
        let err = si.validate().unwrap_err();
        assert!(err.to_string().contains("Γ gap"), "{err}");
    }

    #[test]
    fn toml_round_trip() {
        let gaas = MaterialParams::gallium_arsenide();
        let back = MaterialParams::from_toml_str(&gaas.to_toml_string()).unwrap();
        assert_eq!(gaas, back);
    }

    #[test]
    fn non_finite_value_is_rejected() {
        let text = SI_TOML.replace("V_xx = 3.17", "V_xx = nan");
        assert!(MaterialParams::from_toml_str(&text).is_err());
    }
}
