//! Mission configurations: the interferometer and test-mass parameters
//! for the four built-in space platforms, plus TOML loading for custom
//! configurations.

use std::path::Path;

use serde::Deserialize;

use crate::constants::{ATOMIC_MASS_EV, M_PER_INV_EV, R_ATOM_M, YEAR_S};
use crate::error::{Error, Result};
use crate::kinematics::TargetSpec;
use crate::response::{CoherentNucleonCount, FormFactorParams, StructureMode, StructureParams};

/// One mission's full physical configuration.
#[derive(Debug, Clone)]
pub struct MissionConfig {
    /// Mission name as printed in tables.
    pub name: String,
    /// The scattering target (one atom / molecular unit of the cloud).
    pub target: TargetSpec,
    /// Atoms or molecular units per cloud.
    pub n_units: f64,
    /// Independently interfering objects per shot (clouds of the
    /// nanosphere type: 1; cold-atom clouds: the atom number).
    pub n_independent: f64,
    /// Cloud radius, metres.
    pub r_cloud_m: f64,
    /// Arm separation Δx of the superposition, metres.
    pub delta_x_m: f64,
    /// Duration of one interferometric shot, seconds.
    pub t_shot_s: f64,
    /// Total exposure (integration) time available to the experiment,
    /// seconds.  Defaults to one Julian year.
    pub t_exp_s: f64,
    /// Atom-coherent vs. matter-coherent structural response.
    pub mode: StructureMode,
    /// Weighting of the nuclear-coherent proton-basis term.
    pub coherent_count: CoherentNucleonCount,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MissionToml {
    name: String,
    target: TargetToml,
    cloud: CloudToml,
    interferometer: InterferometerToml,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TargetToml {
    nucleon_number: f64,
    proton_number: f64,
    polarizability_volume_a3: f64,
    r_atom_m: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CloudToml {
    n_units: Option<f64>,
    n_nucleons: Option<f64>,
    n_independent: f64,
    radius_m: f64,
    mode: String,
    coherent_count: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InterferometerToml {
    separation_m: f64,
    shot_time_s: f64,
    exposure_time_s: Option<f64>,
}

const MAQRO_TOML: &str = include_str!("../data/missions/maqro.toml");
const BECCAL_TOML: &str = include_str!("../data/missions/beccal.toml");
const GDM_TOML: &str = include_str!("../data/missions/gdm.toml");
const AEDGE_TOML: &str = include_str!("../data/missions/aedge.toml");

/// Canonical order of the built-in missions in every table.
pub const BUILTIN_MISSION_NAMES: [&str; 4] = ["MAQRO", "BECCAL", "GDM", "AEDGE"];

impl MissionConfig {
    /// Parse a mission from TOML text.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: MissionToml =
            toml::from_str(text).map_err(|e| Error::config(format!("mission TOML: {e}")))?;
        raw.validate()
    }

    /// Load a mission from a TOML file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                Error::MissingData(path.to_path_buf())
            } else {
                Error::Io(e)
            }
        })?;
        Self::from_toml_str(&text)
    }

    /// Look up a built-in mission by (case-insensitive) name.
    pub fn builtin(name: &str) -> Result<Self> {
        let text = match name.to_ascii_uppercase().as_str() {
            "MAQRO" => MAQRO_TOML,
            "BECCAL" => BECCAL_TOML,
            "GDM" => GDM_TOML,
            "AEDGE" => AEDGE_TOML,
            _ => {
                return Err(Error::config(format!(
                    "unknown mission '{name}' (built-in: {})",
                    BUILTIN_MISSION_NAMES.join(", ")
                )))
            }
        };
        Self::from_toml_str(text)
    }

    /// All four built-in missions in canonical order.
    pub fn builtin_all() -> Vec<Self> {
        BUILTIN_MISSION_NAMES
            .iter()
            .map(|n| Self::builtin(n).expect("built-in mission presets always parse"))
            .collect()
    }

    /// Mass of one cloud unit (atom / molecule) in eV.
    pub fn unit_mass_ev(&self) -> f64 {
        self.target.a * ATOMIC_MASS_EV
    }

    /// Cloud radius in eV⁻¹.
    pub fn r_cloud_inv_ev(&self) -> f64 {
        self.r_cloud_m / M_PER_INV_EV
    }

    /// Arm separation in eV⁻¹.
    pub fn delta_x_inv_ev(&self) -> f64 {
        self.delta_x_m / M_PER_INV_EV
    }

    /// Structure-function parameters for this cloud.
    pub fn structure_params(&self) -> StructureParams {
        StructureParams {
            n_units: self.n_units,
            a: self.target.a,
            z: self.target.z,
            r_cloud_inv_ev: self.r_cloud_inv_ev(),
            nuclear: FormFactorParams::helm(self.target.a),
            mode: self.mode,
            coherent_count: self.coherent_count,
        }
    }
}

impl MissionToml {
    fn validate(self) -> Result<MissionConfig> {
        if self.name.trim().is_empty() {
            return Err(Error::config("mission name must be nonempty"));
        }
        let mut target = TargetSpec::new(
            self.target.nucleon_number,
            self.target.proton_number,
            self.target.polarizability_volume_a3,
        )?;
        target.r_atom_m = match self.target.r_atom_m {
            Some(r) if r > 0.0 => r,
            Some(_) => return Err(Error::config("r_atom_m must be positive")),
            None => R_ATOM_M,
        };
        let n_units = match (self.cloud.n_units, self.cloud.n_nucleons) {
            (Some(n), None) => n,
            (None, Some(nn)) => nn / self.target.nucleon_number,
            _ => {
                return Err(Error::config(
                    "specify exactly one of cloud.n_units, cloud.n_nucleons",
                ))
            }
        };
        if !(n_units >= 1.0) {
            return Err(Error::config("cloud must contain at least one unit"));
        }
        if !(self.cloud.n_independent >= 1.0) {
            return Err(Error::config("n_independent must be at least 1"));
        }
        if !(self.cloud.radius_m > 0.0) {
            return Err(Error::config("cloud radius must be positive"));
        }
        if !(self.interferometer.separation_m > 0.0) {
            return Err(Error::config("arm separation must be positive"));
        }
        if !(self.interferometer.shot_time_s > 0.0) {
            return Err(Error::config("shot time must be positive"));
        }
        let t_exp_s = self.interferometer.exposure_time_s.unwrap_or(YEAR_S);
        if !(t_exp_s > 0.0) {
            return Err(Error::config("exposure time must be positive"));
        }
        let mode = match self.cloud.mode.as_str() {
            "matter-coherent" => StructureMode::MatterCoherent,
            "cold-atom" => StructureMode::ColdAtom,
            other => {
                return Err(Error::config(format!(
                    "cloud.mode must be 'matter-coherent' or 'cold-atom', got '{other}'"
                )))
            }
        };
        let coherent_count = match self.cloud.coherent_count.as_deref() {
            None | Some("nucleon-number") => CoherentNucleonCount::NucleonNumber,
            Some("proton-number") => CoherentNucleonCount::ProtonNumber,
            Some(other) => {
                return Err(Error::config(format!(
                "cloud.coherent_count must be 'nucleon-number' or 'proton-number', got '{other}'"
            )))
            }
        };
        Ok(MissionConfig {
            name: self.name,
            target,
            n_units,
            n_independent: self.cloud.n_independent,
            r_cloud_m: self.cloud.radius_m,
            delta_x_m: self.interferometer.separation_m,
            t_shot_s: self.interferometer.shot_time_s,
            t_exp_s,
            mode,
            coherent_count,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn builtin_presets_match_published_parameters() {
        let all = MissionConfig::builtin_all();
        assert_eq!(all.len(), 4);
        let names: Vec<&str> = all.iter().map(|m| m.name.as_str()).collect();
        assert_eq!(names, BUILTIN_MISSION_NAMES);

        let maqro = &all[0];
        assert_eq!(maqro.target.a, 60.0);
        assert_eq!(maqro.target.z, 30.0);
        assert_eq!(maqro.target.polarizability_volume_a3, 4.84);
        assert_relative_eq!(maqro.n_units, 166666666.66666666, max_relative = 1e-14);
        assert_eq!(maqro.n_independent, 1.0);
        assert_eq!(maqro.r_cloud_m, 1.2e-7);
        assert_eq!(maqro.delta_x_m, 1e-7);
        assert_eq!(maqro.t_shot_s, 100.0);
        assert_eq!(maqro.mode, StructureMode::MatterCoherent);

        let beccal = &all[1];
        assert_eq!(beccal.target.a, 87.0);
        assert_eq!(beccal.target.z, 37.0);
        assert_eq!(beccal.target.polarizability_volume_a3, 47.39);
        assert_relative_eq!(beccal.n_units, 1e6, max_relative = 1e-14);
        assert_eq!(beccal.n_independent, 1e6);
        assert_eq!(beccal.r_cloud_m, 1.5e-4);
        assert_eq!(beccal.delta_x_m, 3e-3);
        assert_eq!(beccal.t_shot_s, 2.6);
        assert_eq!(beccal.mode, StructureMode::ColdAtom);

        let gdm = &all[2];
        assert_eq!(gdm.n_units, 1e8);
        assert_eq!(gdm.n_independent, 1e8);
        assert_eq!(gdm.r_cloud_m, 1e-3);
        assert_eq!(gdm.delta_x_m, 25.0);
        assert_eq!(gdm.t_shot_s, 20.0);

        let aedge = &all[3];
        assert_eq!(aedge.target.z, 38.0);
        assert_relative_eq!(
            aedge.target.polarizability_volume_a3,
            28.51073848724412,
            max_relative = 1e-14
        );
        assert_relative_eq!(aedge.n_units, 1e10, max_relative = 1e-14);
        assert_eq!(aedge.n_independent, 1e10);
        assert_eq!(aedge.r_cloud_m, 3e-3);
        assert_eq!(aedge.delta_x_m, 0.9);
        assert_eq!(aedge.t_shot_s, 600.0);

        // Rb-87 / Sr-87 unit mass.
        assert_relative_eq!(
            beccal.unit_mass_ev(),
            87.0 * ATOMIC_MASS_EV,
            max_relative = 1e-15
        );
    }

    #[test]
    fn builtin_lookup_is_case_insensitive() {
        assert_eq!(MissionConfig::builtin("maqro").unwrap().name, "MAQRO");
        assert!(MissionConfig::builtin("voyager").is_err());
    }

    #[test]
    fn toml_validation_errors() {
        let base = |cloud: &str| {
            format!(
                "name = \"X\"\n[target]\nnucleon_number = 87.0\nproton_number = 37.0\n\
                 polarizability_volume_a3 = 47.39\n[cloud]\n{cloud}\n\
                 [interferometer]\nseparation_m = 1.0\nshot_time_s = 1.0\n"
            )
        };
        // Both population fields set.
        let bad = base("n_units = 1e6\nn_nucleons = 8.7e7\nn_independent = 1.0\nradius_m = 1e-4\nmode = \"cold-atom\"");
        assert!(MissionConfig::from_toml_str(&bad).is_err());
        // Neither set.
        let bad = base("n_independent = 1.0\nradius_m = 1e-4\nmode = \"cold-atom\"");
        assert!(MissionConfig::from_toml_str(&bad).is_err());
        // Bad mode string.
        let bad = base("n_units = 1e6\nn_independent = 1.0\nradius_m = 1e-4\nmode = \"solid\"");
        assert!(MissionConfig::from_toml_str(&bad).is_err());
        // Unknown field rejected.
        let bad = base("n_units = 1e6\nn_independent = 1.0\nradius_m = 1e-4\nmode = \"cold-atom\"\nbogus = 1.0");
        assert!(MissionConfig::from_toml_str(&bad).is_err());
        // Valid one parses, with nucleon count defaulting appropriately.
        let good =
            base("n_units = 1e6\nn_independent = 1.0\nradius_m = 1e-4\nmode = \"cold-atom\"");
        let m = MissionConfig::from_toml_str(&good).unwrap();
        assert_eq!(m.coherent_count, CoherentNucleonCount::NucleonNumber);
        assert_eq!(m.target.r_atom_m, R_ATOM_M);
    }

    #[test]
    fn structure_params_mirror_mission_fields() {
        let m = MissionConfig::builtin("BECCAL").unwrap();
        let p = m.structure_params();
        assert_eq!(p.n_units, m.n_units);
        assert_eq!(p.a, 87.0);
        assert_eq!(p.z, 37.0);
        assert_relative_eq!(
            p.r_cloud_inv_ev,
            1.5e-4 / M_PER_INV_EV,
            max_relative = 1e-15
        );
        assert_eq!(p.mode, StructureMode::ColdAtom);
    }
}
