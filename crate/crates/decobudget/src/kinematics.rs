//! Elastic two-body kinematics in the laboratory frame.
//!
//! A background particle of mass `m` and kinetic energy `K` (total energy
//! ω = K + m) scatters off a target constituent of mass `M` initially at
//! rest. Everything here is a pure function in natural units (energies in
//! eV, lengths in eV⁻¹).

use crate::constants::{ANGSTROM3_TO_INV_EV3, ATOMIC_MASS_EV, R_ATOM_M};
use crate::error::{Error, Result};

/// An incoming background particle species.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSpecies {
    /// Rest mass in eV (photon exactly 0; neutrinos treated as massless).
    pub mass_ev: f64,
    /// Charge number Z_ion (0 for neutrals).
    pub charge_number: i32,
    /// Human-readable identifier.
    pub label: String,
}

impl ParticleSpecies {
    /// Massless photon.
    pub fn photon() -> Self {
        ParticleSpecies {
            mass_ev: 0.0,
            charge_number: 0,
            label: "photon".into(),
        }
    }

    /// Proton (solar wind and cosmic-ray primaries).
    pub fn proton() -> Self {
        ParticleSpecies {
            mass_ev: crate::constants::M_PROTON_EV,
            charge_number: 1,
            label: "proton".into(),
        }
    }

    /// Neutrino, treated as massless (m ≪ every relevant ω).
    pub fn neutrino() -> Self {
        ParticleSpecies {
            mass_ev: 0.0,
            charge_number: 0,
            label: "neutrino".into(),
        }
    }
}

/// The scattering target: one atom (or molecular unit) of the cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSpec {
    /// Nucleon number A of the atom / molecular unit.
    pub a: f64,
    /// Proton number Z of the atom (for SiO₂ the unit-averaged value).
    pub z: f64,
    /// Polarizability volume α_vol in Å³ per atom / molecular unit.
    pub polarizability_volume_a3: f64,
    /// Atom size for the momentum-transfer regime split, metres.
    pub r_atom_m: f64,
}

impl TargetSpec {
    /// Build a target; mass follows as `A ×` the atomic mass unit.
    pub fn new(a: f64, z: f64, polarizability_volume_a3: f64) -> Result<Self> {
        if a < 1.0 || z < 1.0 || z > a {
            return Err(Error::domain(format!(
                "target needs 1 ≤ Z ≤ A, got A={a}, Z={z}"
            )));
        }
        if polarizability_volume_a3 <= 0.0 {
            return Err(Error::domain("polarizability volume must be positive"));
        }
        Ok(TargetSpec {
            a,
            z,
            polarizability_volume_a3,
            r_atom_m: R_ATOM_M,
        })
    }

    /// Target mass M in eV.
    pub fn mass_ev(&self) -> f64 {
        self.a * ATOMIC_MASS_EV
    }

    /// Polarizability coupling α_N in eV⁻³: α_N = 4π α_vol.
    ///
    /// In Heaviside–Lorentz units the induced dipole is P = α_N E with
    /// α_N = 4π α_vol, which fixes the long-wavelength single-atom photon
    /// cross-section to σ = π k⁴ α_vol² (closed-form check in the
    /// cross-section module). The reference rate tables are consistent
    /// with exactly this normalization.
    pub fn alpha_n_inv_ev3(&self) -> f64 {
        4.0 * std::f64::consts::PI * self.polarizability_volume_a3 * ANGSTROM3_TO_INV_EV3
    }
}

/// A validated (ω, q) sample for one (species, target) pair.
#[derive(Debug, Clone, Copy)]
pub struct KinematicPoint {
    /// Total energy of the incoming particle, eV.
    pub omega_ev: f64,
    /// Kinetic energy K = ω − m, eV.
    pub kinetic_ev: f64,
    /// Momentum-transfer magnitude, eV.
    pub q_ev: f64,
}

impl KinematicPoint {
    /// Construct with domain checks: ω ≥ m and 0 ≤ q ≤ q_max.
    pub fn new(
        species: &ParticleSpecies,
        target_mass_ev: f64,
        omega_ev: f64,
        q_ev: f64,
    ) -> Result<Self> {
        let m = species.mass_ev;
        if omega_ev < m {
            return Err(Error::domain(format!(
                "total energy {omega_ev:e} eV below rest mass {m:e} eV"
            )));
        }
        let kinetic_ev = omega_ev - m;
        let cap = q_max(m, target_mass_ev, kinetic_ev)?;
        if q_ev < 0.0 || q_ev > cap * (1.0 + 1e-12) {
            return Err(Error::domain(format!(
                "momentum transfer {q_ev:e} eV outside [0, {cap:e}] eV"
            )));
        }
        Ok(KinematicPoint {
            omega_ev,
            kinetic_ev,
            q_ev,
        })
    }
}

/// Maximum elastic momentum transfer for incoming mass `m`, target mass
/// `M`, kinetic energy `K` (all eV):
///
/// q_max = 2M √(K² + 2mK) (M + m + K) / ((M + m)² + 2MK).
///
/// Exactly 0 at K = 0. For m = 0 this is 2ω(M + ω)/(M + 2ω) ≤ 2ω; for
/// m = M it reduces exactly to the incoming momentum p = √(K² + 2mK).
pub fn q_max(m: f64, big_m: f64, kinetic: f64) -> Result<f64> {
    if big_m <= 0.0 {
        return Err(Error::domain("target mass must be positive"));
    }
    if kinetic < 0.0 || m < 0.0 {
        return Err(Error::domain("mass and kinetic energy must be nonnegative"));
    }
    if kinetic == 0.0 {
        return Ok(0.0);
    }
    let p = (kinetic * (kinetic + 2.0 * m)).sqrt();
    Ok(2.0 * big_m * p * (big_m + m + kinetic) / ((big_m + m).powi(2) + 2.0 * big_m * kinetic))
}

/// Target recoil energy √(M² + q²) − M, evaluated in the cancellation-free
/// form q² / (M + √(M² + q²)); ≈ q²/2M for q ≪ M.
pub fn recoil_energy(q: f64, big_m: f64) -> Result<f64> {
    if big_m <= 0.0 {
        return Err(Error::domain("target mass must be positive"));
    }
    if q < 0.0 {
        return Err(Error::domain("momentum transfer must be nonnegative"));
    }
    Ok(q * q / (big_m + big_m.hypot(q)))
}

/// Mandelstam invariants in the lab frame:
/// s = M² + m² + 2ωM, and t = 2M²(1 − √(1 + q²/M²)) evaluated in the
/// cancellation-free form −2q²/(1 + √(1 + q²/M²)); t ≤ 0 always, and
/// t → −q² for q ≪ M.
pub fn mandelstam_lab(m: f64, big_m: f64, omega: f64, q: f64) -> Result<(f64, f64)> {
    if big_m <= 0.0 {
        return Err(Error::domain("target mass must be positive"));
    }
    if omega < m {
        return Err(Error::domain("total energy below rest mass"));
    }
    if q < 0.0 {
        return Err(Error::domain("momentum transfer must be nonnegative"));
    }
    let s = big_m * big_m + m * m + 2.0 * omega * big_m;
    let ratio = q / big_m;
    let t = -2.0 * q * q / (1.0 + (1.0 + ratio * ratio).sqrt());
    Ok((s, t))
}

/// Convert a spectral number flux dΦ/dω into a spectral number density
/// dn/dω = (dΦ/dω) · ω/√(ω² − m²) (i.e. divide by the particle speed).
/// For massless species this is the identity. Errors at ω ≤ m where the
/// speed vanishes and the density diverges.
pub fn flux_to_density(spectral_flux: f64, m: f64, omega: f64) -> Result<f64> {
    if m == 0.0 {
        if omega <= 0.0 {
            return Err(Error::domain("photon energy must be positive"));
        }
        return Ok(spectral_flux);
    }
    if omega <= m {
        return Err(Error::domain(format!(
            "zero-velocity divergence: ω = {omega:e} eV ≤ m = {m:e} eV"
        )));
    }
    let p = ((omega - m) * (omega + m)).sqrt();
    Ok(spectral_flux * omega / p)
}
