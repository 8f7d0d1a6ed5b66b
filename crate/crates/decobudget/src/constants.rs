//! Physical constants and unit conversions.
//!
//! Internally the library works in natural units (ħ = c = 1) with energies
//! in eV and lengths in eV⁻¹. Conversions to and from laboratory units (m,
//! cm, s, W, Å, g) happen only at input/output boundaries through the
//! factors defined here, all of which are derived at compile time from the
//! CODATA values of ħc, ħ, and the electron charge so they cannot drift
//! apart.

/// ħc in eV·nm (CODATA 2018: 197.326 980 4 eV nm, exact to the digits given).
pub const HBARC_EV_NM: f64 = 197.326_980_4;

/// ħ in eV·s (CODATA 2018, exact by definition of the SI second and eV).
pub const HBAR_EV_S: f64 = 6.582_119_569e-16;

/// Fine-structure constant α (CODATA 2018).
pub const ALPHA: f64 = 7.297_352_569_3e-3;

/// Boltzmann constant in eV/K (exact in the 2019 SI).
pub const KB_EV_PER_K: f64 = 8.617_333_262e-5;

/// Proton mass in eV (CODATA 2018).
pub const M_PROTON_EV: f64 = 938.272_088_16e6;

/// Electron mass in eV (CODATA 2018).
pub const M_ELECTRON_EV: f64 = 0.510_998_950_00e6;

/// Atomic mass unit in eV (CODATA 2018). Target masses are A × this value;
/// exact isotopic masses are a sub-percent refinement far below the flux
/// uncertainties.
pub const ATOMIC_MASS_EV: f64 = 931.494_102_42e6;

/// Bohr radius in m (CODATA 2018).
pub const BOHR_RADIUS_M: f64 = 0.529_177_210_903e-10;

/// Z-boson mass in eV (PDG).
pub const M_Z_EV: f64 = 91.187_6e9;

/// Weak mixing angle sin²θ_W used for the tree-level Fermi constant.
pub const SIN2_THETA_W: f64 = 0.23;

/// Tree-level Fermi constant G_F = 4πα / (√2 m_Z² sin²2θ_W) in eV⁻².
///
/// This is the coupling the reference neutrino budget was computed with;
/// the measured value is available behind [`FermiConstant::Measured`].
/// Numerically 1.1008×10⁻⁵ GeV⁻².
///
/// [`FermiConstant::Measured`]: crate::rates::FermiConstant::Measured
pub const G_FERMI_COMPUTED_INV_EV2: f64 = 4.0 * std::f64::consts::PI * ALPHA
    / (std::f64::consts::SQRT_2 * M_Z_EV * M_Z_EV * (4.0 * SIN2_THETA_W * (1.0 - SIN2_THETA_W)));

/// Measured Fermi constant in eV⁻² (PDG, 1.1664×10⁻⁵ GeV⁻²).
pub const G_FERMI_MEASURED_INV_EV2: f64 = 1.1664e-23;

/// Electron charge in coulombs (exact in the 2019 SI); converts J to eV.
pub const E_CHARGE_C: f64 = 1.602_176_634e-19;

/// Speed of light in vacuum, m/s (SI exact).
pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

// ---------------------------------------------------------------------------
// Derived conversion factors (compile-time arithmetic on the values above).
// ---------------------------------------------------------------------------

/// Metres per eV⁻¹ of length: 1 eV⁻¹ = ħc = 1.9733×10⁻⁷ m.
pub const M_PER_INV_EV: f64 = HBARC_EV_NM * 1e-9;

/// Centimetres per eV⁻¹ of length.
pub const CM_PER_INV_EV: f64 = M_PER_INV_EV * 100.0;

/// Ångströms per eV⁻¹ of length.
pub const ANGSTROM_PER_INV_EV: f64 = M_PER_INV_EV * 1e10;

/// Rate conversion: multiply an eV-valued rate by this to get s⁻¹.
pub const EV_TO_PER_S: f64 = 1.0 / HBAR_EV_S;

/// Number density: 1 cm⁻³ expressed in eV³.
pub const CM3_DENSITY_TO_EV3: f64 = CM_PER_INV_EV * CM_PER_INV_EV * CM_PER_INV_EV;

/// Flux: 1 cm⁻² s⁻¹ expressed in eV³.
pub const CM2_S_FLUX_TO_EV3: f64 = CM_PER_INV_EV * CM_PER_INV_EV * HBAR_EV_S;

/// Polarizability volume: 1 Å³ expressed in eV⁻³.
pub const ANGSTROM3_TO_INV_EV3: f64 =
    1.0 / (ANGSTROM_PER_INV_EV * ANGSTROM_PER_INV_EV * ANGSTROM_PER_INV_EV);

/// Irradiance: 1 W/m² expressed in eV⁴ (energy flux in natural units).
pub const W_M2_TO_EV4: f64 = (1.0 / E_CHARGE_C) * HBAR_EV_S * (M_PER_INV_EV * M_PER_INV_EV);

// ---------------------------------------------------------------------------
// Shared model parameters.
// ---------------------------------------------------------------------------

/// Solar constant the photon spectrum is normalized to, W/m².
pub const SOLAR_CONSTANT_W_M2: f64 = 1366.1;

/// Solar effective (blackbody) temperature, K.
pub const T_SUN_K: f64 = 5772.0;

/// Atom size entering the charged-particle momentum-transfer split: the
/// Bohr radius rounded to 5×10⁻¹¹ m, the value the reference rate tables
/// were computed with.
pub const R_ATOM_M: f64 = 5e-11;

/// Low-q/intermediate split q_low = 1/(10 r_atom), in eV (≈ 394.65 eV).
pub const Q_LOW_EV: f64 = M_PER_INV_EV / (10.0 * R_ATOM_M);

/// Intermediate/high-q split q_high = 10/r_atom, in eV (≈ 39.47 keV).
pub const Q_HIGH_EV: f64 = 10.0 * M_PER_INV_EV / R_ATOM_M;

/// Experiment run time: one Julian year in seconds.
pub const YEAR_S: f64 = 365.25 * 86400.0;

/// Helm form-factor effective-radius coefficient: r_N = 1.14 A^{1/3} fm.
pub const HELM_RN_COEFF_FM: f64 = 1.14;

/// Helm form-factor nuclear skin thickness, fm.
pub const HELM_SKIN_FM: f64 = 0.9;

#[cfg(test)]
mod tests {
    use super::*;

    /// Relative agreement helper for frozen-value checks.
    fn close(a: f64, b: f64, rel: f64) {
        assert!(
            (a - b).abs() <= rel * b.abs(),
            "{a:e} vs {b:e} (rel {:e})",
            (a - b).abs() / b.abs()
        );
    }

    #[test]
    fn conversion_factors_match_frozen_values() {
        close(M_PER_INV_EV, 1.973_269_804e-7, 1e-12);
        close(CM3_DENSITY_TO_EV3, 7.683_505_569_453_846e-15, 1e-12);
        close(CM2_S_FLUX_TO_EV3, 2.562_941_583_796_853e-25, 1e-12);
        close(ANGSTROM3_TO_INV_EV3, 1.301_489_262_890_039e-10, 1e-12);
        close(W_M2_TO_EV4, 1.599_662_315_258_09e-10, 1e-12);
        close(EV_TO_PER_S, 1.519_267_447_996_127_2e15, 1e-12);
    }

    #[test]
    fn momentum_split_matches_frozen_values() {
        close(Q_LOW_EV, 394.653_960_8, 1e-12);
        close(Q_HIGH_EV, 39_465.396_08, 1e-12);
    }

    #[test]
    fn fermi_constant_tree_level_value() {
        // 4πα/(√2 m_Z² sin²2θ_W) with sin²θ_W = 0.23 → 1.1008×10⁻⁵ GeV⁻².
        close(G_FERMI_COMPUTED_INV_EV2, 1.100_804_185_627_127_4e-23, 1e-12);
        // The measured value differs from tree level by ~6%.
        close(
            G_FERMI_MEASURED_INV_EV2 / G_FERMI_COMPUTED_INV_EV2,
            1.0596,
            1e-3,
        );
    }

    #[test]
    fn year_is_julian() {
        assert_eq!(YEAR_S, 31_557_600.0);
    }

    #[test]
    fn boltzmann_times_sun_temperature() {
        // kT of the solar photosphere, the blackbody scale of the photon flux.
        close(KB_EV_PER_K * T_SUN_K, 0.497_392_475_882_64, 1e-12);
    }
}
