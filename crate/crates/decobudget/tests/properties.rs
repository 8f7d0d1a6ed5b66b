//! Randomized property tests for the kinematics, response, spectra, and
//! observable layers: invariants that must hold for *any* admissible
//! input, not just the tabulated mission points.

use proptest::prelude::*;

use decobudget::constants::{ANGSTROM_PER_INV_EV, M_PER_INV_EV, T_SUN_K};
use decobudget::kinematics::{q_max, recoil_energy};
use decobudget::missions::MissionConfig;
use decobudget::observables::{decoherence_per_object, port_statistics, qnl_sigma, visibility};
use decobudget::response::{
    decoherence_factor, helm_ff, structure_function, uniform_sphere_ff, StructureBasis,
};
use decobudget::spectra::{
    solar_photon_spectrum, solar_wind_spectrum, PhotonSource, SOLAR_WIND_BAND_EV,
    SOLAR_WIND_DENSITY_CM3,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// q_max grows monotonically with kinetic energy at fixed masses.
    #[test]
    fn q_max_monotone_in_kinetic_energy(
        m in 0.0f64..1e9,
        big_m in 1e3f64..1e12,
        k1 in 1e-6f64..1e11,
        factor in 1.0001f64..100.0,
    ) {
        let k2 = k1 * factor;
        let q1 = q_max(m, big_m, k1).unwrap();
        let q2 = q_max(m, big_m, k2).unwrap();
        prop_assert!(q2 > q1, "q_max({k2}) = {q2} <= q_max({k1}) = {q1}");
    }

    /// Massless probes transfer at most 2ω, saturating as M → ∞.
    #[test]
    fn q_max_massless_bounded_by_two_omega(
        omega in 1e-6f64..1e11,
        big_m in 1e3f64..1e12,
    ) {
        let q = q_max(0.0, big_m, omega).unwrap();
        prop_assert!(q <= 2.0 * omega * (1.0 + 1e-12));
        // In the infinitely-heavy-target limit the bound is attained.
        let q_heavy = q_max(0.0, 1e30, omega).unwrap();
        prop_assert!((q_heavy - 2.0 * omega).abs() <= 2.0 * omega * 1e-9);
    }

    /// The target recoil at the kinematic endpoint never exceeds the
    /// probe's kinetic energy.
    #[test]
    fn recoil_at_endpoint_bounded_by_kinetic_energy(
        m in 0.0f64..1e9,
        big_m in 1e3f64..1e12,
        kinetic in 1e-6f64..1e11,
    ) {
        let q = q_max(m, big_m, kinetic).unwrap();
        let recoil = recoil_energy(q, big_m).unwrap();
        prop_assert!(
            recoil <= kinetic * (1.0 + 1e-9),
            "recoil {recoil} exceeds K {kinetic}"
        );
    }

    /// Zero kinetic energy means exactly zero momentum transfer.
    #[test]
    fn q_max_vanishes_at_zero_kinetic(m in 0.0f64..1e9, big_m in 1e3f64..1e12) {
        prop_assert_eq!(q_max(m, big_m, 0.0).unwrap(), 0.0);
    }

    /// Port probability stays in [0, 1] and the binomial variance is
    /// maximal at p = 1/2, for any exponent, phase, and ensemble size.
    #[test]
    fn port_probability_is_physical(
        s in 0.0f64..50.0,
        phi in -10.0f64..10.0,
        n in 1.0f64..1e12,
    ) {
        let (p, mean, var) = port_statistics(s, phi, n).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!((0.0..=n).contains(&mean));
        prop_assert!(var >= 0.0);
        prop_assert!(var <= n * 0.25 * (1.0 + 1e-12));
    }

    /// V ∈ (0, 1], ΔV ∈ [0, 1] (saturating at 1 once V underflows the
    /// rounding of 1 − V), and they sum to 1.
    #[test]
    fn visibility_pair_is_complementary(s in 0.0f64..700.0) {
        let (v, dv) = visibility(s).unwrap();
        prop_assert!(v > 0.0 && v <= 1.0);
        prop_assert!((0.0..=1.0).contains(&dv));
        prop_assert!((v + dv - 1.0).abs() < 1e-12);
    }

    /// ΔV is monotone: more rate, more time, or fewer independent
    /// objects can only lose more visibility.
    #[test]
    fn visibility_loss_monotonicities(
        gamma in 1e-8f64..1e6,
        t in 1e-3f64..1e4,
        n in 1.0f64..1e10,
        up in 1.01f64..10.0,
    ) {
        let dv = |g: f64, t: f64, n: f64| {
            visibility(decoherence_per_object(g, t, n).unwrap()).unwrap().1
        };
        let base = dv(gamma, t, n);
        prop_assert!(dv(gamma * up, t, n) >= base);
        prop_assert!(dv(gamma, t * up, n) >= base);
        prop_assert!(dv(gamma, t, n * up) <= base);
    }

    /// Readout noise improves with ensemble size and never beats the
    /// single-object value of 1/2.
    #[test]
    fn qnl_sigma_decreases_with_ensemble(n in 1.0f64..1e12, up in 1.01f64..100.0) {
        let s1 = qnl_sigma(n).unwrap();
        let s2 = qnl_sigma(n * up).unwrap();
        prop_assert!(s2 < s1);
        prop_assert!(s1 <= 0.5);
    }

    /// The angular decoherence factor 1 − sinc stays within [0, 2] and
    /// vanishes only at zero phase.
    #[test]
    fn decoherence_factor_bounded(x in 0.0f64..1e6) {
        let d = decoherence_factor(x);
        prop_assert!((0.0..=2.0).contains(&d));
    }

    /// Form factors are 1 at zero momentum and bounded by 1 in magnitude.
    #[test]
    fn form_factors_normalized(x in 0.0f64..1e4) {
        prop_assert!(uniform_sphere_ff(x).abs() <= 1.0 + 1e-12);
        prop_assert_eq!(uniform_sphere_ff(0.0), 1.0);
    }

    /// The structure factor never drops below its incoherent floor:
    /// n_units for whole atoms, and 0 for the nuclear bases.
    #[test]
    fn structure_factor_floors(
        q in 0.0f64..1e7,
        mission_idx in 0usize..4,
    ) {
        let mission = MissionConfig::builtin_all().swap_remove(mission_idx);
        let params = mission.structure_params();
        let atoms = structure_function(q, StructureBasis::Atoms, &params);
        prop_assert!(atoms >= params.n_units * (1.0 - 1e-12));
        for basis in [StructureBasis::Protons, StructureBasis::Neutrons] {
            let s = structure_function(q, basis, &params);
            prop_assert!(s >= 0.0);
            prop_assert!(s.is_finite());
        }
    }

    /// The Helm nuclear form factor is normalized at q = 0 and bounded.
    #[test]
    fn helm_form_factor_normalized(q in 0.0f64..1e7, mission_idx in 0usize..4) {
        let mission = MissionConfig::builtin_all().swap_remove(mission_idx);
        let params = mission.structure_params().nuclear;
        prop_assert!((helm_ff(0.0, params) - 1.0).abs() < 1e-12);
        prop_assert!(helm_ff(q, params).abs() <= 1.0 + 1e-12);
    }

    /// Spectra are exactly zero outside their support band.
    #[test]
    fn spectra_vanish_outside_support(k in 1e-9f64..1e13) {
        let photons = solar_photon_spectrum(PhotonSource::Blackbody {
            temperature_k: T_SUN_K,
        })
        .unwrap();
        let wind =
            solar_wind_spectrum(SOLAR_WIND_DENSITY_CM3, SOLAR_WIND_BAND_EV).unwrap();
        for spectrum in [&photons, &wind] {
            let (lo, hi) = spectrum.support();
            let value = spectrum.evaluate(k);
            if k < lo || k > hi {
                prop_assert_eq!(value, 0.0);
            } else {
                prop_assert!(value >= 0.0);
            }
        }
    }

    /// Length-unit conversions round-trip to machine precision.
    #[test]
    fn unit_conversions_round_trip(x_m in 1e-12f64..1e3) {
        let inv_ev = x_m / M_PER_INV_EV;
        let back = inv_ev * M_PER_INV_EV;
        prop_assert!((back - x_m).abs() <= x_m * 1e-12);
        let x_angstrom = x_m * 1e10;
        let via_angstrom = (x_angstrom / ANGSTROM_PER_INV_EV) * M_PER_INV_EV * 1e10;
        prop_assert!((via_angstrom - x_angstrom).abs() <= x_angstrom * 1e-12);
    }
}
