//! Acceptance gate: ten end-to-end checks, one per shipped guarantee,
//! each printing a single PASS/FAIL line.
//!
//! 1.  Solar-photon rates within ×2 of the published table (both the
//!     blackbody model and the shipped irradiance file).
//! 2.  Solar-wind low-q/high-q rates within 50% of the published table.
//! 3.  Cosmic-ray rates within ×2 of the published table from the
//!     shipped spectrum file; <5% sensitivity to the 100 GeV cutoff.
//! 4.  Dust rates within ×3 and neutrino rates within ×2 of the
//!     published tables, from the shipped model files.
//! 5.  Derived visibility/SNR/noise/measurement-count columns
//!     reproduce the published budget table at its printed precision.
//! 6.  Cross-section-route rates equal master-formula rates to 1e-4 on
//!     the full 16-case mission × channel matrix.
//! 7.  Monte-Carlo angular factor matches 1 − sinc(qΔx) within 3σ at
//!     1e6 samples; MC error scales as n^(−1/2 ± 0.1).
//! 8.  Scaling laws: banded photon rate ∝ r_cloud⁻⁴; cold-atom rates
//!     ∝ N_atoms; solar-wind high-q rate invariant (<1%) over a decade
//!     of Δx and r_cloud.
//! 9.  Trivial limits: Δx = 0 and zero flux give exactly-zero rates;
//!     form factors are exactly 1 at q = 0; q_max(K=0) = 0;
//!     single-object readout noise is exactly 1/2.
//! 10. Byte-identical outputs for fixed seed and config, regardless of
//!     thread count.

use std::path::{Path, PathBuf};
use std::process::Command;

use decobudget::kinematics::{q_max, TargetSpec};
use decobudget::missions::MissionConfig;
use decobudget::observables::{
    decoherence_per_object, fit_loglog_slope, n_measurements, qnl_sigma, scan, visibility,
    ScanParameter,
};
use decobudget::rates::{
    background_rate, rate_neutrino, rate_solar_photons, Background, BackgroundSources,
    ChargedRegime, QuadratureConfig,
};
use decobudget::response::{helm_ff, uniform_sphere_ff, StructureMode};
use decobudget::spectra::{
    cosmic_ray_spectrum, solar_neutrino_spectrum, CosmicRaySource, COSMIC_RAY_CUTOFF_EV,
};
use decobudget::validate::{all_passed, run_suite, Suite, ValidateOptions};

const MISSIONS: [&str; 4] = ["MAQRO", "BECCAL", "GDM", "AEDGE"];

/// Published per-background rates (s⁻¹), mission order as above.
const PUBLISHED_PHOTON_RATES: [f64; 4] = [1.2e7, 0.41, 4.1e1, 1.5e3];
const PUBLISHED_WIND_LOW: [f64; 4] = [2.2e1, 2.0, 1.9e2, 7.0e3];
const PUBLISHED_WIND_HIGH: [f64; 4] = [4.4e3, 5.5e1, 5.5e3, 5.5e5];
const PUBLISHED_CR_LOW: [f64; 4] = [1.7e-11, 1.4e-12, 1.4e-10, 5.2e-9];
const PUBLISHED_CR_HIGH: [f64; 4] = [2.8e-9, 3.5e-11, 3.5e-9, 3.5e-7];
const PUBLISHED_DUST: [f64; 4] = [2.2e-14, 2.4e-8, 1.1e-6, 9.6e-6];
const PUBLISHED_NEUTRINO: [f64; 4] = [3.2e-24, 4.1e-26, 4.1e-24, 4.1e-22];

/// Published derived-budget table: per mission, (ΔV, SNR_shot) for
/// photons / wind / cosmic rays, then σ_V^QNL and N_meas.
struct PublishedBudgetRow {
    delta_v: [f64; 3],
    snr_shot: [f64; 3],
    sigma_qnl: f64,
    n_meas: f64,
}

const PUBLISHED_BUDGET: [PublishedBudgetRow; 4] = [
    PublishedBudgetRow {
        delta_v: [1.0, 1.0, 3e-7],
        snr_shot: [2.0, 2.0, 6e-7],
        sigma_qnl: 0.5,
        n_meas: 3e5,
    },
    PublishedBudgetRow {
        delta_v: [1e-6, 2e-4, 1e-16],
        snr_shot: [2e-3, 0.4, 2e-13],
        sigma_qnl: 5e-4,
        n_meas: 1e7,
    },
    PublishedBudgetRow {
        delta_v: [1e-5, 1e-3, 7e-16],
        snr_shot: [0.2, 2e1, 1e-11],
        sigma_qnl: 5e-5,
        n_meas: 2e6,
    },
    PublishedBudgetRow {
        delta_v: [9e-5, 3e-2, 2e-14],
        snr_shot: [2e1, 6e3, 4e-9],
        sigma_qnl: 5e-6,
        n_meas: 5e4,
    },
];

fn repo_data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .canonicalize()
        .expect("shipped data directory exists")
}

fn default_cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn builtin_missions() -> Vec<MissionConfig> {
    MISSIONS
        .iter()
        .map(|name| MissionConfig::builtin(name).unwrap())
        .collect()
}

fn sources_from_files() -> BackgroundSources {
    decobudget::data::load_sources(Some(&repo_data_dir()))
        .unwrap()
        .sources
}

/// Ratio gate: computed within `factor` of published, both directions.
fn within_factor(computed: f64, published: f64, factor: f64) -> bool {
    computed > 0.0 && computed / published <= factor && published / computed <= factor
}

/// One unit in the last printed digit: published entries carry one
/// significant figure, so the band is 0.7 × 10^⌊log₁₀ published⌋.
fn printed_precision_band(published: f64) -> f64 {
    0.7 * 10f64.powf(published.abs().log10().floor())
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "{} {criterion}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

#[test]
fn c01_solar_photon_rates_match_published_table() {
    let cfg = default_cfg();
    let builtin = BackgroundSources::builtin().unwrap();
    let from_files = sources_from_files();
    let mut pass = true;
    let mut worst: f64 = 1.0;
    for (i, mission) in builtin_missions().iter().enumerate() {
        for (label, sources) in [("blackbody", &builtin), ("irradiance-file", &from_files)] {
            let rate = rate_solar_photons(mission, &sources.photons, &cfg).unwrap();
            assert!(rate.converged, "{} {label} photon quadrature", mission.name);
            let ok = within_factor(rate.gamma_tot_per_s, PUBLISHED_PHOTON_RATES[i], 2.0);
            let ratio = rate.gamma_tot_per_s / PUBLISHED_PHOTON_RATES[i];
            worst = worst.max(ratio.max(1.0 / ratio));
            pass &= ok;
            assert!(
                ok,
                "{} {label}: {} vs published {} (ratio {ratio:.3})",
                mission.name, rate.gamma_tot_per_s, PUBLISHED_PHOTON_RATES[i]
            );
        }
    }
    report(
        "criterion-01 solar-photon rates (x2, blackbody and file)",
        pass,
        &format!("8/8 within factor 2, worst ratio {worst:.3}"),
    );
}

#[test]
fn c02_solar_wind_rates_match_published_table() {
    let cfg = default_cfg();
    let sources = BackgroundSources::builtin().unwrap();
    let mut pass = true;
    let mut worst: f64 = 0.0;
    for (i, mission) in builtin_missions().iter().enumerate() {
        for (regime, published) in [
            (ChargedRegime::Low, PUBLISHED_WIND_LOW[i]),
            (ChargedRegime::High, PUBLISHED_WIND_HIGH[i]),
        ] {
            let rate =
                background_rate(mission, Background::SolarWind, &sources, regime, &cfg).unwrap();
            assert!(rate.converged);
            let rel = (rate.gamma_tot_per_s - published).abs() / published;
            worst = worst.max(rel);
            let ok = rel <= 0.5;
            pass &= ok;
            assert!(
                ok,
                "{} wind {regime:?}: {} vs published {published} (rel {rel:.3})",
                mission.name, rate.gamma_tot_per_s
            );
        }
    }
    report(
        "criterion-02 solar-wind rates (50%, low and high regimes)",
        pass,
        &format!("8/8 within 50%, worst deviation {:.1}%", worst * 100.0),
    );
}

#[test]
fn c03_cosmic_ray_rates_match_published_table_and_cutoff_is_soft() {
    let cfg = default_cfg();
    let sources = sources_from_files();
    let mut pass = true;
    let mut worst: f64 = 1.0;
    for (i, mission) in builtin_missions().iter().enumerate() {
        for (regime, published) in [
            (ChargedRegime::Low, PUBLISHED_CR_LOW[i]),
            (ChargedRegime::High, PUBLISHED_CR_HIGH[i]),
        ] {
            let rate =
                background_rate(mission, Background::CosmicRays, &sources, regime, &cfg).unwrap();
            assert!(rate.converged);
            let ok = within_factor(rate.gamma_tot_per_s, published, 2.0);
            let ratio = rate.gamma_tot_per_s / published;
            worst = worst.max(ratio.max(1.0 / ratio));
            pass &= ok;
            assert!(
                ok,
                "{} cosmic rays {regime:?}: {} vs published {published} (ratio {ratio:.3})",
                mission.name, rate.gamma_tot_per_s
            );
        }
    }

    // Cutoff sensitivity: extend the analysis window from 100 GeV to the
    // full tabulated 1 TeV reach and require < 5% change in the most
    // ultraviolet-sensitive cell (high-q, heaviest exposure).
    let table = repo_data_dir().join("cosmic_ray_protons_lis.csv");
    let spectrum_cut = cosmic_ray_spectrum(
        CosmicRaySource::TabulatedFile(table.clone()),
        COSMIC_RAY_CUTOFF_EV,
    )
    .unwrap();
    let spectrum_full = cosmic_ray_spectrum(CosmicRaySource::TabulatedFile(table), 1e12).unwrap();
    let mission = MissionConfig::builtin("AEDGE").unwrap();
    let with_sources = |spectrum| BackgroundSources {
        cosmic_rays: spectrum,
        ..BackgroundSources::builtin().unwrap()
    };
    let gamma_cut = background_rate(
        &mission,
        Background::CosmicRays,
        &with_sources(spectrum_cut),
        ChargedRegime::High,
        &cfg,
    )
    .unwrap()
    .gamma_tot_per_s;
    let gamma_full = background_rate(
        &mission,
        Background::CosmicRays,
        &with_sources(spectrum_full),
        ChargedRegime::High,
        &cfg,
    )
    .unwrap()
    .gamma_tot_per_s;
    let sensitivity = (gamma_full - gamma_cut).abs() / gamma_cut;
    let cutoff_ok = sensitivity < 0.05;
    pass &= cutoff_ok;
    assert!(cutoff_ok, "cutoff sensitivity {sensitivity:.3e} exceeds 5%");
    report(
        "criterion-03 cosmic-ray rates (x2) and 100 GeV cutoff (<5%)",
        pass,
        &format!(
            "8/8 within factor 2 (worst ratio {worst:.3}); cutoff sensitivity {sensitivity:.1e}"
        ),
    );
}

#[test]
fn c04_dust_and_neutrino_rates_match_published_tables() {
    let cfg = default_cfg();
    let sources = sources_from_files();
    let mut pass = true;
    let mut worst_dust: f64 = 1.0;
    let mut worst_nu: f64 = 1.0;
    for (i, mission) in builtin_missions().iter().enumerate() {
        let dust = background_rate(
            mission,
            Background::ZodiacalDust,
            &sources,
            ChargedRegime::Both,
            &cfg,
        )
        .unwrap();
        let ratio = dust.gamma_tot_per_s / PUBLISHED_DUST[i];
        worst_dust = worst_dust.max(ratio.max(1.0 / ratio));
        let dust_ok = within_factor(dust.gamma_tot_per_s, PUBLISHED_DUST[i], 3.0);
        pass &= dust_ok;
        assert!(
            dust_ok,
            "{} dust: {} vs published {} (ratio {ratio:.3})",
            mission.name, dust.gamma_tot_per_s, PUBLISHED_DUST[i]
        );

        let nu = background_rate(
            mission,
            Background::SolarNeutrinos,
            &sources,
            ChargedRegime::Both,
            &cfg,
        )
        .unwrap();
        let ratio = nu.gamma_tot_per_s / PUBLISHED_NEUTRINO[i];
        worst_nu = worst_nu.max(ratio.max(1.0 / ratio));
        let nu_ok = within_factor(nu.gamma_tot_per_s, PUBLISHED_NEUTRINO[i], 2.0);
        pass &= nu_ok;
        assert!(
            nu_ok,
            "{} neutrinos: {} vs published {} (ratio {ratio:.3})",
            mission.name, nu.gamma_tot_per_s, PUBLISHED_NEUTRINO[i]
        );
    }
    report(
        "criterion-04 dust (x3) and neutrino (x2) rates",
        pass,
        &format!("worst dust ratio {worst_dust:.3}, worst neutrino ratio {worst_nu:.3}"),
    );
}

#[test]
#[allow(clippy::needless_range_loop)] // index couples three parallel tables
fn c05_derived_budget_columns_match_published_at_printed_precision() {
    // The published derived columns are internally consistent with the
    // published one-significant-figure rates (ΔV recomputed from the
    // printed per-background rate; SNR from the printed ΔV), so the
    // observable chain is validated on exactly those inputs, within
    // 0.7 units of each cell's last printed digit.
    let published_rates: [[f64; 3]; 4] = {
        let mut rates = [[0.0; 3]; 4];
        for i in 0..4 {
            rates[i] = [
                PUBLISHED_PHOTON_RATES[i],
                PUBLISHED_WIND_LOW[i] + PUBLISHED_WIND_HIGH[i],
                PUBLISHED_CR_LOW[i] + PUBLISHED_CR_HIGH[i],
            ];
        }
        rates
    };
    let mut pass = true;
    let mut cells = 0;
    let mut worst_margin: f64 = 0.0;
    for (i, mission) in builtin_missions().iter().enumerate() {
        let row = &PUBLISHED_BUDGET[i];
        for b in 0..3 {
            let s = decoherence_per_object(
                published_rates[i][b],
                mission.t_shot_s,
                mission.n_independent,
            )
            .unwrap();
            let (_, dv) = visibility(s).unwrap();
            let band = printed_precision_band(row.delta_v[b]);
            let diff = (dv - row.delta_v[b]).abs();
            worst_margin = worst_margin.max(diff / band);
            let dv_ok = diff <= band;
            pass &= dv_ok;
            cells += 1;
            assert!(
                dv_ok,
                "{} background {b}: ΔV {dv:.4e} vs published {:.1e} (band {band:.1e})",
                mission.name, row.delta_v[b]
            );

            let snr = 2.0 * mission.n_independent.sqrt() * row.delta_v[b];
            let band = printed_precision_band(row.snr_shot[b]);
            let diff = (snr - row.snr_shot[b]).abs();
            worst_margin = worst_margin.max(diff / band);
            let snr_ok = diff <= band;
            pass &= snr_ok;
            cells += 1;
            assert!(
                snr_ok,
                "{} background {b}: SNR {snr:.4e} vs published {:.1e} (band {band:.1e})",
                mission.name, row.snr_shot[b]
            );
        }

        let sigma = qnl_sigma(mission.n_independent).unwrap();
        let sigma_ok = sigma == row.sigma_qnl;
        pass &= sigma_ok;
        cells += 1;
        assert!(
            sigma_ok,
            "{}: σ_V {sigma:e} != published {:e}",
            mission.name, row.sigma_qnl
        );

        let n_meas = n_measurements(mission.t_exp_s, mission.t_shot_s).unwrap() as f64;
        let band = printed_precision_band(row.n_meas);
        let diff = (n_meas - row.n_meas).abs();
        worst_margin = worst_margin.max(diff / band);
        let n_ok = diff <= band;
        pass &= n_ok;
        cells += 1;
        assert!(
            n_ok,
            "{}: N_meas {n_meas} vs published {:e} (band {band:.1e})",
            mission.name, row.n_meas
        );
    }
    report(
        "criterion-05 derived budget columns at printed precision",
        pass,
        &format!("{cells}/32 cells inside 0.7 printed-digit bands, worst margin {worst_margin:.2}"),
    );
}

#[test]
fn c06_cross_section_route_equals_master_formula() {
    let cfg = default_cfg();
    let sources = BackgroundSources::builtin().unwrap();
    let missions = builtin_missions();
    let cases = decobudget::xsec::compare_routes(&missions, &sources, &cfg).unwrap();
    assert_eq!(cases.len(), 16);
    let mut pass = true;
    let mut worst: f64 = 0.0;
    for case in &cases {
        let rel = case.rel_diff();
        worst = worst.max(rel);
        let ok = rel < 1e-4;
        pass &= ok;
        assert!(
            ok,
            "{} {:?}: route disagreement {rel:.2e}",
            case.mission, case.channel
        );
    }
    report(
        "criterion-06 cross-section route vs master formula (1e-4, 16 cases)",
        pass,
        &format!("16/16 agree, worst relative difference {worst:.2e}"),
    );
}

#[test]
fn c07_angular_monte_carlo_oracle() {
    let opts = ValidateOptions::default();
    let reports = run_suite(Suite::Angular, &opts).unwrap();
    for r in &reports {
        assert!(r.pass, "angular oracle check failed: {}", r.line());
    }
    let pass = all_passed(&reports);
    report(
        "criterion-07 angular MC vs 1 - sinc (3 sigma at 1e6) and error slope -0.5",
        pass,
        &format!("{}/{} checks passed", reports.len(), reports.len()),
    );
}

#[test]
fn c08_scaling_laws() {
    let cfg = default_cfg();
    let sources = BackgroundSources::builtin().unwrap();
    let mut pass = true;

    // (a) Matter-coherent photon response at fixed wavelength: with the
    // momentum-transfer window pinned to [ω̄, 2ω̄] around the mean photon
    // energy, the rate follows the form-factor tail r_cloud⁻⁴ in the
    // Δx ≫ r_cloud ≫ λ regime.
    let mean_photon_ev = 1.3435456295934123;
    let big_sphere = MissionConfig {
        name: "sphere-scan".into(),
        target: TargetSpec::new(60.0, 30.0, 4.84).unwrap(),
        n_units: 1e13,
        n_independent: 1.0,
        r_cloud_m: 1.5e-6,
        delta_x_m: 1.0,
        t_shot_s: 100.0,
        t_exp_s: decobudget::constants::YEAR_S,
        mode: StructureMode::MatterCoherent,
        coherent_count: Default::default(),
    };
    let points = scan(
        &big_sphere,
        Background::SolarPhotons,
        &sources,
        ScanParameter::RCloud,
        (1.5e-6, 1.5e-5),
        9,
        ChargedRegime::Both,
        Some((mean_photon_ev, 2.0 * mean_photon_ev)),
        &cfg,
    )
    .unwrap();
    let xs: Vec<f64> = points.iter().map(|p| p.value).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.gamma_tot_per_s).collect();
    let slope_r4 = fit_loglog_slope(&xs, &ys).unwrap();
    let frozen_oracle = -3.965860119850127;
    let r4_ok = (slope_r4 + 4.0).abs() <= 0.3 && (slope_r4 - frozen_oracle).abs() <= 0.02;
    pass &= r4_ok;
    assert!(r4_ok, "banded photon r_cloud slope {slope_r4}");

    // (b) Cold-atom rates scale linearly in atom number (photon and
    // high-q wind channels).
    let beccal = MissionConfig::builtin("BECCAL").unwrap();
    let mut slopes_n = Vec::new();
    for (background, regime) in [
        (Background::SolarPhotons, ChargedRegime::Both),
        (Background::SolarWind, ChargedRegime::High),
    ] {
        let points = scan(
            &beccal,
            background,
            &sources,
            ScanParameter::NAtoms,
            (1e5, 1e7),
            9,
            regime,
            None,
            &cfg,
        )
        .unwrap();
        let xs: Vec<f64> = points.iter().map(|p| p.value).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.gamma_tot_per_s).collect();
        let slope = fit_loglog_slope(&xs, &ys).unwrap();
        let ok = (slope - 1.0).abs() <= 0.02;
        pass &= ok;
        assert!(ok, "{background:?} atom-number slope {slope}");
        slopes_n.push(slope);
    }

    // (c) Solar-wind high-q rate is insensitive to geometry: a decade of
    // Δx and of r_cloud at super-atomic scales moves it by < 1%.
    let mut max_spread: f64 = 0.0;
    for (parameter, range) in [
        (ScanParameter::DeltaX, (3e-3, 3e-2)),
        (ScanParameter::RCloud, (1.5e-4, 1.5e-3)),
    ] {
        let points = scan(
            &beccal,
            Background::SolarWind,
            &sources,
            parameter,
            range,
            8,
            ChargedRegime::High,
            None,
            &cfg,
        )
        .unwrap();
        let lo = points
            .iter()
            .map(|p| p.gamma_tot_per_s)
            .fold(f64::INFINITY, f64::min);
        let hi = points
            .iter()
            .map(|p| p.gamma_tot_per_s)
            .fold(0.0f64, f64::max);
        let spread = hi / lo - 1.0;
        max_spread = max_spread.max(spread);
        let ok = spread < 0.01;
        pass &= ok;
        assert!(
            ok,
            "wind high-q spread over {parameter:?} decade: {spread:.3e}"
        );
    }

    report(
        "criterion-08 scaling laws (r_cloud^-4, N_atoms linearity, wind invariance)",
        pass,
        &format!(
            "banded slope {slope_r4:.3}; atom-number slopes {:.4}/{:.4}; wind spread {max_spread:.1e}",
            slopes_n[0], slopes_n[1]
        ),
    );
}

#[test]
fn c09_trivial_limits_are_exact() {
    let cfg = default_cfg();
    let sources = BackgroundSources::builtin().unwrap();
    let mut pass = true;

    // Zero arm separation: no which-path information, every scattering
    // rate is exactly zero (dust collisions are geometry-independent
    // contact events and are exempt).
    let mut closed = MissionConfig::builtin("MAQRO").unwrap();
    closed.delta_x_m = 0.0;
    for background in [
        Background::SolarPhotons,
        Background::SolarWind,
        Background::CosmicRays,
        Background::SolarNeutrinos,
    ] {
        let rate =
            background_rate(&closed, background, &sources, ChargedRegime::Both, &cfg).unwrap();
        let ok = rate.gamma_tot_per_s == 0.0;
        pass &= ok;
        assert!(
            ok,
            "{background:?} rate at Δx = 0: {}",
            rate.gamma_tot_per_s
        );
    }

    // Zero flux: zero rate, exactly.
    let maqro = MissionConfig::builtin("MAQRO").unwrap();
    let dark_photons = sources.photons.clone().rescaled(0.0).unwrap();
    let rate = rate_solar_photons(&maqro, &dark_photons, &cfg).unwrap();
    let photon_ok = rate.gamma_tot_per_s == 0.0;
    pass &= photon_ok;
    assert!(photon_ok, "zero-flux photon rate {}", rate.gamma_tot_per_s);
    let no_neutrinos = solar_neutrino_spectrum(&[]).unwrap();
    let rate = rate_neutrino(&maqro, &no_neutrinos, Default::default(), &cfg).unwrap();
    let nu_ok = rate.gamma_tot_per_s == 0.0;
    pass &= nu_ok;
    assert!(nu_ok, "zero-flux neutrino rate {}", rate.gamma_tot_per_s);

    // Exact unit normalizations and endpoint values.
    let ff_ok = uniform_sphere_ff(0.0) == 1.0;
    let helm_ok = helm_ff(0.0, maqro.structure_params().nuclear) == 1.0;
    let qmax_ok = q_max(938.272e6, 60.0 * 931.494e6, 0.0).unwrap() == 0.0;
    let qnl_ok = qnl_sigma(1.0).unwrap() == 0.5;
    pass &= ff_ok && helm_ok && qmax_ok && qnl_ok;
    assert!(ff_ok, "sphere form factor at 0");
    assert!(helm_ok, "nuclear form factor at 0");
    assert!(qmax_ok, "q_max at zero kinetic energy");
    assert!(qnl_ok, "single-object readout noise");

    report(
        "criterion-09 trivial limits exact (zero separation, zero flux, normalizations)",
        pass,
        "all exact-zero and exact-one limits hold bitwise",
    );
}

#[test]
fn c10_outputs_are_byte_identical_across_thread_counts() {
    let bin = env!("CARGO_BIN_EXE_decobudget");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("result.csv");
    let out_str = out.to_str().unwrap();

    let run = |threads: &str, args: &[&str]| -> (Vec<u8>, Vec<u8>) {
        let output = Command::new(bin)
            .args(args)
            .env("RAYON_NUM_THREADS", threads)
            .env_remove("DECOBUDGET_DATA")
            .output()
            .expect("binary runs");
        assert!(
            output.status.success(),
            "decobudget {args:?} failed: {}",
            String::from_utf8_lossy(&output.stderr)
        );
        let file = std::fs::read(&out).unwrap_or_default();
        (output.stdout, file)
    };

    let mut pass = true;

    // Full rate table through the real binary.
    let table_args = [
        "table",
        "--missions",
        "all",
        "--backgrounds",
        "all",
        "--no-timestamp",
        "--seed",
        "7",
        "--out",
        out_str,
    ];
    let (stdout_1, file_1) = run("1", &table_args);
    let (stdout_4, file_4) = run("4", &table_args);
    let table_ok = stdout_1 == stdout_4 && file_1 == file_4 && !file_1.is_empty();
    pass &= table_ok;
    assert!(table_ok, "table output differs across thread counts");

    // Parameter scan.
    let scan_args = [
        "scan",
        "--parameter",
        "dx",
        "--range",
        "1e-4:1e-2",
        "--points",
        "8",
        "--mission",
        "BECCAL",
        "--background",
        "solar-wind",
        "--regime",
        "high",
        "--no-timestamp",
        "--out",
        out_str,
    ];
    let (stdout_1, file_1) = run("1", &scan_args);
    let (stdout_4, file_4) = run("4", &scan_args);
    let scan_ok = stdout_1 == stdout_4 && file_1 == file_4 && !file_1.is_empty();
    pass &= scan_ok;
    assert!(scan_ok, "scan output differs across thread counts");

    // Seeded stochastic validation report.
    let validate_args = [
        "validate", "--suite", "angular", "--seed", "11", "--out", out_str,
    ];
    let (stdout_1, file_1) = run("1", &validate_args);
    let (stdout_2, file_2) = run("8", &validate_args);
    let validate_ok = stdout_1 == stdout_2 && file_1 == file_2 && !file_1.is_empty();
    pass &= validate_ok;
    assert!(
        validate_ok,
        "validation report differs across thread counts"
    );

    report(
        "criterion-10 byte-identical outputs across thread counts",
        pass,
        "table, scan, and seeded validation outputs reproduce bitwise",
    );
}
