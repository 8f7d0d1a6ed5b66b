//! From decoherence rates to measurable interferometer quantities.
//!
//! The chain implemented here turns a total environmental decoherence
//! rate Γ_tot into the numbers an experimentalist quotes:
//!
//! 1. per-object decoherence exponent  s = t_shot · Γ_tot / N_ind,
//! 2. fringe visibility               V = e^(−s), loss ΔV = 1 − V,
//! 3. quantum-noise-limited readout   σ_V = 1 / (2 √N_ind),
//! 4. single-shot significance        SNR_shot = ΔV / σ_V,
//! 5. campaign statistics             N_meas = ⌊T_exp / t_shot⌋ and the
//!    background-free (× N_meas) or background-limited (× √N_meas)
//!    accumulation of SNR over repeated shots.
//!
//! Γ_tot is the *per-cloud* rate; dividing by the number of
//! independently interfering objects N_ind converts it to the exponent
//! seen by each object (a levitated nanosphere has N_ind = 1, a
//! cold-atom cloud has N_ind = N_atoms because every atom interferes
//! on its own).
//!
//! The module also assembles full budget tables (mission × background
//! grids of rates plus observables) and log-spaced parameter scans in
//! cloud radius, arm separation, or atom number.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::missions::MissionConfig;
use crate::rates::{
    background_rate, rate_solar_photons_banded, Background, BackgroundSources, ChargedRegime,
    QuadratureConfig, RateResult,
};

/// How repeated measurements accumulate signal-to-noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnrRegime {
    /// Noise-free repetition: SNR grows linearly with the number of
    /// measurements.
    BackgroundFree,
    /// Noise-dominated repetition: SNR grows with the square root of
    /// the number of measurements.
    BackgroundLimited,
}

/// Derived interferometric quantities for one mission × background cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    /// Per-object decoherence exponent accumulated over one shot.
    pub s: f64,
    /// Fringe visibility V = e^(−s).
    pub visibility: f64,
    /// Visibility loss ΔV = 1 − V.
    pub visibility_loss: f64,
    /// Quantum-noise-limited visibility uncertainty of a single shot.
    pub sigma_qnl: f64,
    /// Single-shot signal-to-noise ratio ΔV / σ_V.
    pub snr_shot: f64,
    /// Number of shots that fit into the mission exposure time.
    pub n_meas: u64,
    /// Interferometer phase offset (carried through to port statistics;
    /// fixed to 0 for visibility budgets).
    pub phi: f64,
}

/// Per-object decoherence exponent s = t_shot · Γ_tot / N_ind.
///
/// `n_independent` is the number of independently interfering objects
/// contributing to the cloud-level rate `gamma_tot_per_s`.
pub fn decoherence_per_object(
    gamma_tot_per_s: f64,
    t_shot_s: f64,
    n_independent: f64,
) -> Result<f64> {
    if !(gamma_tot_per_s >= 0.0) || !gamma_tot_per_s.is_finite() {
        return Err(Error::domain(format!(
            "total rate must be finite and non-negative, got {gamma_tot_per_s}"
        )));
    }
    if !(t_shot_s > 0.0) || !t_shot_s.is_finite() {
        return Err(Error::domain(format!(
            "shot time must be positive and finite, got {t_shot_s}"
        )));
    }
    if !(n_independent >= 1.0) || !n_independent.is_finite() {
        return Err(Error::domain(format!(
            "independent-object count must be >= 1, got {n_independent}"
        )));
    }
    Ok(t_shot_s * gamma_tot_per_s / n_independent)
}

/// Visibility and visibility loss `(V, ΔV)` for decoherence exponent `s`.
///
/// For s < 1e-8 the loss is evaluated by the series s − s²/2 to avoid
/// the catastrophic cancellation in 1 − e^(−s).
pub fn visibility(s: f64) -> Result<(f64, f64)> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::domain(format!(
            "decoherence exponent must be finite and non-negative, got {s}"
        )));
    }
    let v = (-s).exp();
    let dv = if s < 1e-8 { s - 0.5 * s * s } else { 1.0 - v };
    Ok((v, dv))
}

/// Quantum-noise-limited visibility uncertainty σ_V = 1 / (2 √N_ind).
pub fn qnl_sigma(n_independent: f64) -> Result<f64> {
    if !(n_independent >= 1.0) || !n_independent.is_finite() {
        return Err(Error::domain(format!(
            "independent-object count must be >= 1, got {n_independent}"
        )));
    }
    Ok(0.5 / n_independent.sqrt())
}

/// Single-shot signal-to-noise ratio |ΔV| / σ_V.
pub fn snr_shot(delta_v: f64, sigma_v: f64) -> Result<f64> {
    if !(sigma_v > 0.0) || !sigma_v.is_finite() {
        return Err(Error::domain(format!(
            "visibility uncertainty must be positive, got {sigma_v}"
        )));
    }
    if !delta_v.is_finite() {
        return Err(Error::domain(format!(
            "visibility loss must be finite, got {delta_v}"
        )));
    }
    Ok(delta_v.abs() / sigma_v)
}

/// Number of shots in an exposure: N_meas = ⌊T_exp / t_shot⌋.
pub fn n_measurements(t_exp_s: f64, t_shot_s: f64) -> Result<u64> {
    if !(t_exp_s > 0.0) || !t_exp_s.is_finite() {
        return Err(Error::domain(format!(
            "exposure time must be positive and finite, got {t_exp_s}"
        )));
    }
    if !(t_shot_s > 0.0) || !t_shot_s.is_finite() {
        return Err(Error::domain(format!(
            "shot time must be positive and finite, got {t_shot_s}"
        )));
    }
    let n = (t_exp_s / t_shot_s).floor();
    if n < 1.0 {
        return Err(Error::domain(format!(
            "exposure time {t_exp_s} s does not fit one shot of {t_shot_s} s"
        )));
    }
    Ok(n as u64)
}

/// Accumulated signal-to-noise over `n_meas` repeated measurements.
pub fn multi_shot_snr(snr_shot: f64, n_meas: u64, regime: SnrRegime) -> Result<f64> {
    if n_meas == 0 {
        return Err(Error::domain("measurement count must be >= 1"));
    }
    if !(snr_shot >= 0.0) || !snr_shot.is_finite() {
        return Err(Error::domain(format!(
            "single-shot SNR must be finite and non-negative, got {snr_shot}"
        )));
    }
    let n = n_meas as f64;
    Ok(match regime {
        SnrRegime::BackgroundFree => snr_shot * n,
        SnrRegime::BackgroundLimited => snr_shot * n.sqrt(),
    })
}

/// Output-port statistics `(p_I, mean, variance)` of one shot.
///
/// Each of the N_ind independent objects lands in port I with
/// probability p_I = ½ (1 + e^(−s) cos φ); the port-I count is then
/// binomial with mean N_ind · p_I and variance N_ind · p_I (1 − p_I).
pub fn port_statistics(s: f64, phi: f64, n_independent: f64) -> Result<(f64, f64, f64)> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::domain(format!(
            "decoherence exponent must be finite and non-negative, got {s}"
        )));
    }
    if !phi.is_finite() {
        return Err(Error::domain(format!("phase must be finite, got {phi}")));
    }
    if !(n_independent >= 1.0) || !n_independent.is_finite() {
        return Err(Error::domain(format!(
            "independent-object count must be >= 1, got {n_independent}"
        )));
    }
    let p = 0.5 * (1.0 + (-s).exp() * phi.cos());
    let p = p.clamp(0.0, 1.0);
    let mean = n_independent * p;
    let var = n_independent * p * (1.0 - p);
    Ok((p, mean, var))
}

/// Full observable chain for a mission given its total decoherence rate.
pub fn observables_from_rate(mission: &MissionConfig, gamma_tot_per_s: f64) -> Result<Observables> {
    let s = decoherence_per_object(gamma_tot_per_s, mission.t_shot_s, mission.n_independent)?;
    let (v, dv) = visibility(s)?;
    let sigma = qnl_sigma(mission.n_independent)?;
    let snr = snr_shot(dv, sigma)?;
    let n_meas = n_measurements(mission.t_exp_s, mission.t_shot_s)?;
    Ok(Observables {
        s,
        visibility: v,
        visibility_loss: dv,
        sigma_qnl: sigma,
        snr_shot: snr,
        n_meas,
        phi: 0.0,
    })
}

/// One row of a mission × background budget table: the rate and the
/// observables derived from it.
#[derive(Debug, Clone)]
pub struct BudgetRow {
    pub rate: RateResult,
    pub observables: Observables,
}

/// Compute the full budget grid for the given missions and backgrounds.
///
/// Cells are evaluated in parallel; the returned rows are ordered
/// deterministically (missions in input order, backgrounds in input
/// order within each mission) regardless of scheduling.
pub fn budget_table(
    missions: &[MissionConfig],
    backgrounds: &[Background],
    sources: &BackgroundSources,
    regime: ChargedRegime,
    cfg: &QuadratureConfig,
) -> Result<Vec<BudgetRow>> {
    let cells: Vec<(&MissionConfig, Background)> = missions
        .iter()
        .flat_map(|m| backgrounds.iter().map(move |b| (m, *b)))
        .collect();
    let rows: Vec<Result<BudgetRow>> = cells
        .into_par_iter()
        .map(|(mission, background)| {
            let rate = background_rate(mission, background, sources, regime, cfg)?;
            let observables = observables_from_rate(mission, rate.gamma_tot_per_s)?;
            Ok(BudgetRow { rate, observables })
        })
        .collect();
    rows.into_iter().collect()
}

/// Mission parameter varied by a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanParameter {
    /// Cloud radius r_cloud, metres.
    RCloud,
    /// Arm separation Δx, metres.
    DeltaX,
    /// Number of atoms / molecular units per cloud.
    NAtoms,
}

impl ScanParameter {
    pub fn slug(&self) -> &'static str {
        match self {
            ScanParameter::RCloud => "r_cloud",
            ScanParameter::DeltaX => "dx",
            ScanParameter::NAtoms => "n_atoms",
        }
    }

    pub fn from_slug(slug: &str) -> Result<Self> {
        match slug {
            "r_cloud" => Ok(ScanParameter::RCloud),
            "dx" => Ok(ScanParameter::DeltaX),
            "n_atoms" => Ok(ScanParameter::NAtoms),
            other => Err(Error::config(format!(
                "unknown scan parameter '{other}' (expected r_cloud, dx, or n_atoms)"
            ))),
        }
    }
}

/// One point of a parameter scan.
///
/// The SNR is reported for both independence conventions so a single
/// scan reproduces both curve families: `snr_shot_single` treats the
/// whole cloud as one interfering object (N_ind = 1), while
/// `snr_shot_ensemble` treats every atom as independent
/// (N_ind = N_atoms at this scan point).
#[derive(Debug, Clone, Copy)]
pub struct ScanPoint {
    /// Parameter value (metres for r_cloud and dx, a count for n_atoms).
    pub value: f64,
    /// Total per-cloud decoherence rate at this point.
    pub gamma_tot_per_s: f64,
    /// Relative quadrature error estimate on the rate.
    pub quadrature_rel_error: f64,
    /// Single-shot SNR with N_ind = 1.
    pub snr_shot_single: f64,
    /// Single-shot SNR with N_ind = N_atoms.
    pub snr_shot_ensemble: f64,
}

/// Log-spaced scan of one mission parameter against one background.
///
/// `range` must be a positive, increasing interval and `n_points` at
/// least 8 so slopes can be fit reliably.
///
/// `photon_band`, valid only with [`Background::SolarPhotons`],
/// restricts the photon channel to momentum transfers inside the given
/// (eV, eV) window; this isolates the fixed-wavelength response that
/// follows the r_cloud⁻⁴ law from the spectrum-wide average that does
/// not.
#[allow(clippy::too_many_arguments)] // flat call mirrors the CLI flags
pub fn scan(
    mission_base: &MissionConfig,
    background: Background,
    sources: &BackgroundSources,
    parameter: ScanParameter,
    range: (f64, f64),
    n_points: usize,
    regime: ChargedRegime,
    photon_band: Option<(f64, f64)>,
    cfg: &QuadratureConfig,
) -> Result<Vec<ScanPoint>> {
    if photon_band.is_some() && background != Background::SolarPhotons {
        return Err(Error::config(
            "a momentum-transfer band applies only to the solar-photon background",
        ));
    }
    if let Some((lo, hi)) = photon_band {
        if !(lo >= 0.0 && hi > lo) {
            return Err(Error::config(format!(
                "momentum-transfer band needs 0 <= lo < hi, got ({lo}, {hi})"
            )));
        }
    }
    if n_points < 8 {
        return Err(Error::config(format!(
            "scan needs at least 8 points, got {n_points}"
        )));
    }
    let (lo, hi) = range;
    if !(lo > 0.0) || !(hi > lo) || !hi.is_finite() {
        return Err(Error::config(format!(
            "scan range must satisfy 0 < lo < hi, got ({lo}, {hi})"
        )));
    }
    let log_lo = lo.ln();
    let step = (hi.ln() - log_lo) / (n_points - 1) as f64;
    let values: Vec<f64> = (0..n_points)
        .map(|i| (log_lo + step * i as f64).exp())
        .collect();

    let points: Vec<Result<ScanPoint>> = values
        .into_par_iter()
        .map(|value| {
            let mut mission = mission_base.clone();
            match parameter {
                ScanParameter::RCloud => mission.r_cloud_m = value,
                ScanParameter::DeltaX => mission.delta_x_m = value,
                ScanParameter::NAtoms => {
                    mission.n_units = value;
                    // Keep the ensemble convention consistent with the
                    // scanned atom number.
                    if mission.n_independent > 1.0 {
                        mission.n_independent = value;
                    }
                }
            }
            let rate = match photon_band {
                Some(band) => {
                    rate_solar_photons_banded(&mission, &sources.photons, cfg, Some(band))?
                }
                None => background_rate(&mission, background, sources, regime, cfg)?,
            };
            let gamma = rate.gamma_tot_per_s;
            let n_atoms = mission.n_units;

            let s_single = decoherence_per_object(gamma, mission.t_shot_s, 1.0)?;
            let (_, dv_single) = visibility(s_single)?;
            let snr_single = snr_shot(dv_single, qnl_sigma(1.0)?)?;

            let s_ens = decoherence_per_object(gamma, mission.t_shot_s, n_atoms)?;
            let (_, dv_ens) = visibility(s_ens)?;
            let snr_ens = snr_shot(dv_ens, qnl_sigma(n_atoms)?)?;

            Ok(ScanPoint {
                value,
                gamma_tot_per_s: gamma,
                quadrature_rel_error: rate.quadrature_rel_error,
                snr_shot_single: snr_single,
                snr_shot_ensemble: snr_ens,
            })
        })
        .collect();
    points.into_iter().collect()
}

/// Least-squares slope of ln(y) against ln(x).
///
/// All inputs must be positive; used to verify power-law behaviour of
/// rates and SNR against scanned parameters.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::domain(
            "slope fit needs two equal-length samples of at least 2 points",
        ));
    }
    let mut lx = Vec::with_capacity(xs.len());
    let mut ly = Vec::with_capacity(ys.len());
    for (&x, &y) in xs.iter().zip(ys) {
        if !(x > 0.0) || !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::domain(format!(
                "slope fit needs positive finite samples, got ({x}, {y})"
            )));
        }
        lx.push(x.ln());
        ly.push(y.ln());
    }
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in lx.iter().zip(&ly) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::domain("slope fit needs spread in x"));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::YEAR_S;
    use approx::assert_relative_eq;

    #[test]
    fn decoherence_examples() {
        // Cold-atom cloud: modest rate spread over many atoms.
        let s = decoherence_per_object(0.41, 2.6, 1e6).unwrap();
        assert_relative_eq!(s, 1.066e-6, max_relative = 1e-3);
        // Zero rate gives exactly zero exponent.
        assert_eq!(decoherence_per_object(0.0, 2.6, 1e6).unwrap(), 0.0);
        // Single nanosphere: the full rate applies to the one object.
        let s = decoherence_per_object(1.2e7, 100.0, 1.0).unwrap();
        assert_relative_eq!(s, 1.2e9, max_relative = 1e-12);
        assert!(decoherence_per_object(-1.0, 1.0, 1.0).is_err());
        assert!(decoherence_per_object(1.0, 0.0, 1.0).is_err());
        assert!(decoherence_per_object(1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn visibility_branches_agree_and_limits_hold() {
        assert_eq!(visibility(0.0).unwrap(), (1.0, 0.0));
        let (v, dv) = visibility(50.0).unwrap();
        assert!(v < 2e-22);
        assert_relative_eq!(dv, 1.0, max_relative = 1e-15);
        // Series branch: for tiny s the loss is s to machine precision.
        let (_, dv) = visibility(1e-12).unwrap();
        assert_relative_eq!(dv, 1e-12, max_relative = 1e-9);
        // Continuity across the series/exact switch at s = 1e-8.
        let (_, below) = visibility(0.999_999e-8).unwrap();
        let (_, above) = visibility(1.000_001e-8).unwrap();
        assert_relative_eq!(below, above, max_relative = 1e-5);
        assert!(visibility(-1e-3).is_err());
        assert!(visibility(f64::NAN).is_err());
    }

    #[test]
    fn qnl_sigma_examples() {
        assert_eq!(qnl_sigma(1.0).unwrap(), 0.5);
        assert_relative_eq!(qnl_sigma(1e6).unwrap(), 5e-4, max_relative = 1e-12);
        assert_relative_eq!(qnl_sigma(1e10).unwrap(), 5e-6, max_relative = 1e-12);
        assert!(qnl_sigma(0.5).is_err());
        assert!(qnl_sigma(f64::INFINITY).is_err());
    }

    #[test]
    fn snr_shot_examples() {
        // Cold-atom photon cell: s ≈ 1.07e-6 on a 1e6-atom cloud.
        let s = decoherence_per_object(0.41, 2.6, 1e6).unwrap();
        let (_, dv) = visibility(s).unwrap();
        let snr = snr_shot(dv, qnl_sigma(1e6).unwrap()).unwrap();
        assert_relative_eq!(snr, 2.13e-3, max_relative = 2e-3);
        assert_eq!(snr_shot(0.0, 0.5).unwrap(), 0.0);
        assert!(snr_shot(0.1, 0.0).is_err());
        assert!(snr_shot(0.1, -1.0).is_err());
    }

    #[test]
    fn measurement_counts_and_multi_shot_accumulation() {
        assert_eq!(n_measurements(YEAR_S, 100.0).unwrap(), 315_576);
        assert_eq!(n_measurements(YEAR_S, 2.6).unwrap(), 12_137_538);
        assert!(n_measurements(1.0, 2.0).is_err());
        assert!(n_measurements(0.0, 1.0).is_err());

        // A single measurement changes nothing in either regime.
        assert_eq!(
            multi_shot_snr(0.37, 1, SnrRegime::BackgroundFree).unwrap(),
            0.37
        );
        assert_eq!(
            multi_shot_snr(0.37, 1, SnrRegime::BackgroundLimited).unwrap(),
            0.37
        );
        assert_relative_eq!(
            multi_shot_snr(2e-3, 100, SnrRegime::BackgroundFree).unwrap(),
            0.2,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            multi_shot_snr(2e-3, 100, SnrRegime::BackgroundLimited).unwrap(),
            0.02,
            max_relative = 1e-12
        );
        assert!(multi_shot_snr(1.0, 0, SnrRegime::BackgroundFree).is_err());
    }

    #[test]
    fn port_statistics_examples() {
        // Full coherence on the bright fringe: every object in port I.
        let (p, mean, var) = port_statistics(0.0, 0.0, 1e6).unwrap();
        assert_eq!(p, 1.0);
        assert_eq!(mean, 1e6);
        assert_eq!(var, 0.0);
        // Mid-fringe: maximal binomial variance N/4.
        let (p, mean, var) = port_statistics(0.0, std::f64::consts::FRAC_PI_2, 1e6).unwrap();
        assert_relative_eq!(p, 0.5, max_relative = 1e-12);
        assert_relative_eq!(mean, 5e5, max_relative = 1e-12);
        assert_relative_eq!(var, 2.5e5, max_relative = 1e-12);
        // e^(−ln 2) = 1/2 puts 3/4 of the objects in port I.
        let (p, _, _) = port_statistics(std::f64::consts::LN_2, 0.0, 1.0).unwrap();
        assert_relative_eq!(p, 0.75, max_relative = 1e-12);
        // Probability stays in [0, 1] over a grid.
        for &s in &[0.0, 1e-6, 0.1, 1.0, 10.0] {
            for k in 0..=12 {
                let phi = k as f64 * std::f64::consts::PI / 6.0;
                let (p, _, var) = port_statistics(s, phi, 100.0).unwrap();
                assert!((0.0..=1.0).contains(&p));
                assert!(var >= 0.0);
                assert!(var <= 100.0 * 0.25 + 1e-12);
            }
        }
        assert!(port_statistics(-1.0, 0.0, 1.0).is_err());
        assert!(port_statistics(1.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn full_chain_for_cold_atom_photon_cell() {
        let mission = MissionConfig::builtin("BECCAL").unwrap();
        let obs = observables_from_rate(&mission, 0.41).unwrap();
        assert_relative_eq!(obs.s, 1.066e-6, max_relative = 1e-3);
        assert_relative_eq!(obs.visibility_loss, 1.066e-6, max_relative = 1e-3);
        assert_eq!(obs.sigma_qnl, 5e-4);
        assert_relative_eq!(obs.snr_shot, 2.13e-3, max_relative = 2e-3);
        assert_eq!(obs.n_meas, 12_137_538);
        assert_eq!(obs.phi, 0.0);
    }

    #[test]
    fn visibility_loss_monotone_in_rate_time_and_inverse_objects() {
        let dv = |gamma: f64, t: f64, n: f64| {
            let s = decoherence_per_object(gamma, t, n).unwrap();
            visibility(s).unwrap().1
        };
        assert!(dv(2.0, 1.0, 1.0) > dv(1.0, 1.0, 1.0));
        assert!(dv(1.0, 2.0, 1.0) > dv(1.0, 1.0, 1.0));
        assert!(dv(1.0, 1.0, 2.0) < dv(1.0, 1.0, 1.0));
    }

    #[test]
    fn budget_table_is_deterministic_and_complete() {
        let missions = MissionConfig::builtin_all();
        let sources = BackgroundSources::builtin().unwrap();
        let cfg = QuadratureConfig {
            rel_tol: 1e-3,
            ..QuadratureConfig::default()
        };
        let backgrounds = [Background::SolarPhotons, Background::ZodiacalDust];
        let rows =
            budget_table(&missions, &backgrounds, &sources, ChargedRegime::Both, &cfg).unwrap();
        assert_eq!(rows.len(), 8);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.rate.mission, missions[i / 2].name);
            assert_eq!(row.rate.background, backgrounds[i % 2]);
            assert!(row.rate.converged);
            assert!(row.observables.snr_shot.is_finite());
        }
        let rows2 =
            budget_table(&missions, &backgrounds, &sources, ChargedRegime::Both, &cfg).unwrap();
        for (a, b) in rows.iter().zip(&rows2) {
            assert_eq!(
                a.rate.gamma_tot_per_s.to_bits(),
                b.rate.gamma_tot_per_s.to_bits()
            );
            assert_eq!(
                a.observables.snr_shot.to_bits(),
                b.observables.snr_shot.to_bits()
            );
        }
    }

    #[test]
    fn scan_covers_range_and_reports_both_conventions() {
        let mission = MissionConfig::builtin("BECCAL").unwrap();
        let sources = BackgroundSources::builtin().unwrap();
        let cfg = QuadratureConfig {
            rel_tol: 1e-3,
            ..QuadratureConfig::default()
        };
        let points = scan(
            &mission,
            Background::SolarWind,
            &sources,
            ScanParameter::NAtoms,
            (1e5, 1e6),
            8,
            ChargedRegime::High,
            None,
            &cfg,
        )
        .unwrap();
        assert_eq!(points.len(), 8);
        assert_relative_eq!(points[0].value, 1e5, max_relative = 1e-12);
        assert_relative_eq!(points[7].value, 1e6, max_relative = 1e-12);
        for p in &points {
            assert!(p.gamma_tot_per_s > 0.0);
            // With N atoms sharing the rate, per-atom loss shrinks while
            // readout noise only improves as √N: the ensemble SNR must
            // sit below the single-object SNR in the small-s regime.
            assert!(p.snr_shot_ensemble < p.snr_shot_single);
        }
        // Cold-atom rates grow linearly with atom number.
        let xs: Vec<f64> = points.iter().map(|p| p.value).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.gamma_tot_per_s).collect();
        let slope = fit_loglog_slope(&xs, &ys).unwrap();
        assert!((slope - 1.0).abs() < 0.01, "slope = {slope}");
    }

    #[test]
    fn scan_rejects_bad_requests() {
        let mission = MissionConfig::builtin("BECCAL").unwrap();
        let sources = BackgroundSources::builtin().unwrap();
        let cfg = QuadratureConfig::default();
        assert!(scan(
            &mission,
            Background::SolarPhotons,
            &sources,
            ScanParameter::DeltaX,
            (1e-4, 1e-2),
            7,
            ChargedRegime::Both,
            None,
            &cfg,
        )
        .is_err());
        assert!(scan(
            &mission,
            Background::SolarPhotons,
            &sources,
            ScanParameter::DeltaX,
            (1e-2, 1e-4),
            8,
            ChargedRegime::Both,
            None,
            &cfg,
        )
        .is_err());
        // A momentum-transfer band only makes sense for photons.
        assert!(scan(
            &mission,
            Background::SolarWind,
            &sources,
            ScanParameter::RCloud,
            (1e-4, 1e-2),
            8,
            ChargedRegime::Both,
            Some((1.0, 2.0)),
            &cfg,
        )
        .is_err());
    }

    #[test]
    fn slope_fit_recovers_power_laws() {
        let xs: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powi(-4)).collect();
        assert_relative_eq!(
            fit_loglog_slope(&xs, &ys).unwrap(),
            -4.0,
            max_relative = 1e-12
        );
        assert!(fit_loglog_slope(&[1.0], &[1.0]).is_err());
        assert!(fit_loglog_slope(&[1.0, -2.0], &[1.0, 2.0]).is_err());
        assert!(fit_loglog_slope(&[2.0, 2.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn parameter_slugs_round_trip() {
        for p in [
            ScanParameter::RCloud,
            ScanParameter::DeltaX,
            ScanParameter::NAtoms,
        ] {
            assert_eq!(ScanParameter::from_slug(p.slug()).unwrap(), p);
        }
        assert!(ScanParameter::from_slug("mass").is_err());
    }
}
