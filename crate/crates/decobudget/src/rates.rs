//! The rate engine: total decoherence rates Γ per background, evaluated
//! by nested adaptive quadrature over (ω, q) of the master formula
//!
//! Γ = (1/2π) ∫dω (dn/dω) (ω² − m²)^{−1/2}
//!        ∫dq q (M + ω − √(M² + q²)) |M̄(ω,q)|² S(q) [1 − sinc(qΔx)],
//!
//! with the channel-specific matrix element |M̄|², structure function
//! S(q), and q-domain. All internal math is in natural units (eV);
//! results convert to s⁻¹ at the boundary.

use std::cell::{Cell, RefCell};
use std::fmt;

use crate::constants::{
    ALPHA, CM2_S_FLUX_TO_EV3, EV_TO_PER_S, G_FERMI_COMPUTED_INV_EV2, G_FERMI_MEASURED_INV_EV2,
    M_PER_INV_EV, M_PROTON_EV,
};
use crate::dust::DustDistribution;
use crate::error::{Error, Result};
use crate::kinematics::q_max;
use crate::missions::MissionConfig;
use crate::quadrature::{integrate, integrate_log, QuadOptions};
use crate::response::{
    decoherence_factor, structure_function, StructureBasis, StructureMode, StructureParams,
    UNIFORM_SPHERE_FF_ZEROS,
};
use crate::spectra::FluxSpectrum;

/// Clouds simultaneously exposed per shot in the dust channel (the two
/// interferometer arms are separate clouds for a gradiometer).
pub const DUST_CLOUDS_PER_SHOT: f64 = 2.0;

/// How the oscillatory which-path factor 1 − sinc(qΔx) is resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SincPolicy {
    /// Subdivide at the π/Δx period scale only; never replace the factor.
    SubdividePerPeriod,
    /// Replace 1 − sinc(qΔx) → 1 (and drop cloud-coherent form-factor
    /// tails) once the phase qΔx (resp. q·r_cloud) exceeds `threshold`.
    AsymptoticReplace { threshold: f64 },
}

impl Default for SincPolicy {
    fn default() -> Self {
        SincPolicy::AsymptoticReplace { threshold: 1e3 }
    }
}

/// Quadrature controls for rate evaluations.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    /// Target relative error of each rate (default 10⁻⁴).
    pub rel_tol: f64,
    /// Subdivision budget per 1-D integral.
    pub max_subdivisions: usize,
    /// Oscillation-handling policy.
    pub sinc_policy: SincPolicy,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-4,
            max_subdivisions: 4000,
            sinc_policy: SincPolicy::default(),
        }
    }
}

impl QuadratureConfig {
    /// Check the documented domain rel_tol ∈ (0, 10⁻¹].
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 0.1) {
            return Err(Error::config(format!(
                "rel_tol must lie in (0, 0.1], got {}",
                self.rel_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::config("max_subdivisions must be positive"));
        }
        if let SincPolicy::AsymptoticReplace { threshold } = self.sinc_policy {
            if !(threshold > 1.0) {
                return Err(Error::config("asymptotic threshold must exceed 1"));
            }
        }
        Ok(())
    }
}

/// The five environmental backgrounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Background {
    SolarPhotons,
    SolarWind,
    CosmicRays,
    SolarNeutrinos,
    ZodiacalDust,
}

impl Background {
    /// All backgrounds in canonical table order.
    pub const ALL: [Background; 5] = [
        Background::SolarPhotons,
        Background::SolarWind,
        Background::CosmicRays,
        Background::SolarNeutrinos,
        Background::ZodiacalDust,
    ];

    /// Stable identifier used in CLI arguments and CSV output.
    pub fn slug(&self) -> &'static str {
        match self {
            Background::SolarPhotons => "solar-photons",
            Background::SolarWind => "solar-wind",
            Background::CosmicRays => "cosmic-rays",
            Background::SolarNeutrinos => "solar-neutrinos",
            Background::ZodiacalDust => "zodiacal-dust",
        }
    }

    /// Parse a CLI slug.
    pub fn from_slug(s: &str) -> Result<Self> {
        Background::ALL
            .iter()
            .copied()
            .find(|b| b.slug() == s)
            .ok_or_else(|| {
                Error::config(format!(
                    "unknown background '{s}' (known: {})",
                    Background::ALL.map(|b| b.slug()).join(", ")
                ))
            })
    }
}

impl fmt::Display for Background {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

/// Which charged-probe momentum-transfer regimes to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChargedRegime {
    Low,
    High,
    Both,
}

/// Which Fermi-constant value the neutrino channel uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FermiConstant {
    /// Tree-level 4πα/(√2 m_Z² sin²2θ_W) with sin²θ_W = 0.23 (default;
    /// the reference rate tables are consistent with this value).
    #[default]
    Computed,
    /// The measured 1.1664×10⁻⁵ GeV⁻².
    Measured,
}

impl FermiConstant {
    /// G_F in eV⁻².
    pub fn value_inv_ev2(&self) -> f64 {
        match self {
            FermiConstant::Computed => G_FERMI_COMPUTED_INV_EV2,
            FermiConstant::Measured => G_FERMI_MEASURED_INV_EV2,
        }
    }
}

/// One evaluated decoherence rate.
#[derive(Debug, Clone)]
pub struct RateResult {
    /// Mission name.
    pub mission: String,
    /// Which background produced it.
    pub background: Background,
    /// Total rate, s⁻¹.
    pub gamma_tot_per_s: f64,
    /// Per-regime / per-component sub-rates; sums to `gamma_tot_per_s`.
    pub breakdown: Vec<(String, f64)>,
    /// Estimated relative quadrature error of the total.
    pub quadrature_rel_error: f64,
    /// False when any quadrature exhausted its budget before reaching
    /// the configured tolerance (value is then a best-effort partial).
    pub converged: bool,
    /// True when the charged-probe result deliberately omits the
    /// positive intermediate-q contribution between the two regimes.
    pub omitted_intermediate: bool,
    /// True when a requested regime had an empty q-domain at every
    /// spectrum energy (rate identically 0 there).
    pub closed_domain: bool,
}

impl RateResult {
    fn single(
        mission: &MissionConfig,
        background: Background,
        regime: &str,
        outcome: &MasterOutcome,
    ) -> Self {
        RateResult {
            mission: mission.name.clone(),
            background,
            gamma_tot_per_s: outcome.gamma_per_s,
            breakdown: vec![(regime.to_string(), outcome.gamma_per_s)],
            quadrature_rel_error: outcome.rel_error,
            converged: outcome.converged,
            omitted_intermediate: false,
            closed_domain: !outcome.domain_open,
        }
    }
}

/// Outcome of one master-formula evaluation.
#[derive(Debug, Clone, Copy)]
pub struct MasterOutcome {
    /// Rate in s⁻¹.
    pub gamma_per_s: f64,
    /// Estimated relative quadrature error.
    pub rel_error: f64,
    /// Whether both quadrature levels met their tolerances.
    pub converged: bool,
    /// Whether any spectrum energy had a nonempty q-domain.
    pub domain_open: bool,
}

impl MasterOutcome {
    fn zero() -> Self {
        MasterOutcome {
            gamma_per_s: 0.0,
            rel_error: 0.0,
            converged: true,
            domain_open: false,
        }
    }
}

/// Default low-q upper cut 1/(10 r_atom), eV, for this target.
pub fn q_low_cut_ev(r_atom_m: f64) -> f64 {
    M_PER_INV_EV / (10.0 * r_atom_m)
}

/// Default high-q lower limit 10/r_atom, eV, for this target.
pub fn q_high_floor_ev(r_atom_m: f64) -> f64 {
    10.0 * M_PER_INV_EV / r_atom_m
}

/// Description of the outer (energy) integral.
pub struct OuterSpec<'a> {
    /// Spectral flux dΦ/dK in natural units (eV²).
    pub flux_natural: Box<dyn Fn(f64) -> f64 + 'a>,
    /// Kinetic-energy support (eV).
    pub support: (f64, f64),
    /// Breakpoints (kinetic energies) seeded into the outer quadrature.
    pub seeds: Vec<f64>,
}

impl<'a> OuterSpec<'a> {
    /// Outer spec reading energies and nodes off a flux spectrum.
    pub fn from_spectrum(spectrum: &'a FluxSpectrum) -> Self {
        OuterSpec {
            flux_natural: Box::new(move |k| spectrum.evaluate_natural(k)),
            support: spectrum.support(),
            seeds: outer_seeds_for(spectrum),
        }
    }
}

/// Generic master-formula engine. `matrix_element(ω, q)` is |M̄|² in the
/// unit-amplitude normalization of the master formula; `structure(q)` is
/// S(q); `q_limits(K)` yields the (inclusive) q-window at kinetic energy
/// K, empty when hi ≤ lo.
#[allow(clippy::too_many_arguments)]
pub fn master_rate(
    mission: &MissionConfig,
    species_mass_ev: f64,
    outer: &OuterSpec<'_>,
    target_mass_ev: f64,
    matrix_element: &dyn Fn(f64, f64) -> f64,
    structure: &dyn Fn(f64) -> f64,
    q_limits: &dyn Fn(f64) -> (f64, f64),
    q_features: &[f64],
    cfg: &QuadratureConfig,
) -> Result<MasterOutcome> {
    cfg.validate()?;
    let (k_min, k_max) = outer.support;
    if k_max <= k_min {
        return Ok(MasterOutcome::zero());
    }
    let dx = mission.delta_x_inv_ev();
    let inner_tol = cfg.rel_tol / 4.0;
    let outer_tol = cfg.rel_tol / 2.0;

    let inner_failure: RefCell<Option<Error>> = RefCell::new(None);
    let sum_abs_value = Cell::new(0.0f64);
    let sum_abs_error = Cell::new(0.0f64);
    let any_open = Cell::new(false);
    let m = species_mass_ev;

    let outer_integrand = |k: f64| -> f64 {
        if inner_failure.borrow().is_some() {
            return f64::NAN;
        }
        let flux = (outer.flux_natural)(k);
        if flux == 0.0 {
            return 0.0;
        }
        let omega = k + m;
        let p2 = k * (k + 2.0 * m);
        if p2 <= 0.0 {
            return 0.0;
        }
        let (q_lo, q_hi) = q_limits(k);
        if !(q_hi > q_lo) {
            return 0.0;
        }
        any_open.set(true);
        let f_smooth = |q: f64| {
            let recoil_left = target_mass_ev + omega - target_mass_ev.hypot(q);
            q * recoil_left * matrix_element(omega, q) * structure(q)
        };
        match oscillatory_q_integral(&f_smooth, q_lo, q_hi, dx, q_features, cfg, inner_tol) {
            Ok(r) => {
                let weight = flux * omega / p2;
                sum_abs_value.set(sum_abs_value.get() + (weight * r.value).abs());
                sum_abs_error.set(sum_abs_error.get() + (weight * r.error).abs());
                weight * r.value
            }
            Err(e) => {
                *inner_failure.borrow_mut() = Some(e);
                f64::NAN
            }
        }
    };

    let mut opts = QuadOptions::with_rel_tol(outer_tol);
    opts.max_subdivisions = cfg.max_subdivisions;
    opts.initial_points = outer.seeds.clone();
    let use_log = k_min > 0.0 && k_max / k_min > 100.0;
    let outer_result = if use_log {
        integrate_log(outer_integrand, k_min, k_max, &opts)
    } else {
        integrate(outer_integrand, k_min, k_max, &opts)
    };
    if let Some(e) = inner_failure.into_inner() {
        return Err(e);
    }
    let outer_result = outer_result?;

    let gamma_natural = outer_result.value / (2.0 * std::f64::consts::PI);
    let gamma_per_s = gamma_natural * EV_TO_PER_S;
    let inner_rel = if sum_abs_value.get() > 0.0 {
        sum_abs_error.get() / sum_abs_value.get()
    } else {
        0.0
    };
    let outer_rel = if outer_result.value != 0.0 {
        (outer_result.error / outer_result.value).abs()
    } else {
        0.0
    };
    let rel_error = inner_rel + outer_rel;
    Ok(MasterOutcome {
        gamma_per_s,
        rel_error,
        converged: outer_result.converged && rel_error <= cfg.rel_tol,
        domain_open: any_open.get(),
    })
}

/// Inner momentum-transfer integral ∫ f_smooth(q)·[1 − sinc(qΔx)] dq,
/// with breakpoints seeded at the sinc period scale, at structural
/// features, and on a log ladder; the oscillatory factor is replaced by
/// its mean 1 beyond the policy threshold.
fn oscillatory_q_integral(
    f_smooth: &dyn Fn(f64) -> f64,
    q_lo: f64,
    q_hi: f64,
    dx: f64,
    features: &[f64],
    cfg: &QuadratureConfig,
    rel_tol: f64,
) -> Result<crate::quadrature::QuadResult> {
    let mut seeds: Vec<f64> = features
        .iter()
        .copied()
        .filter(|&q| q > q_lo && q < q_hi)
        .collect();
    if dx > 0.0 {
        let period = std::f64::consts::PI / dx;
        let max_periods = match cfg.sinc_policy {
            SincPolicy::SubdividePerPeriod => 2048usize,
            SincPolicy::AsymptoticReplace { .. } => 32,
        };
        let mut k = 1usize;
        while k <= max_periods {
            let q = k as f64 * period;
            if q >= q_hi {
                break;
            }
            if q > q_lo {
                seeds.push(q);
            }
            k += 1;
        }
    }
    // Log ladder so linear bisection never faces many decades at once.
    let ladder_lo = if q_lo > 0.0 { q_lo } else { q_hi * 1e-9 };
    if q_hi / ladder_lo > 10.0 {
        let decades = (q_hi / ladder_lo).log10();
        let n = ((decades * 8.0).ceil() as usize).clamp(8, 96);
        for i in 1..n {
            let q = ladder_lo * (q_hi / ladder_lo).powf(i as f64 / n as f64);
            if q > q_lo && q < q_hi {
                seeds.push(q);
            }
        }
    }
    let decoherence = |q: f64| -> f64 {
        let x = q * dx;
        match cfg.sinc_policy {
            SincPolicy::AsymptoticReplace { threshold } if x > threshold => 1.0,
            _ => decoherence_factor(x),
        }
    };
    let mut opts = QuadOptions::with_rel_tol(rel_tol);
    opts.max_subdivisions = cfg.max_subdivisions;
    opts.initial_points = seeds;
    integrate(|q| f_smooth(q) * decoherence(q), q_lo, q_hi, &opts)
}

/// Structure closure with the policy's large-phase simplification: once
/// q·r_cloud exceeds the asymptotic threshold, the rapidly oscillating
/// cloud-coherent form-factor tail (envelope ∝ (q r_c)⁻⁴, integrated
/// bias ≲ 10⁻⁶ of the channel rates here) is dropped by evaluating the
/// cold-atom variant of the same basis.
fn structure_with_policy(
    params: StructureParams,
    basis: StructureBasis,
    policy: SincPolicy,
) -> impl Fn(f64) -> f64 {
    move |q: f64| {
        if let SincPolicy::AsymptoticReplace { threshold } = policy {
            if q * params.r_cloud_inv_ev > threshold && params.mode == StructureMode::MatterCoherent
            {
                let dropped = StructureParams {
                    mode: StructureMode::ColdAtom,
                    ..params
                };
                return structure_function(q, basis, &dropped);
            }
        }
        structure_function(q, basis, &params)
    }
}

/// Cloud-scale form-factor breakpoints (diffraction zeros) within reach.
fn cloud_features(params: &StructureParams) -> Vec<f64> {
    if params.mode != StructureMode::MatterCoherent {
        return Vec::new();
    }
    UNIFORM_SPHERE_FF_ZEROS
        .iter()
        .map(|z| z / params.r_cloud_inv_ev)
        .collect()
}

/// Nuclear form-factor breakpoints: Helm diffraction zeros and the
/// Gaussian skin scales.
fn nuclear_features(params: &StructureParams) -> Vec<f64> {
    let mut v: Vec<f64> = UNIFORM_SPHERE_FF_ZEROS
        .iter()
        .map(|z| z / params.nuclear.r_n_inv_ev)
        .collect();
    for k in 1..=3 {
        v.push(k as f64 / params.nuclear.skin_inv_ev);
    }
    v
}

fn outer_seeds_for(spectrum: &FluxSpectrum) -> Vec<f64> {
    match spectrum.table_nodes() {
        Some(nodes) if nodes.len() <= 64 => nodes.to_vec(),
        Some(nodes) => {
            // Subsample large tables; adaptive refinement recovers the rest.
            let stride = nodes.len().div_ceil(64);
            nodes.iter().copied().step_by(stride).collect()
        }
        None => Vec::new(),
    }
}

fn check_species(spectrum: &FluxSpectrum, expected: &str, channel: &str) -> Result<()> {
    if spectrum.species.label != expected {
        return Err(Error::config(format!(
            "{channel} channel needs a {expected} spectrum, got '{}'",
            spectrum.species.label
        )));
    }
    Ok(())
}

/// Decoherence rate from solar photons (polarizability coupling):
/// Γ = (α_N²/32π) ∫dω (dn/dω) ω ∫₀^{q_max} dq (ω+M−√(M²+q²)) q S(q) [1−sinc(qΔx)].
pub fn rate_solar_photons(
    mission: &MissionConfig,
    spectrum: &FluxSpectrum,
    cfg: &QuadratureConfig,
) -> Result<RateResult> {
    rate_solar_photons_banded(mission, spectrum, cfg, None)
}

/// Photon rate with the momentum-transfer integral restricted to a fixed
/// window (used for scaling-law scans); `None` means the full [0, q_max].
pub fn rate_solar_photons_banded(
    mission: &MissionConfig,
    spectrum: &FluxSpectrum,
    cfg: &QuadratureConfig,
    q_band: Option<(f64, f64)>,
) -> Result<RateResult> {
    check_species(spectrum, "photon", "solar-photon")?;
    let m_unit = mission.unit_mass_ev();
    let alpha_n = mission.target.alpha_n_inv_ev3();
    let params = mission.structure_params();
    let structure = structure_with_policy(params, StructureBasis::Atoms, cfg.sinc_policy);
    let msq = move |omega: f64, _q: f64| alpha_n * alpha_n * omega * omega / 16.0;
    let q_limits = move |k: f64| {
        let hi = q_max(0.0, m_unit, k).unwrap_or(0.0);
        match q_band {
            Some((lo, band_hi)) => (lo, hi.min(band_hi)),
            None => (0.0, hi),
        }
    };
    let features = cloud_features(&params);
    let outer = OuterSpec::from_spectrum(spectrum);
    let outcome = master_rate(
        mission, 0.0, &outer, m_unit, &msq, &structure, &q_limits, &features, cfg,
    )?;
    Ok(RateResult::single(
        mission,
        Background::SolarPhotons,
        "all-q",
        &outcome,
    ))
}

/// Low-momentum-transfer charged-probe rate (whole-atom polarization by
/// the projectile's Coulomb field):
/// Γ = (π/128) Z_ion⁴ α² α_N² ∫dω (dn/dω)/p ∫₀^{min(q_cut,q_max)} dq
///     (ω+M−√(M²+q²)) q³ S(q) [1−sinc(qΔx)], S in the atoms basis.
pub fn rate_charged_lowq(
    mission: &MissionConfig,
    spectrum: &FluxSpectrum,
    z_ion: u32,
    q_cut_ev: Option<f64>,
    cfg: &QuadratureConfig,
    background: Background,
) -> Result<RateResult> {
    if spectrum.species.mass_ev <= 0.0 {
        return Err(Error::config(
            "low-q charged channel needs a massive charged species",
        ));
    }
    let mission_clone = mission;
    if z_ion == 0 {
        return Ok(RateResult::single(
            mission_clone,
            background,
            "low-q",
            &MasterOutcome::zero(),
        ));
    }
    let m_in = spectrum.species.mass_ev;
    let m_unit = mission.unit_mass_ev();
    let alpha_n = mission.target.alpha_n_inv_ev3();
    let q_cut = q_cut_ev.unwrap_or_else(|| q_low_cut_ev(mission.target.r_atom_m));
    let z4 = (z_ion as f64).powi(4);
    let params = mission.structure_params();
    let structure = structure_with_policy(params, StructureBasis::Atoms, cfg.sinc_policy);
    // |M̄|² = π² Z⁴ α_N² α² q² / 64 in the master normalization.
    let msq = move |_omega: f64, q: f64| {
        std::f64::consts::PI.powi(2) * z4 * alpha_n * alpha_n * ALPHA * ALPHA * q * q / 64.0
    };
    let q_limits = move |k: f64| {
        let hi = q_max(m_in, m_unit, k).unwrap_or(0.0).min(q_cut);
        (0.0, hi)
    };
    let features = cloud_features(&params);
    let outer = OuterSpec::from_spectrum(spectrum);
    let outcome = master_rate(
        mission, m_in, &outer, m_unit, &msq, &structure, &q_limits, &features, cfg,
    )?;
    Ok(RateResult::single(mission, background, "low-q", &outcome))
}

/// High-momentum-transfer charged-probe rate (Coulomb scattering on
/// individual protons, nuclear-coherence enhanced):
/// Γ = 8π Z_ion² α² ∫dω (dΦ/dω) ω²/(ω²−m²) ∫_{q_high}^{q_max} dq
///     S(q)/q³ [1−sinc(qΔx)], S in the protons basis; identically 0
/// (with the closed-domain flag) when q_max ≤ q_high everywhere.
pub fn rate_charged_highq(
    mission: &MissionConfig,
    spectrum: &FluxSpectrum,
    z_ion: u32,
    q_floor_ev: Option<f64>,
    cfg: &QuadratureConfig,
    background: Background,
) -> Result<RateResult> {
    if spectrum.species.mass_ev <= 0.0 {
        return Err(Error::config(
            "high-q charged channel needs a massive charged species",
        ));
    }
    if z_ion == 0 {
        return Ok(RateResult::single(
            mission,
            background,
            "high-q",
            &MasterOutcome::zero(),
        ));
    }
    let m_in = spectrum.species.mass_ev;
    // The probe scatters on individual protons: the recoiling target in
    // the kinematics is a proton, not the whole atom.
    let m_target = M_PROTON_EV;
    let q_floor = q_floor_ev.unwrap_or_else(|| q_high_floor_ev(mission.target.r_atom_m));
    let z2 = (z_ion as f64).powi(2);
    let params = mission.structure_params();
    let structure = structure_with_policy(params, StructureBasis::Protons, cfg.sinc_policy);
    // Expressed through the master engine: q·R·|M̄|² must equal
    // 16π² Z² α² ω / q³, so |M̄|² carries 1/R(q).
    let msq = move |omega: f64, q: f64| {
        let recoil_left = m_target + omega - m_target.hypot(q);
        16.0 * std::f64::consts::PI.powi(2) * z2 * ALPHA * ALPHA * omega / (q.powi(4) * recoil_left)
    };
    let q_limits = move |k: f64| {
        let hi = q_max(m_in, m_target, k).unwrap_or(0.0);
        (q_floor, hi)
    };
    let features = nuclear_features(&params);
    let outer = OuterSpec::from_spectrum(spectrum);
    let outcome = master_rate(
        mission, m_in, &outer, m_target, &msq, &structure, &q_limits, &features, cfg,
    )?;
    Ok(RateResult::single(mission, background, "high-q", &outcome))
}

/// Combined charged-probe rate: low-q plus high-q with the default
/// regime boundaries; the intermediate window [q_low, q_high]
/// contributes 0 by construction and is flagged as omitted.
pub fn rate_charged_combined(
    mission: &MissionConfig,
    spectrum: &FluxSpectrum,
    z_ion: u32,
    cfg: &QuadratureConfig,
    background: Background,
) -> Result<RateResult> {
    let low = rate_charged_lowq(mission, spectrum, z_ion, None, cfg, background)?;
    let high = rate_charged_highq(mission, spectrum, z_ion, None, cfg, background)?;
    Ok(merge_charged(mission, background, low, high, z_ion > 0))
}

fn merge_charged(
    mission: &MissionConfig,
    background: Background,
    low: RateResult,
    high: RateResult,
    coupled: bool,
) -> RateResult {
    let gamma_low = low.gamma_tot_per_s;
    let gamma_high = high.gamma_tot_per_s;
    let total = gamma_low + gamma_high;
    let rel_error = if total > 0.0 {
        (low.quadrature_rel_error * gamma_low + high.quadrature_rel_error * gamma_high) / total
    } else {
        0.0
    };
    RateResult {
        mission: mission.name.clone(),
        background,
        gamma_tot_per_s: total,
        breakdown: vec![("low-q".into(), gamma_low), ("high-q".into(), gamma_high)],
        quadrature_rel_error: rel_error,
        converged: low.converged && high.converged,
        omitted_intermediate: coupled,
        closed_domain: low.closed_domain && high.closed_domain,
    }
}

/// Solar-neutrino rate (neutral-current coupling to the neutron count):
/// Γ = (G_F²/4π) ∫dω (dΦ/dω) ∫₀^{2ω} dq q P(ω,q) S_n(q) [1−sinc(qΔx)],
/// with P = 1 − (q²/4ω²)(2ω/M + 1) + q⁴/(8ω²M²) clamped at 0 and S_n
/// the neutrons-basis structure function. Monochromatic components are
/// evaluated analytically in ω; continua by quadrature.
pub fn rate_neutrino(
    mission: &MissionConfig,
    spectrum: &FluxSpectrum,
    fermi: FermiConstant,
    cfg: &QuadratureConfig,
) -> Result<RateResult> {
    check_species(spectrum, "neutrino", "neutrino")?;
    cfg.validate()?;
    let components = match spectrum.neutrino_components() {
        Some(c) => c,
        None => {
            // Zero spectrum: nothing to scatter.
            return Ok(RateResult::single(
                mission,
                Background::SolarNeutrinos,
                "all",
                &MasterOutcome::zero(),
            ));
        }
    };
    let m_unit = mission.unit_mass_ev();
    let gf = fermi.value_inv_ev2();
    let params = mission.structure_params();
    let structure = structure_with_policy(params, StructureBasis::Neutrons, cfg.sinc_policy);
    // Expressed through the master engine: with massless neutrinos the
    // master prefactor is (1/2π)(dΦ/dω)(1/ω) q R |M̄|² S D, so
    // |M̄|² = G_F² ω P(ω,q) / (2 R(q)) reproduces (G_F²/4π) q P S D.
    let msq = move |omega: f64, q: f64| {
        let recoil_left = m_unit + omega - m_unit.hypot(q);
        let x = q / (2.0 * omega);
        let p_factor = (1.0 - x * x * (2.0 * omega / m_unit + 1.0)
            + q.powi(4) / (8.0 * omega * omega * m_unit * m_unit))
            .max(0.0);
        gf * gf * omega * p_factor / (2.0 * recoil_left)
    };
    let q_limits = |k: f64| (0.0, 2.0 * k);
    let mut features = nuclear_features(&params);
    features.extend(cloud_features(&params));

    let mut breakdown = Vec::new();
    let mut total = 0.0;
    let mut abs_error = 0.0;
    let mut converged = true;
    let mut any_open = false;
    for c in components {
        let gamma_c = if c.is_line() {
            // δ-line: Γ_c = (1/2π) Φ_nat (1/ω) ∫ q R |M̄|² S D dq.
            let omega = c.energy_ev;
            let flux_nat = c.flux_cm2_s * CM2_S_FLUX_TO_EV3;
            let (q_lo, q_hi) = q_limits(omega);
            let f_smooth = |q: f64| {
                let recoil_left = m_unit + omega - m_unit.hypot(q);
                q * recoil_left * msq(omega, q) * structure(q)
            };
            let r = oscillatory_q_integral(
                &f_smooth,
                q_lo,
                q_hi,
                mission.delta_x_inv_ev(),
                &features,
                cfg,
                cfg.rel_tol / 4.0,
            )?;
            any_open = true;
            let value = flux_nat / omega * r.value / (2.0 * std::f64::consts::PI) * EV_TO_PER_S;
            let err = if r.value != 0.0 {
                (r.error / r.value).abs() * value
            } else {
                0.0
            };
            abs_error += err.abs();
            converged &= r.converged;
            value
        } else {
            let eval = |k: f64| c.evaluate(k) * CM2_S_FLUX_TO_EV3;
            let outer = OuterSpec {
                flux_natural: Box::new(eval),
                support: (0.0, c.energy_ev),
                seeds: vec![0.25 * c.energy_ev, 0.5 * c.energy_ev, 0.75 * c.energy_ev],
            };
            let out = master_rate(
                mission, 0.0, &outer, m_unit, &msq, &structure, &q_limits, &features, cfg,
            )?;
            abs_error += out.rel_error * out.gamma_per_s;
            converged &= out.converged;
            any_open |= out.domain_open;
            out.gamma_per_s
        };
        breakdown.push((c.name.clone(), gamma_c));
        total += gamma_c;
    }
    // Collapse duplicate component names (the two 7Be lines) so the
    // breakdown stays one entry per channel.
    let mut merged: Vec<(String, f64)> = Vec::new();
    for (name, g) in breakdown {
        if let Some(e) = merged.iter_mut().find(|e| e.0 == name) {
            e.1 += g;
        } else {
            merged.push((name, g));
        }
    }
    let rel = if total > 0.0 { abs_error / total } else { 0.0 };
    Ok(RateResult {
        mission: mission.name.clone(),
        background: Background::SolarNeutrinos,
        gamma_tot_per_s: total,
        breakdown: merged,
        quadrature_rel_error: rel,
        converged: converged && rel <= cfg.rel_tol,
        omitted_intermediate: false,
        closed_domain: !any_open,
    })
}

/// Zodiacal-dust collision rate (geometric cross-section, every hit
/// fully resolves the superposition):
/// Γ = N_clouds ∫ dlog₁₀m (dn/dlog m) (v_dust/4) π (r_cloud + a(m))².
pub fn rate_dust(
    mission: &MissionConfig,
    dust: &DustDistribution,
    r_orbit_au: f64,
    cfg: &QuadratureConfig,
) -> Result<RateResult> {
    cfg.validate()?;
    if !(r_orbit_au > 0.0) {
        return Err(Error::domain("orbital radius must be positive"));
    }
    let v_cm_s = dust.v_dust_km_s(r_orbit_au) * 1e5;
    let r_cloud_cm = mission.r_cloud_m * 100.0;
    let (m_lo, m_hi) = dust.mass_support_g;
    let (l_lo, l_hi) = (m_lo.log10(), m_hi.log10());
    let integrand = |l: f64| {
        let radius = r_cloud_cm + dust.grain_radius_cm(10f64.powf(l));
        dust.evaluate_dndlogm(l) * (v_cm_s / 4.0) * std::f64::consts::PI * radius * radius
    };
    let mut opts = QuadOptions::with_rel_tol(cfg.rel_tol / 2.0);
    opts.max_subdivisions = cfg.max_subdivisions;
    // Seed every decade so the power-law pieces are resolved.
    opts.initial_points = (0..)
        .map(|i| l_lo + i as f64)
        .take_while(|l| *l < l_hi)
        .collect();
    let r = integrate(integrand, l_lo, l_hi, &opts)?;
    let gamma = DUST_CLOUDS_PER_SHOT * r.value;
    let rel = if r.value != 0.0 {
        (r.error / r.value).abs()
    } else {
        0.0
    };
    Ok(RateResult {
        mission: mission.name.clone(),
        background: Background::ZodiacalDust,
        gamma_tot_per_s: gamma,
        breakdown: vec![("geometric".into(), gamma)],
        quadrature_rel_error: rel,
        converged: r.converged && rel <= cfg.rel_tol,
        omitted_intermediate: false,
        closed_domain: gamma == 0.0,
    })
}

/// The full set of background inputs a budget evaluation needs.
#[derive(Debug, Clone)]
pub struct BackgroundSources {
    pub photons: FluxSpectrum,
    pub wind: FluxSpectrum,
    pub cosmic_rays: FluxSpectrum,
    pub neutrinos: FluxSpectrum,
    pub dust: DustDistribution,
    pub fermi: FermiConstant,
    /// Heliocentric orbital radius for the dust channel, AU.
    pub r_orbit_au: f64,
}

impl BackgroundSources {
    /// All-analytic built-in models (runs with zero external data).
    pub fn builtin() -> Result<Self> {
        Ok(BackgroundSources {
            photons: crate::spectra::solar_photon_spectrum(
                crate::spectra::PhotonSource::Blackbody {
                    temperature_k: crate::constants::T_SUN_K,
                },
            )?,
            wind: crate::spectra::solar_wind_spectrum(
                crate::spectra::SOLAR_WIND_DENSITY_CM3,
                crate::spectra::SOLAR_WIND_BAND_EV,
            )?,
            cosmic_rays: crate::spectra::cosmic_ray_spectrum(
                crate::spectra::CosmicRaySource::BuiltinLis,
                crate::spectra::COSMIC_RAY_CUTOFF_EV,
            )?,
            neutrinos: crate::spectra::solar_neutrino_spectrum(
                &crate::spectra::b16_gs98_components(),
            )?,
            dust: DustDistribution::builtin_grun(),
            fermi: FermiConstant::default(),
            r_orbit_au: 1.0,
        })
    }
}

/// Evaluate one (mission, background) cell. Charged-probe backgrounds
/// respect the regime selector; the others ignore it.
pub fn background_rate(
    mission: &MissionConfig,
    background: Background,
    sources: &BackgroundSources,
    regime: ChargedRegime,
    cfg: &QuadratureConfig,
) -> Result<RateResult> {
    match background {
        Background::SolarPhotons => rate_solar_photons(mission, &sources.photons, cfg),
        Background::SolarWind => {
            charged_by_regime(mission, &sources.wind, regime, cfg, Background::SolarWind)
        }
        Background::CosmicRays => charged_by_regime(
            mission,
            &sources.cosmic_rays,
            regime,
            cfg,
            Background::CosmicRays,
        ),
        Background::SolarNeutrinos => {
            rate_neutrino(mission, &sources.neutrinos, sources.fermi, cfg)
        }
        Background::ZodiacalDust => rate_dust(mission, &sources.dust, sources.r_orbit_au, cfg),
    }
}

fn charged_by_regime(
    mission: &MissionConfig,
    spectrum: &FluxSpectrum,
    regime: ChargedRegime,
    cfg: &QuadratureConfig,
    background: Background,
) -> Result<RateResult> {
    match regime {
        ChargedRegime::Low => rate_charged_lowq(mission, spectrum, 1, None, cfg, background),
        ChargedRegime::High => rate_charged_highq(mission, spectrum, 1, None, cfg, background),
        ChargedRegime::Both => rate_charged_combined(mission, spectrum, 1, cfg, background),
    }
}
