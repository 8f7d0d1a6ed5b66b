//! Independent cross-section-route validation of the rate engine.
//!
//! Every scattering rate the engine produces can be rewritten through
//! the standard relativistically normalized amplitude:
//!
//! Γ = (1/32πM) ∫dω (dΦ/dω) (ω² − m²)^{−1}
//!        ∫dq q |ℳ(ω,q)|² (M² + q²)^{−1/2} S(q) [1 − sinc(qΔx)],
//!
//! where |ℳ|² carries the flux and phase-space factors explicitly:
//! |ℳ|² = 16 ω ω′ M √(M² + q²) |M̄|², with ω′ = M + ω − √(M² + q²) the
//! outgoing probe energy. This module evaluates the same channels from
//! closed-form |ℳ|² expressions with its own (linear-outer) quadrature
//! assembly, giving a route through independent algebra that must agree
//! with the engine to ~10⁻⁴.

use crate::constants::{ALPHA, ANGSTROM3_TO_INV_EV3, CM2_S_FLUX_TO_EV3, EV_TO_PER_S, M_PROTON_EV};
use crate::error::{Error, Result};
use crate::kinematics::{q_max, TargetSpec};
use crate::missions::MissionConfig;
use crate::quadrature::{integrate, QuadOptions};
use crate::rates::{q_high_floor_ev, q_low_cut_ev, Background, FermiConstant, QuadratureConfig};
use crate::response::{
    decoherence_factor, structure_function, StructureBasis, StructureMode, StructureParams,
    UNIFORM_SPHERE_FF_ZEROS,
};
use crate::spectra::FluxSpectrum;

/// Phase beyond which the oscillatory factors are replaced by their
/// means in this route (mirrors the engine's default policy).
const SINC_ASYMPTOTIC_PHASE: f64 = 1e3;

/// Channels this route can evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XsecChannel {
    SolarPhotons,
    ChargedLowQ,
    ChargedHighQ,
    Neutrino,
}

impl XsecChannel {
    pub fn label(&self) -> &'static str {
        match self {
            XsecChannel::SolarPhotons => "solar-photons",
            XsecChannel::ChargedLowQ => "charged-low-q",
            XsecChannel::ChargedHighQ => "charged-high-q",
            XsecChannel::Neutrino => "neutrino",
        }
    }
}

/// Map a background to the channels this route covers; the dust channel
/// has no scattering amplitude (geometric absorber) and is unsupported.
pub fn channels_for(background: Background) -> Result<Vec<XsecChannel>> {
    match background {
        Background::SolarPhotons => Ok(vec![XsecChannel::SolarPhotons]),
        Background::SolarWind | Background::CosmicRays => {
            Ok(vec![XsecChannel::ChargedLowQ, XsecChannel::ChargedHighQ])
        }
        Background::SolarNeutrinos => Ok(vec![XsecChannel::Neutrino]),
        Background::ZodiacalDust => Err(Error::UnsupportedBackground(
            "zodiacal-dust has no amplitude-level cross-section route".into(),
        )),
    }
}

/// Squared amplitude |ℳ|² (standard normalization) for the photon
/// channel: α_N² ω³ ω′ M √(M² + q²).
fn msq_photon(alpha_n: f64, m_target: f64, omega: f64, q: f64) -> f64 {
    let root = m_target.hypot(q);
    let omega_out = m_target + omega - root;
    alpha_n * alpha_n * omega.powi(3) * omega_out * m_target * root
}

/// |ℳ|² for low-q charged scattering (projectile Coulomb field
/// polarizing the whole atom): (π² Z⁴ α² α_N²/4) q² ω ω′ M √(M² + q²).
fn msq_charged_lowq(alpha_n: f64, z_ion: f64, m_target: f64, omega: f64, q: f64) -> f64 {
    let root = m_target.hypot(q);
    let omega_out = m_target + omega - root;
    std::f64::consts::PI.powi(2) * z_ion.powi(4) * ALPHA * ALPHA * alpha_n * alpha_n / 4.0
        * q
        * q
        * omega
        * omega_out
        * m_target
        * root
}

/// |ℳ|² for high-q charged scattering (Coulomb on individual protons):
/// 256 π² α² Z² M √(M² + q²) ω² / q⁴.
fn msq_charged_highq(z_ion: f64, m_target: f64, omega: f64, q: f64) -> f64 {
    256.0
        * std::f64::consts::PI.powi(2)
        * ALPHA
        * ALPHA
        * z_ion
        * z_ion
        * m_target
        * m_target.hypot(q)
        * omega
        * omega
        / q.powi(4)
}

/// |ℳ|² for neutral-current neutrino scattering:
/// 8 G_F² ω² M √(M² + q²) P(ω,q), with the kinematic polynomial
/// P = 1 − (q²/4ω²)(2ω/M + 1) + q⁴/(8ω²M²) clamped at zero.
fn msq_neutrino(g_fermi: f64, m_target: f64, omega: f64, q: f64) -> f64 {
    let x = q / (2.0 * omega);
    let p_factor = (1.0 - x * x * (2.0 * omega / m_target + 1.0)
        + q.powi(4) / (8.0 * omega * omega * m_target * m_target))
        .max(0.0);
    8.0 * g_fermi * g_fermi * omega * omega * m_target * m_target.hypot(q) * p_factor
}

/// Structure function with the same large-phase simplification the
/// engine applies: cloud-coherent tails are dropped once q·r_cloud
/// exceeds the asymptotic phase.
fn structure_eval(q: f64, basis: StructureBasis, params: &StructureParams) -> f64 {
    if params.mode == StructureMode::MatterCoherent
        && q * params.r_cloud_inv_ev > SINC_ASYMPTOTIC_PHASE
    {
        let dropped = StructureParams {
            mode: StructureMode::ColdAtom,
            ..*params
        };
        return structure_function(q, basis, &dropped);
    }
    structure_function(q, basis, params)
}

/// Inner momentum-transfer integral of this route.
#[allow(clippy::too_many_arguments)]
fn inner_integral(
    q_lo: f64,
    q_hi: f64,
    dx: f64,
    m_target: f64,
    basis: StructureBasis,
    params: &StructureParams,
    msq: &dyn Fn(f64, f64) -> f64,
    omega: f64,
    rel_tol: f64,
) -> Result<f64> {
    if !(q_hi > q_lo) {
        return Ok(0.0);
    }
    let mut seeds: Vec<f64> = Vec::new();
    if dx > 0.0 {
        let period = std::f64::consts::PI / dx;
        for k in 1..=48usize {
            let q = k as f64 * period;
            if q >= q_hi {
                break;
            }
            if q > q_lo {
                seeds.push(q);
            }
        }
    }
    if params.mode == StructureMode::MatterCoherent {
        for z in UNIFORM_SPHERE_FF_ZEROS {
            let q = z / params.r_cloud_inv_ev;
            if q > q_lo && q < q_hi {
                seeds.push(q);
            }
        }
    }
    for z in UNIFORM_SPHERE_FF_ZEROS {
        let q = z / params.nuclear.r_n_inv_ev;
        if q > q_lo && q < q_hi {
            seeds.push(q);
        }
    }
    let ladder_lo = if q_lo > 0.0 { q_lo } else { q_hi * 1e-9 };
    if q_hi / ladder_lo > 10.0 {
        let decades = (q_hi / ladder_lo).log10();
        let n = ((decades * 12.0).ceil() as usize).clamp(12, 120);
        for i in 1..n {
            let q = ladder_lo * (q_hi / ladder_lo).powf(i as f64 / n as f64);
            if q > q_lo && q < q_hi {
                seeds.push(q);
            }
        }
    }
    let integrand = |q: f64| {
        let phase = q * dx;
        let deco = if phase > SINC_ASYMPTOTIC_PHASE {
            1.0
        } else {
            decoherence_factor(phase)
        };
        q * msq(omega, q) / m_target.hypot(q) * structure_eval(q, basis, params) * deco
    };
    let mut opts = QuadOptions::with_rel_tol(rel_tol);
    opts.initial_points = seeds;
    Ok(integrate(integrand, q_lo, q_hi, &opts)?.value)
}

/// Evaluate one channel rate (s⁻¹) through the cross-section route.
pub fn xsec_route_rate(
    mission: &MissionConfig,
    spectrum: &FluxSpectrum,
    channel: XsecChannel,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    cfg.validate()?;
    let rel_tol = (cfg.rel_tol / 4.0).min(2e-5);
    let params = mission.structure_params();
    let m_unit = mission.unit_mass_ev();
    let alpha_n = mission.target.alpha_n_inv_ev3();
    let dx = mission.delta_x_inv_ev();
    let m_in = spectrum.species.mass_ev;

    // Channel-specific pieces: target mass, structure basis, q-window,
    // and the closed-form |ℳ|².
    let (m_target, basis): (f64, StructureBasis) = match channel {
        XsecChannel::SolarPhotons | XsecChannel::ChargedLowQ => (m_unit, StructureBasis::Atoms),
        XsecChannel::ChargedHighQ => (M_PROTON_EV, StructureBasis::Protons),
        XsecChannel::Neutrino => (m_unit, StructureBasis::Neutrons),
    };
    let q_cut = q_low_cut_ev(mission.target.r_atom_m);
    let q_floor = q_high_floor_ev(mission.target.r_atom_m);
    let msq: Box<dyn Fn(f64, f64) -> f64> = match channel {
        XsecChannel::SolarPhotons => {
            Box::new(move |omega, q| msq_photon(alpha_n, m_target, omega, q))
        }
        XsecChannel::ChargedLowQ => {
            Box::new(move |omega, q| msq_charged_lowq(alpha_n, 1.0, m_target, omega, q))
        }
        XsecChannel::ChargedHighQ => {
            Box::new(move |omega, q| msq_charged_highq(1.0, m_target, omega, q))
        }
        XsecChannel::Neutrino => {
            let gf = FermiConstant::Computed.value_inv_ev2();
            Box::new(move |omega, q| msq_neutrino(gf, m_target, omega, q))
        }
    };
    let q_window = move |k: f64| -> (f64, f64) {
        match channel {
            XsecChannel::SolarPhotons => (0.0, q_max(0.0, m_target, k).unwrap_or(0.0)),
            XsecChannel::ChargedLowQ => (0.0, q_max(m_in, m_target, k).unwrap_or(0.0).min(q_cut)),
            XsecChannel::ChargedHighQ => (q_floor, q_max(m_in, m_target, k).unwrap_or(0.0)),
            XsecChannel::Neutrino => (0.0, 2.0 * k),
        }
    };

    // Species sanity.
    match channel {
        XsecChannel::SolarPhotons if spectrum.species.label != "photon" => {
            return Err(Error::config("photon channel needs a photon spectrum"));
        }
        XsecChannel::ChargedLowQ | XsecChannel::ChargedHighQ if m_in <= 0.0 => {
            return Err(Error::config("charged channels need a massive species"));
        }
        XsecChannel::Neutrino if spectrum.species.label != "neutrino" => {
            return Err(Error::config("neutrino channel needs a neutrino spectrum"));
        }
        _ => {}
    }

    let prefactor = 1.0 / (32.0 * std::f64::consts::PI * m_target);

    // Neutrino spectra are component sets: lines analytic in ω,
    // continua by quadrature.
    if channel == XsecChannel::Neutrino {
        let components = match spectrum.neutrino_components() {
            Some(c) => c,
            None => return Ok(0.0),
        };
        let mut total = 0.0;
        for c in components {
            let gamma_c = if c.is_line() {
                let omega = c.energy_ev;
                let (q_lo, q_hi) = q_window(omega);
                let inner = inner_integral(
                    q_lo, q_hi, dx, m_target, basis, &params, &msq, omega, rel_tol,
                )?;
                c.flux_cm2_s * CM2_S_FLUX_TO_EV3 * prefactor / (omega * omega) * inner
            } else {
                let outer = |k: f64| -> f64 {
                    let flux = c.evaluate(k) * CM2_S_FLUX_TO_EV3;
                    if flux == 0.0 || k <= 0.0 {
                        return 0.0;
                    }
                    let (q_lo, q_hi) = q_window(k);
                    match inner_integral(q_lo, q_hi, dx, m_target, basis, &params, &msq, k, rel_tol)
                    {
                        Ok(v) => flux * prefactor / (k * k) * v,
                        Err(_) => f64::NAN,
                    }
                };
                let mut opts = QuadOptions::with_rel_tol(rel_tol * 2.0);
                opts.initial_points =
                    vec![0.25 * c.energy_ev, 0.5 * c.energy_ev, 0.75 * c.energy_ev];
                integrate(outer, 0.0, c.energy_ev, &opts)?.value
            };
            total += gamma_c;
        }
        return Ok(total * EV_TO_PER_S);
    }

    let (k_min, k_max) = spectrum.support();
    if k_max <= k_min {
        return Ok(0.0);
    }
    let outer = |k: f64| -> f64 {
        let flux = spectrum.evaluate_natural(k);
        if flux == 0.0 {
            return 0.0;
        }
        let omega = k + m_in;
        let p2 = k * (k + 2.0 * m_in);
        if p2 <= 0.0 {
            return 0.0;
        }
        let (q_lo, q_hi) = q_window(k);
        match inner_integral(
            q_lo, q_hi, dx, m_target, basis, &params, &msq, omega, rel_tol,
        ) {
            Ok(v) => flux * prefactor / p2 * v,
            Err(_) => f64::NAN,
        }
    };
    // Deliberately linear outer quadrature (the engine prefers a log
    // transform for wide supports) with plain mid-support seeds.
    let mut opts = QuadOptions::with_rel_tol(rel_tol * 2.0);
    let mut seeds: Vec<f64> = (1..8)
        .map(|i| k_min + (k_max - k_min) * i as f64 / 8.0)
        .collect();
    if let Some(nodes) = spectrum.table_nodes() {
        let stride = nodes.len().div_ceil(48).max(1);
        seeds.extend(nodes.iter().copied().step_by(stride));
    }
    opts.initial_points = seeds;
    let result = integrate(outer, k_min, k_max, &opts)?;
    Ok(result.value * EV_TO_PER_S)
}

/// Single-atom photon total scattering cross-section (natural units,
/// eV⁻²) obtained by integrating this route's |ℳ|² over the full
/// momentum-transfer domain at photon energy ω.
pub fn photon_total_cross_section_inv_ev2(target: &TargetSpec, omega: f64) -> Result<f64> {
    let m_target = target.a * crate::constants::ATOMIC_MASS_EV;
    let alpha_n = target.alpha_n_inv_ev3();
    let q_hi = q_max(0.0, m_target, omega)?;
    let integrand = |q: f64| q * msq_photon(alpha_n, m_target, omega, q) / m_target.hypot(q);
    let opts = QuadOptions::with_rel_tol(1e-10);
    let inner = integrate(integrand, 0.0, q_hi, &opts)?.value;
    // σ(ω) = (1/32πM) ω⁻² ∫ dq q |ℳ|² / √(M²+q²) for a massless probe.
    Ok(inner / (32.0 * std::f64::consts::PI * m_target * omega * omega))
}

/// Long-wavelength closed form for the same cross-section:
/// σ = π k⁴ α_vol² with α_vol the polarizability volume (the
/// Heaviside–Lorentz coupling α_N = 4π α_vol makes these consistent).
pub fn rayleigh_closed_form_inv_ev2(target: &TargetSpec, omega: f64) -> f64 {
    let alpha_vol_nat = target.polarizability_volume_a3 * ANGSTROM3_TO_INV_EV3;
    std::f64::consts::PI * omega.powi(4) * alpha_vol_nat * alpha_vol_nat
}

/// One dual-route comparison.
#[derive(Debug, Clone)]
pub struct XsecCase {
    pub mission: String,
    pub channel: &'static str,
    pub gamma_engine_per_s: f64,
    pub gamma_xsec_per_s: f64,
}

impl XsecCase {
    /// Relative difference between the two routes.
    pub fn rel_diff(&self) -> f64 {
        if self.gamma_engine_per_s == 0.0 && self.gamma_xsec_per_s == 0.0 {
            return 0.0;
        }
        let scale = self
            .gamma_engine_per_s
            .abs()
            .max(self.gamma_xsec_per_s.abs());
        (self.gamma_engine_per_s - self.gamma_xsec_per_s).abs() / scale
    }
}

/// Run the 16-case dual-route comparison: four missions × {photons,
/// wind low-q, wind high-q, neutrinos}.
pub fn compare_routes(
    missions: &[MissionConfig],
    sources: &crate::rates::BackgroundSources,
    cfg: &QuadratureConfig,
) -> Result<Vec<XsecCase>> {
    let mut cases = Vec::new();
    for m in missions {
        let engine_photon = crate::rates::rate_solar_photons(m, &sources.photons, cfg)?;
        cases.push(XsecCase {
            mission: m.name.clone(),
            channel: XsecChannel::SolarPhotons.label(),
            gamma_engine_per_s: engine_photon.gamma_tot_per_s,
            gamma_xsec_per_s: xsec_route_rate(m, &sources.photons, XsecChannel::SolarPhotons, cfg)?,
        });
        let engine_low =
            crate::rates::rate_charged_lowq(m, &sources.wind, 1, None, cfg, Background::SolarWind)?;
        cases.push(XsecCase {
            mission: m.name.clone(),
            channel: XsecChannel::ChargedLowQ.label(),
            gamma_engine_per_s: engine_low.gamma_tot_per_s,
            gamma_xsec_per_s: xsec_route_rate(m, &sources.wind, XsecChannel::ChargedLowQ, cfg)?,
        });
        let engine_high = crate::rates::rate_charged_highq(
            m,
            &sources.wind,
            1,
            None,
            cfg,
            Background::SolarWind,
        )?;
        cases.push(XsecCase {
            mission: m.name.clone(),
            channel: XsecChannel::ChargedHighQ.label(),
            gamma_engine_per_s: engine_high.gamma_tot_per_s,
            gamma_xsec_per_s: xsec_route_rate(m, &sources.wind, XsecChannel::ChargedHighQ, cfg)?,
        });
        let engine_nu = crate::rates::rate_neutrino(m, &sources.neutrinos, sources.fermi, cfg)?;
        cases.push(XsecCase {
            mission: m.name.clone(),
            channel: XsecChannel::Neutrino.label(),
            gamma_engine_per_s: engine_nu.gamma_tot_per_s,
            gamma_xsec_per_s: xsec_route_rate(m, &sources.neutrinos, XsecChannel::Neutrino, cfg)?,
        });
    }
    Ok(cases)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::BackgroundSources;
    use approx::assert_relative_eq;

    #[test]
    fn rayleigh_cross_section_closed_form() {
        // In the long-wavelength, heavy-target limit the numerical
        // cross-section collapses to σ = π k⁴ α_vol².
        let target = TargetSpec::new(60.0, 30.0, 4.84).unwrap();
        for omega in [0.5, 1.0, 2.0, 5.0] {
            let numeric = photon_total_cross_section_inv_ev2(&target, omega).unwrap();
            let closed = rayleigh_closed_form_inv_ev2(&target, omega);
            assert_relative_eq!(numeric, closed, max_relative = 1e-6);
        }
    }

    #[test]
    fn dust_channel_is_unsupported() {
        match channels_for(Background::ZodiacalDust) {
            Err(Error::UnsupportedBackground(_)) => {}
            other => panic!("expected UnsupportedBackground, got {other:?}"),
        }
        assert_eq!(channels_for(Background::SolarWind).unwrap().len(), 2);
    }

    #[test]
    fn dual_routes_agree_on_all_sixteen_cases() {
        let missions = MissionConfig::builtin_all();
        let sources = BackgroundSources::builtin().unwrap();
        let cfg = QuadratureConfig::default();
        let cases = compare_routes(&missions, &sources, &cfg).unwrap();
        assert_eq!(cases.len(), 16);
        for c in &cases {
            assert!(
                c.rel_diff() < 1e-4,
                "{} {}: engine {} vs xsec {} (rel diff {})",
                c.mission,
                c.channel,
                c.gamma_engine_per_s,
                c.gamma_xsec_per_s,
                c.rel_diff()
            );
        }
    }
}
