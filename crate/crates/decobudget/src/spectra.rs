//! The background spectra: solar photons, solar-wind protons, galactic
//! cosmic-ray protons, and solar neutrinos, in one uniform
//! [`FluxSpectrum`] representation, plus the tabulated-file loader.
//!
//! Unit conventions at this interface: kinetic energies in eV, spectral
//! number fluxes dΦ/dK in cm⁻² s⁻¹ eV⁻¹. Conversion to natural units
//! happens at the rate-engine boundary.

use std::path::{Path, PathBuf};

use crate::constants::{
    CM2_S_FLUX_TO_EV3, E_CHARGE_C, HBARC_EV_NM, KB_EV_PER_K, M_PROTON_EV, SOLAR_CONSTANT_W_M2,
    SPEED_OF_LIGHT_M_S, W_M2_TO_EV4,
};
use crate::error::{Error, Result};
use crate::kinematics::ParticleSpecies;
use crate::quadrature::{integrate, integrate_auto, QuadOptions};

/// hc in eV·nm (= 2π ħc), for wavelength ↔ photon-energy conversion.
const HC_EV_NM: f64 = 2.0 * std::f64::consts::PI * HBARC_EV_NM;

/// Solar-photon blackbody support in eV; carries > 99.999% of the solar
/// constant and every kinematically relevant photon.
pub const PHOTON_SUPPORT_EV: (f64, f64) = (0.02, 15.0);

/// Solar-wind proton number density at 1 AU, cm⁻³.
pub const SOLAR_WIND_DENSITY_CM3: f64 = 5.74;

/// Solar-wind kinetic-energy band, eV (0.3–3 keV).
pub const SOLAR_WIND_BAND_EV: (f64, f64) = (300.0, 3000.0);

/// Galactic cosmic-ray kinetic-energy cut, eV (100 GeV).
pub const COSMIC_RAY_CUTOFF_EV: f64 = 100e9;

/// Lower edge of the built-in cosmic-ray band, eV (1 MeV).
pub const COSMIC_RAY_FLOOR_EV: f64 = 1e6;

/// Where a spectrum came from, for run manifests.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    /// Built-in analytic model with the given short name.
    Analytic(&'static str),
    /// Loaded from a data file.
    File(PathBuf),
}

/// A spectral number flux dΦ/dK for one background species.
#[derive(Debug, Clone)]
pub struct FluxSpectrum {
    /// The incoming particle species.
    pub species: ParticleSpecies,
    /// Short identifier used in reports.
    pub label: String,
    /// Analytic model or data file.
    pub provenance: Provenance,
    kind: SpectrumKind,
}

#[derive(Debug, Clone)]
enum SpectrumKind {
    Zero,
    Blackbody {
        /// Prefactor A in dΦ/dK = A·K²/(e^{K/kT} − 1), cm⁻² s⁻¹ eV⁻³.
        prefactor: f64,
        kt_ev: f64,
        support: (f64, f64),
    },
    FlatWind {
        /// dn/dK in cm⁻³ eV⁻¹ (constant over the band).
        density_per_ev: f64,
        band: (f64, f64),
    },
    CosmicRayLis {
        band: (f64, f64),
    },
    Tabulated(Table),
    NeutrinoSet(Vec<NeutrinoComponent>),
}

/// Sorted tabulated spectrum in (eV, cm⁻² s⁻¹ eV⁻¹).
#[derive(Debug, Clone)]
pub struct Table {
    energies_ev: Vec<f64>,
    flux: Vec<f64>,
}

impl Table {
    fn new(mut rows: Vec<(f64, f64)>, path: &Path) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: 0,
                msg: format!("need at least 2 data rows, found {}", rows.len()),
            });
        }
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in rows.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: 0,
                    msg: format!("duplicate abscissa {} eV", w[0].0),
                });
            }
        }
        Ok(Table {
            energies_ev: rows.iter().map(|r| r.0).collect(),
            flux: rows.iter().map(|r| r.1).collect(),
        })
    }

    /// Node energies (eV), ascending.
    pub fn energies(&self) -> &[f64] {
        &self.energies_ev
    }

    fn support(&self) -> (f64, f64) {
        (self.energies_ev[0], *self.energies_ev.last().unwrap())
    }

    /// Monotone log-energy interpolation: piecewise power law where both
    /// cell endpoints are positive, linear (clipped at 0) otherwise.
    /// Exactly 0 outside the tabulated support.
    fn evaluate(&self, k: f64) -> f64 {
        let e = &self.energies_ev;
        if !(k >= e[0] && k <= *e.last().unwrap()) {
            return 0.0;
        }
        let i = match e.binary_search_by(|v| v.total_cmp(&k)) {
            Ok(i) => return self.flux[i],
            Err(i) => i - 1,
        };
        let (e0, e1, f0, f1) = (e[i], e[i + 1], self.flux[i], self.flux[i + 1]);
        if f0 > 0.0 && f1 > 0.0 {
            let gamma = (f1 / f0).ln() / (e1 / e0).ln();
            f0 * (k / e0).powf(gamma)
        } else {
            (f0 + (f1 - f0) * (k - e0) / (e1 - e0)).max(0.0)
        }
    }

    /// Exact integral of the interpolant over its support (closed-form
    /// per-cell antiderivatives) — the "native" quadrature route.
    fn integral_closed_form(&self) -> f64 {
        let mut total = 0.0;
        for i in 0..self.energies_ev.len() - 1 {
            let (e0, e1) = (self.energies_ev[i], self.energies_ev[i + 1]);
            let (f0, f1) = (self.flux[i], self.flux[i + 1]);
            total += if f0 > 0.0 && f1 > 0.0 {
                let gamma = (f1 / f0).ln() / (e1 / e0).ln();
                if (gamma + 1.0).abs() > 1e-9 {
                    f0 * e0 * ((e1 / e0).powf(gamma + 1.0) - 1.0) / (gamma + 1.0)
                } else {
                    f0 * e0 * (e1 / e0).ln()
                }
            } else {
                0.5 * (f0 + f1) * (e1 - e0)
            };
        }
        total
    }

    /// Rows restricted to `k_max`, inserting an interpolated node at the
    /// cut when the grid straddles it.
    fn truncated(&self, k_max: f64) -> Result<Table> {
        let mut rows: Vec<(f64, f64)> = Vec::new();
        for (&e, &f) in self.energies_ev.iter().zip(&self.flux) {
            if e <= k_max {
                rows.push((e, f));
            }
        }
        if rows.len() < 2 {
            return Err(Error::domain(format!(
                "spectrum support lies entirely above the {k_max:e} eV cut"
            )));
        }
        let last = *rows.last().unwrap();
        if last.0 < k_max && k_max < self.support().1 {
            rows.push((k_max, self.evaluate(k_max)));
        }
        Table::new(rows, Path::new("<truncated>"))
    }
}

/// One solar-neutrino production channel.
#[derive(Debug, Clone)]
pub struct NeutrinoComponent {
    /// Channel name: pp, pep, be7, b8, or hep.
    pub name: String,
    /// Line energy or continuum endpoint, eV.
    pub energy_ev: f64,
    /// Total flux carried by this component, cm⁻² s⁻¹.
    pub flux_cm2_s: f64,
    /// None for monochromatic lines; Some(norm) for continua, where norm
    /// is the shape integral ∫ w(E) dE in MeV⁶ units.
    shape_norm_mev6: Option<f64>,
}

/// Parameters describing one neutrino component before construction.
#[derive(Debug, Clone, PartialEq)]
pub struct NeutrinoComponentSpec {
    pub name: String,
    pub kind: NeutrinoKind,
    /// Line energy or continuum endpoint, MeV.
    pub energy_mev: f64,
    /// Total component flux, cm⁻² s⁻¹.
    pub flux_cm2_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeutrinoKind {
    Line,
    Continuum,
}

const ME_MEV: f64 = 0.51099895;

/// Allowed-transition continuum shape w(E) = E²·W·√(W² − mₑ²) with
/// W = (Q + mₑ) − E the positron total energy; E, Q in MeV.
fn beta_shape_mev(e_mev: f64, endpoint_mev: f64) -> f64 {
    if e_mev <= 0.0 || e_mev >= endpoint_mev {
        return 0.0;
    }
    let w = endpoint_mev + ME_MEV - e_mev;
    let p2 = w * w - ME_MEV * ME_MEV;
    if p2 <= 0.0 {
        return 0.0;
    }
    e_mev * e_mev * w * p2.sqrt()
}

/// Fractional half-width of the rectangular bin standing in for a
/// monochromatic line in `evaluate`. Rates treat lines analytically;
/// the bin exists so plots and ingest round-trips see the flux.
pub const LINE_BIN_HALF_WIDTH: f64 = 5e-4;

impl NeutrinoComponent {
    fn from_spec(spec: &NeutrinoComponentSpec) -> Result<Self> {
        const KNOWN: [&str; 5] = ["pp", "pep", "be7", "b8", "hep"];
        let name = match spec.name.as_str() {
            "7Be" => "be7".to_string(),
            "8B" => "b8".to_string(),
            other => other.to_string(),
        };
        if !KNOWN.contains(&name.as_str()) {
            return Err(Error::config(format!(
                "unknown neutrino component '{}' (known: {})",
                spec.name,
                KNOWN.join(", ")
            )));
        }
        if spec.energy_mev <= 0.0 || spec.flux_cm2_s < 0.0 {
            return Err(Error::domain(format!(
                "neutrino component '{}' needs positive energy and nonnegative flux",
                spec.name
            )));
        }
        let shape_norm_mev6 = match spec.kind {
            NeutrinoKind::Line => None,
            NeutrinoKind::Continuum => {
                let q = spec.energy_mev;
                let r = integrate(
                    |e| beta_shape_mev(e, q),
                    0.0,
                    q,
                    &QuadOptions::with_rel_tol(1e-12),
                )?;
                Some(r.value)
            }
        };
        Ok(NeutrinoComponent {
            name,
            energy_ev: spec.energy_mev * 1e6,
            flux_cm2_s: spec.flux_cm2_s,
            shape_norm_mev6,
        })
    }

    /// Whether this is a monochromatic line.
    pub fn is_line(&self) -> bool {
        self.shape_norm_mev6.is_none()
    }

    /// Normalized spectral density dΦ/dK in cm⁻² s⁻¹ eV⁻¹ at kinetic
    /// energy `k_ev`. Lines appear as narrow rectangular bins.
    pub fn evaluate(&self, k_ev: f64) -> f64 {
        match self.shape_norm_mev6 {
            None => {
                let hw = LINE_BIN_HALF_WIDTH * self.energy_ev;
                if (k_ev - self.energy_ev).abs() <= hw {
                    self.flux_cm2_s / (2.0 * hw)
                } else {
                    0.0
                }
            }
            Some(norm) => {
                let pdf_per_mev = beta_shape_mev(k_ev / 1e6, self.energy_ev / 1e6) / norm;
                self.flux_cm2_s * pdf_per_mev / 1e6
            }
        }
    }
}

/// B16-GS98 standard-solar-model component set: pp and pep fusion, ⁷Be
/// electron capture (two lines, 90%/10%), ⁸B and hep decays.
pub fn b16_gs98_components() -> Vec<NeutrinoComponentSpec> {
    let spec = |name: &str, kind, energy_mev, flux_cm2_s| NeutrinoComponentSpec {
        name: name.to_string(),
        kind,
        energy_mev,
        flux_cm2_s,
    };
    vec![
        spec("pp", NeutrinoKind::Continuum, 0.42, 5.98e10),
        spec("pep", NeutrinoKind::Line, 1.442, 1.44e8),
        spec("be7", NeutrinoKind::Line, 0.8613, 0.9 * 4.93e9),
        spec("be7", NeutrinoKind::Line, 0.3843, 0.1 * 4.93e9),
        spec("b8", NeutrinoKind::Continuum, 15.0, 5.46e6),
        spec("hep", NeutrinoKind::Continuum, 18.8, 7.98e3),
    ]
}

impl FluxSpectrum {
    /// The identically-zero spectrum for the given species.
    pub fn zero(species: ParticleSpecies) -> Self {
        FluxSpectrum {
            species,
            label: "zero".into(),
            provenance: Provenance::Analytic("zero"),
            kind: SpectrumKind::Zero,
        }
    }

    /// Spectral number flux dΦ/dK, cm⁻² s⁻¹ eV⁻¹; exactly 0 outside the
    /// support band.
    pub fn evaluate(&self, k_ev: f64) -> f64 {
        match &self.kind {
            SpectrumKind::Zero => 0.0,
            SpectrumKind::Blackbody {
                prefactor,
                kt_ev,
                support,
            } => {
                if k_ev < support.0 || k_ev > support.1 {
                    0.0
                } else {
                    prefactor * k_ev * k_ev / (k_ev / kt_ev).exp_m1()
                }
            }
            SpectrumKind::FlatWind {
                density_per_ev,
                band,
            } => {
                if k_ev < band.0 || k_ev > band.1 {
                    0.0
                } else {
                    density_per_ev * proton_beta(k_ev) * SPEED_OF_LIGHT_M_S * 100.0
                }
            }
            SpectrumKind::CosmicRayLis { band } => {
                if k_ev < band.0 || k_ev > band.1 {
                    0.0
                } else {
                    // per-steradian intensity × 4π, m⁻² → cm⁻², MeV⁻¹ → eV⁻¹
                    lis_intensity_m2_s_sr_mev(k_ev) * 4.0 * std::f64::consts::PI * 1e-4 * 1e-6
                }
            }
            SpectrumKind::Tabulated(t) => t.evaluate(k_ev),
            SpectrumKind::NeutrinoSet(cs) => cs.iter().map(|c| c.evaluate(k_ev)).sum(),
        }
    }

    /// Spectral flux in natural units (eV²) at kinetic energy `k_ev`.
    pub fn evaluate_natural(&self, k_ev: f64) -> f64 {
        self.evaluate(k_ev) * CM2_S_FLUX_TO_EV3
    }

    /// Kinetic-energy support [K_min, K_max] in eV.
    pub fn support(&self) -> (f64, f64) {
        match &self.kind {
            SpectrumKind::Zero => (0.0, 0.0),
            SpectrumKind::Blackbody { support, .. } => *support,
            SpectrumKind::FlatWind { band, .. } | SpectrumKind::CosmicRayLis { band } => *band,
            SpectrumKind::Tabulated(t) => t.support(),
            SpectrumKind::NeutrinoSet(cs) => {
                let hi = cs
                    .iter()
                    .map(|c| c.energy_ev * (1.0 + LINE_BIN_HALF_WIDTH))
                    .fold(0.0, f64::max);
                (0.0, hi)
            }
        }
    }

    /// Neutrino components, when this is a neutrino spectrum.
    pub fn neutrino_components(&self) -> Option<&[NeutrinoComponent]> {
        match &self.kind {
            SpectrumKind::NeutrinoSet(cs) => Some(cs),
            _ => None,
        }
    }

    /// Tabulated node energies when file-backed (quadrature breakpoints).
    pub fn table_nodes(&self) -> Option<&[f64]> {
        match &self.kind {
            SpectrumKind::Tabulated(t) => Some(t.energies()),
            _ => None,
        }
    }

    /// Multiply the spectrum by a constant factor ≥ 0.
    pub fn rescaled(mut self, factor: f64) -> Result<Self> {
        if !(factor >= 0.0) {
            return Err(Error::domain("rescale factor must be nonnegative"));
        }
        match &mut self.kind {
            SpectrumKind::Zero => {}
            SpectrumKind::Blackbody { prefactor, .. } => *prefactor *= factor,
            SpectrumKind::FlatWind { density_per_ev, .. } => *density_per_ev *= factor,
            SpectrumKind::CosmicRayLis { .. } => {
                return Err(Error::config(
                    "the built-in cosmic-ray model has fixed normalization; rescale a tabulated copy instead",
                ))
            }
            SpectrumKind::Tabulated(t) => t.flux.iter_mut().for_each(|f| *f *= factor),
            SpectrumKind::NeutrinoSet(cs) => cs.iter_mut().for_each(|c| c.flux_cm2_s *= factor),
        }
        Ok(self)
    }

    /// Total number flux ∫ (dΦ/dK) dK in cm⁻² s⁻¹ by adaptive quadrature
    /// (monochromatic neutrino lines added analytically).
    pub fn total_flux(&self) -> Result<f64> {
        let opts = QuadOptions::with_rel_tol(1e-9);
        match &self.kind {
            SpectrumKind::Zero => Ok(0.0),
            SpectrumKind::NeutrinoSet(cs) => {
                let mut total = 0.0;
                for c in cs {
                    if c.is_line() {
                        total += c.flux_cm2_s;
                    } else {
                        total += integrate(|k| c.evaluate(k), 0.0, c.energy_ev, &opts)?.value;
                    }
                }
                Ok(total)
            }
            SpectrumKind::Tabulated(t) => {
                let (a, b) = t.support();
                let mut o = opts;
                o.initial_points = t.energies().to_vec();
                Ok(integrate(|k| self.evaluate(k), a, b, &o)?.value)
            }
            _ => {
                let (a, b) = self.support();
                Ok(integrate_auto(|k| self.evaluate(k), a, b, &opts)?.value)
            }
        }
    }

    /// Total number flux by the second, independent route: closed-form
    /// per-cell integration for tabulated spectra, dense trapezoid sums
    /// for analytic models, analytic component totals for neutrinos.
    pub fn total_flux_native(&self) -> f64 {
        match &self.kind {
            SpectrumKind::Zero => 0.0,
            SpectrumKind::Tabulated(t) => t.integral_closed_form(),
            SpectrumKind::NeutrinoSet(cs) => cs.iter().map(|c| c.flux_cm2_s).sum(),
            SpectrumKind::Blackbody { .. } | SpectrumKind::CosmicRayLis { .. } => {
                let (a, b) = self.support();
                log_trapezoid(|k| self.evaluate(k), a, b, 8192)
            }
            SpectrumKind::FlatWind { band, .. } => {
                linear_trapezoid(|k| self.evaluate(k), band.0, band.1, 8192)
            }
        }
    }

    /// Total energy flux ∫ K·(dΦ/dK) dK in W/m².
    pub fn energy_flux_w_m2(&self) -> Result<f64> {
        let opts = QuadOptions::with_rel_tol(1e-9);
        let ev_cm2_to_w_m2 = E_CHARGE_C * 1e4;
        match &self.kind {
            SpectrumKind::Zero => Ok(0.0),
            SpectrumKind::NeutrinoSet(cs) => {
                let mut total = 0.0;
                for c in cs {
                    if c.is_line() {
                        total += c.flux_cm2_s * c.energy_ev;
                    } else {
                        total += integrate(|k| k * c.evaluate(k), 0.0, c.energy_ev, &opts)?.value;
                    }
                }
                Ok(total * ev_cm2_to_w_m2)
            }
            SpectrumKind::Tabulated(t) => {
                let (a, b) = t.support();
                let mut o = opts;
                o.initial_points = t.energies().to_vec();
                Ok(integrate(|k| k * self.evaluate(k), a, b, &o)?.value * ev_cm2_to_w_m2)
            }
            _ => {
                let (a, b) = self.support();
                Ok(integrate_auto(|k| k * self.evaluate(k), a, b, &opts)?.value * ev_cm2_to_w_m2)
            }
        }
    }

    /// Mean particle energy ⟨K⟩ in eV (energy flux / number flux).
    pub fn mean_energy_ev(&self) -> Result<f64> {
        let number = self.total_flux()?;
        if number <= 0.0 {
            return Err(Error::domain("mean energy of an empty spectrum"));
        }
        let energy_ev_cm2 = self.energy_flux_w_m2()? / (E_CHARGE_C * 1e4);
        Ok(energy_ev_cm2 / number)
    }
}

/// Proton speed β = p/ω at kinetic energy K (eV).
fn proton_beta(k_ev: f64) -> f64 {
    (k_ev * (k_ev + 2.0 * M_PROTON_EV)).sqrt() / (M_PROTON_EV + k_ev)
}

/// Local-interstellar-spectrum proton intensity j(T) in
/// m⁻² s⁻¹ sr⁻¹ MeV⁻¹ as a function of kinetic energy (eV): the
/// Voyager-anchored parameterization
/// j = 2.70 · T^1.12 / β² · ((T^1.03 + 0.67^1.03)/(1 + 0.67^1.03))^−3.815
/// with T the kinetic energy in GeV (Vos & Potgieter 2015 form).
fn lis_intensity_m2_s_sr_mev(k_ev: f64) -> f64 {
    let t_gev = k_ev / 1e9;
    let beta2 = k_ev * (k_ev + 2.0 * M_PROTON_EV) / (M_PROTON_EV + k_ev).powi(2);
    let c = 0.67f64.powf(1.03);
    2.70 * t_gev.powf(1.12) / beta2 * ((t_gev.powf(1.03) + c) / (1.0 + c)).powf(-3.815)
}

/// Source selector for the solar-photon spectrum.
#[derive(Debug, Clone)]
pub enum PhotonSource {
    /// Planck spectrum at the given effective temperature (K).
    Blackbody { temperature_k: f64 },
    /// Zero-air-mass irradiance table in (µm, W m⁻² µm⁻¹).
    TabulatedFile(PathBuf),
}

/// Solar photon number spectrum with total energy flux renormalized to
/// the solar constant (1366.1 W/m²) to 10⁻⁶ relative.
pub fn solar_photon_spectrum(source: PhotonSource) -> Result<FluxSpectrum> {
    match source {
        PhotonSource::Blackbody { temperature_k } => {
            if temperature_k <= 0.0 {
                return Err(Error::domain("blackbody temperature must be positive"));
            }
            let kt = KB_EV_PER_K * temperature_k;
            // A·∫ K³/(e^{K/kT}−1) dK = solar constant over the full
            // half-line: A = S / (kT⁴ π⁴/15) in natural units, then
            // converted to cm⁻² s⁻¹ eV⁻³ file units.
            let a_natural = SOLAR_CONSTANT_W_M2 * W_M2_TO_EV4
                / (kt.powi(4) * std::f64::consts::PI.powi(4) / 15.0);
            Ok(FluxSpectrum {
                species: ParticleSpecies::photon(),
                label: "solar-photons-blackbody".into(),
                provenance: Provenance::Analytic("blackbody-5772K"),
                kind: SpectrumKind::Blackbody {
                    prefactor: a_natural / CM2_S_FLUX_TO_EV3,
                    kt_ev: kt,
                    support: PHOTON_SUPPORT_EV,
                },
            })
        }
        PhotonSource::TabulatedFile(path) => {
            let spectrum = load_tabulated_spectrum(&path, ParticleSpecies::photon())?;
            let flux = spectrum.energy_flux_w_m2()?;
            if flux <= 0.0 {
                return Err(Error::domain(format!(
                    "irradiance table {} integrates to zero",
                    path.display()
                )));
            }
            spectrum.rescaled(SOLAR_CONSTANT_W_M2 / flux)
        }
    }
}

/// Solar-wind proton spectrum: dn/dK constant over `band_ev`, normalized
/// to total density `n_cm3`; flux follows as (dn/dK)·v(K).
pub fn solar_wind_spectrum(n_cm3: f64, band_ev: (f64, f64)) -> Result<FluxSpectrum> {
    if n_cm3 <= 0.0 {
        return Err(Error::domain("wind density must be positive"));
    }
    if !(band_ev.0 > 0.0 && band_ev.1 > band_ev.0) {
        return Err(Error::domain(format!(
            "wind band needs 0 < K_min < K_max, got [{}, {}] eV",
            band_ev.0, band_ev.1
        )));
    }
    Ok(FluxSpectrum {
        species: ParticleSpecies::proton(),
        label: "solar-wind".into(),
        provenance: Provenance::Analytic("flat-wind"),
        kind: SpectrumKind::FlatWind {
            density_per_ev: n_cm3 / (band_ev.1 - band_ev.0),
            band: band_ev,
        },
    })
}

/// Source selector for the galactic cosmic-ray proton spectrum.
#[derive(Debug, Clone)]
pub enum CosmicRaySource {
    /// Built-in Voyager-anchored local-interstellar-spectrum fit.
    BuiltinLis,
    /// Tabulated intensity or flux file.
    TabulatedFile(PathBuf),
}

/// Galactic cosmic-ray proton spectrum, truncated at `cutoff_ev`
/// (default [`COSMIC_RAY_CUTOFF_EV`] = 100 GeV).
pub fn cosmic_ray_spectrum(source: CosmicRaySource, cutoff_ev: f64) -> Result<FluxSpectrum> {
    if cutoff_ev <= COSMIC_RAY_FLOOR_EV {
        return Err(Error::domain("cosmic-ray cutoff below the spectrum floor"));
    }
    match source {
        CosmicRaySource::BuiltinLis => Ok(FluxSpectrum {
            species: ParticleSpecies::proton(),
            label: "cosmic-rays-lis".into(),
            provenance: Provenance::Analytic("lis-fit"),
            kind: SpectrumKind::CosmicRayLis {
                band: (COSMIC_RAY_FLOOR_EV, cutoff_ev),
            },
        }),
        CosmicRaySource::TabulatedFile(path) => {
            let spectrum = load_tabulated_spectrum(&path, ParticleSpecies::proton())?;
            let table = match spectrum.kind {
                SpectrumKind::Tabulated(t) => t.truncated(cutoff_ev)?,
                _ => unreachable!("loader always yields a table"),
            };
            Ok(FluxSpectrum {
                kind: SpectrumKind::Tabulated(table),
                label: "cosmic-rays-table".into(),
                ..spectrum
            })
        }
    }
}

/// Summed solar-neutrino spectrum from the given component set; an empty
/// set yields the zero spectrum.
pub fn solar_neutrino_spectrum(components: &[NeutrinoComponentSpec]) -> Result<FluxSpectrum> {
    if components.is_empty() {
        return Ok(FluxSpectrum::zero(ParticleSpecies::neutrino()));
    }
    let built: Vec<NeutrinoComponent> = components
        .iter()
        .map(NeutrinoComponent::from_spec)
        .collect::<Result<_>>()?;
    Ok(FluxSpectrum {
        species: ParticleSpecies::neutrino(),
        label: "solar-neutrinos".into(),
        provenance: Provenance::Analytic("b16-gs98"),
        kind: SpectrumKind::NeutrinoSet(built),
    })
}

// ---------------------------------------------------------------------
// Tabulated-file loader
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
enum Abscissa {
    /// Energy column; factor to eV.
    EnergyEv(f64),
    /// Wavelength column; factor to nm.
    WavelengthNm(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Ordinate {
    /// Spectral number flux; factor to cm⁻² s⁻¹ eV⁻¹ (includes 4π when
    /// the declared unit is per-steradian).
    NumberFlux(f64),
    /// Spectral irradiance W m⁻² µm⁻¹ (wavelength abscissa only).
    IrradiancePerMicron,
}

fn unit_error(path: &Path, unit: &str) -> Error {
    Error::Unit {
        path: path.to_path_buf(),
        unit: unit.to_string(),
    }
}

/// Extract `name[unit]` → unit string.
fn bracket_unit<'a>(field: &'a str, path: &Path) -> Result<&'a str> {
    let open = field.find('[');
    let close = field.rfind(']');
    match (open, close) {
        (Some(i), Some(j)) if j > i => Ok(field[i + 1..j].trim()),
        _ => Err(unit_error(path, field.trim())),
    }
}

fn parse_abscissa_unit(unit: &str, path: &Path) -> Result<Abscissa> {
    match unit {
        "eV" => Ok(Abscissa::EnergyEv(1.0)),
        "keV" => Ok(Abscissa::EnergyEv(1e3)),
        "MeV" => Ok(Abscissa::EnergyEv(1e6)),
        "GeV" => Ok(Abscissa::EnergyEv(1e9)),
        "nm" => Ok(Abscissa::WavelengthNm(1.0)),
        "um" | "µm" => Ok(Abscissa::WavelengthNm(1e3)),
        other => Err(unit_error(path, other)),
    }
}

fn parse_ordinate_unit(unit: &str, path: &Path) -> Result<Ordinate> {
    let compact: String = unit.split_whitespace().collect::<Vec<_>>().join(" ");
    if compact == "W/(m^2 um)" || compact == "W/(m^2 µm)" {
        return Ok(Ordinate::IrradiancePerMicron);
    }
    let inner = compact
        .strip_prefix("1/(")
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| unit_error(path, unit))?;
    let (mut area, mut time, mut steradian, mut energy) = (None, false, false, None);
    for token in inner.split_whitespace() {
        match token {
            "cm^2" if area.is_none() => area = Some(1.0),
            "m^2" if area.is_none() => area = Some(1e-4),
            "s" if !time => time = true,
            "sr" if !steradian => steradian = true,
            "eV" if energy.is_none() => energy = Some(1.0),
            "keV" if energy.is_none() => energy = Some(1e-3),
            "MeV" if energy.is_none() => energy = Some(1e-6),
            "GeV" if energy.is_none() => energy = Some(1e-9),
            _ => return Err(unit_error(path, unit)),
        }
    }
    match (area, time, energy) {
        (Some(a), true, Some(e)) => {
            let sr = if steradian {
                4.0 * std::f64::consts::PI
            } else {
                1.0
            };
            Ok(Ordinate::NumberFlux(a * sr * e))
        }
        _ => Err(unit_error(path, unit)),
    }
}

/// Load a two-column spectral file: '#' comments, a header row declaring
/// column names and units (e.g. `K[MeV], flux[1/(m^2 s sr MeV)]` or
/// `lambda[um], irradiance[W/(m^2 um)]`), then numeric rows. Returns the
/// spectrum converted to (eV, cm⁻² s⁻¹ eV⁻¹).
pub fn load_tabulated_spectrum(path: &Path, species: ParticleSpecies) -> Result<FluxSpectrum> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::MissingData(path.to_path_buf())
        } else {
            Error::Io(e)
        }
    })?;
    let mut header: Option<(Abscissa, Ordinate)> = None;
    let mut rows: Vec<(f64, f64)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = if line.contains(',') {
            line.split(',').collect()
        } else {
            line.split_whitespace().collect()
        };
        if fields.len() != 2 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno,
                msg: format!("expected 2 columns, found {}", fields.len()),
            });
        }
        if header.is_none() {
            let a = parse_abscissa_unit(bracket_unit(fields[0], path)?, path)?;
            let o = parse_ordinate_unit(bracket_unit(fields[1], path)?, path)?;
            match (a, o) {
                (Abscissa::WavelengthNm(_), Ordinate::NumberFlux(_))
                | (Abscissa::EnergyEv(_), Ordinate::IrradiancePerMicron) => {
                    return Err(unit_error(path, "mismatched abscissa/ordinate units"))
                }
                _ => {}
            }
            header = Some((a, o));
            continue;
        }
        let (abscissa, ordinate) = header.unwrap();
        let parse_num = |s: &str, what: &str| -> Result<f64> {
            s.trim().parse::<f64>().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: lineno,
                msg: format!("cannot parse {what} '{}'", s.trim()),
            })
        };
        let x = parse_num(fields[0], "abscissa")?;
        let y = parse_num(fields[1], "value")?;
        if !(x > 0.0) {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno,
                msg: format!("non-positive abscissa {x}"),
            });
        }
        if !y.is_finite() || y < 0.0 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno,
                msg: format!("non-finite or negative value {y}"),
            });
        }
        let row = match (abscissa, ordinate) {
            (Abscissa::EnergyEv(scale), Ordinate::NumberFlux(f)) => (x * scale, y * f),
            (Abscissa::WavelengthNm(to_nm), Ordinate::IrradiancePerMicron) => {
                let lambda_nm = x * to_nm;
                let energy_ev = HC_EV_NM / lambda_nm;
                // dΦ/dE = I_λ λ³/(hc)² per photon energy, → cm⁻².
                let lambda_um = lambda_nm * 1e-3;
                let hc_ev_um = HC_EV_NM * 1e-3;
                let flux = y * lambda_um.powi(3) / (hc_ev_um * hc_ev_um) / E_CHARGE_C * 1e-4;
                (energy_ev, flux)
            }
            _ => unreachable!("header validation rejects mixed conventions"),
        };
        rows.push(row);
    }
    if header.is_none() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            msg: "empty file: no header row".into(),
        });
    }
    let table = Table::new(rows, path)?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "table".into());
    Ok(FluxSpectrum {
        species,
        label,
        provenance: Provenance::File(path.to_path_buf()),
        kind: SpectrumKind::Tabulated(table),
    })
}

fn log_trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let la = a.ln();
    let step = (b.ln() - la) / n as f64;
    let mut sum = 0.0;
    let mut x_prev = a;
    let mut g_prev = f(a) * a;
    for i in 1..=n {
        let x = (la + step * i as f64).exp();
        let g = f(x) * x;
        sum += 0.5 * (g_prev + g) * step;
        g_prev = g;
        x_prev = x;
    }
    let _ = x_prev;
    sum
}

fn linear_trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let step = (b - a) / n as f64;
    let mut sum = 0.0;
    let mut g_prev = f(a);
    for i in 1..=n {
        let g = f(a + step * i as f64);
        sum += 0.5 * (g_prev + g) * step;
        g_prev = g;
    }
    sum
}
