//! Spatial response of the cloud: form factors, the which-path
//! decoherence factor, and the coherent-enhancement structure function
//! S(q) for each scattering basis.
//!
//! Conventions: all momentum transfers `q` in eV, all lengths converted
//! to eV⁻¹ before forming the dimensionless arguments q·r.

use crate::constants::{HELM_RN_COEFF_FM, HELM_SKIN_FM, M_PER_INV_EV};

/// sinc(x) = sin(x)/x with the removable singularity filled in and a
/// series branch for small |x| (1 − x²/6 + x⁴/120) to avoid cancellation.
pub fn sinc(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Which-path suppression factor 1 − sinc(qΔx), evaluated as the series
/// x²/6 − x⁴/120 for small arguments. Zero exactly at x = 0 (no spatial
/// superposition ⇒ no information), → 1 for qΔx ≫ 1, and peaks at
/// ≈ 1.217 near x ≈ 4.493.
pub fn decoherence_factor(q_dx: f64) -> f64 {
    let ax = q_dx.abs();
    if ax < 1e-4 {
        let x2 = q_dx * q_dx;
        x2 / 6.0 - x2 * x2 / 120.0
    } else {
        1.0 - q_dx.sin() / q_dx
    }
}

/// Uniform-sphere form factor F(x) = 3 j₁(x)/x = 3(sin x − x cos x)/x³
/// at x = q·r; normalized to F(0) = 1, first zero at x ≈ 4.493.
/// Small-|x| series: 1 − x²/10 + x⁴/280.
pub fn uniform_sphere_ff(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1e-3 {
        let x2 = x * x;
        1.0 - x2 / 10.0 + x2 * x2 / 280.0
    } else {
        3.0 * (x.sin() - x * x.cos()) / (x * x * x)
    }
}

/// Zeros of j₁ (equivalently of the uniform-sphere form factor), used to
/// seed quadrature breakpoints on nuclear- and cloud-scale integrands.
pub const UNIFORM_SPHERE_FF_ZEROS: [f64; 5] = [
    4.493409457909063,
    7.725251836937707,
    10.904121659428899,
    14.066193912831473,
    17.220755271930773,
];

/// Nuclear (Helm) form-factor parameters for nucleon number A:
/// box radius r_N = 1.14 A^{1/3} fm, surface thickness s = 0.9 fm,
/// both returned in eV⁻¹.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormFactorParams {
    /// Nuclear box radius, eV⁻¹.
    pub r_n_inv_ev: f64,
    /// Surface (skin) thickness, eV⁻¹.
    pub skin_inv_ev: f64,
}

impl FormFactorParams {
    /// Helm parameters for a nucleus with `a` nucleons.
    pub fn helm(a: f64) -> Self {
        let fm = 1e-15 / M_PER_INV_EV; // one femtometre in eV⁻¹
        FormFactorParams {
            r_n_inv_ev: HELM_RN_COEFF_FM * a.cbrt() * fm,
            skin_inv_ev: HELM_SKIN_FM * fm,
        }
    }
}

/// Helm nuclear form factor F_N(q) = 3 j₁(q r_N)/(q r_N) · e^{−q²s²/2}.
pub fn helm_ff(q: f64, params: FormFactorParams) -> f64 {
    let x = q * params.r_n_inv_ev;
    let gauss = (-0.5 * (q * params.skin_inv_ev).powi(2)).exp();
    uniform_sphere_ff(x) * gauss
}

/// Whether the cloud responds as independent atoms or as one coherent
/// matter distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureMode {
    /// Dilute cold-atom cloud: every atom scatters independently.
    ColdAtom,
    /// Solid / dense cloud: amplitudes add across the whole sphere.
    MatterCoherent,
}

/// Which constituents of the cloud the probe couples to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureBasis {
    /// Whole atoms (polarizability coupling; photons and low-q charges).
    Atoms,
    /// Individual protons inside nuclei (high-q charged probes).
    Protons,
    /// Coherent neutron count (neutrino neutral-current coupling).
    Neutrons,
}

/// Count weighting the nuclear-coherent term of the proton basis.
///
/// Matching the reference high-momentum rate tables requires the full
/// nucleon number A; the proton-only variant Z is kept selectable for
/// sensitivity studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoherentNucleonCount {
    /// Weight the nuclear-coherent term by A (default).
    #[default]
    NucleonNumber,
    /// Weight the nuclear-coherent term by Z.
    ProtonNumber,
}

/// Everything the structure function needs to know about the cloud.
#[derive(Debug, Clone, Copy)]
pub struct StructureParams {
    /// Number of atoms / molecular units in one cloud.
    pub n_units: f64,
    /// Nucleon number A per unit.
    pub a: f64,
    /// Proton number Z per unit.
    pub z: f64,
    /// Cloud radius in eV⁻¹.
    pub r_cloud_inv_ev: f64,
    /// Helm parameters for the unit's nucleus.
    pub nuclear: FormFactorParams,
    /// Atom-coherent vs. matter-coherent response.
    pub mode: StructureMode,
    /// Weighting of the nuclear-coherent proton-basis term.
    pub coherent_count: CoherentNucleonCount,
}

/// Structure function S(q) in the given basis (dimensionless, ≥ 0).
///
/// * `Atoms`: N · (1 + N F_cloud²(q r_c)) when matter-coherent, N for a
///   cold-atom cloud (cross-atom coherence washed out by atomic motion).
/// * `Protons`: N·Z · (1 + C F_nuc²(q)) with C = A or Z per
///   `coherent_count`; the cloud-scale term is always washed out at the
///   momentum transfers where this basis applies.
/// * `Neutrons`: N (A−Z)² (F_nuc²(q) + N F_cloud²(q r_c)) when
///   matter-coherent, dropping the cloud term for cold atoms.
pub fn structure_function(q: f64, basis: StructureBasis, p: &StructureParams) -> f64 {
    let n = p.n_units;
    let cloud2 = || {
        let f = uniform_sphere_ff(q * p.r_cloud_inv_ev);
        f * f
    };
    match basis {
        StructureBasis::Atoms => match p.mode {
            StructureMode::MatterCoherent => n * (1.0 + n * cloud2()),
            StructureMode::ColdAtom => n,
        },
        StructureBasis::Protons => {
            let fnuc = helm_ff(q, p.nuclear);
            let count = match p.coherent_count {
                CoherentNucleonCount::NucleonNumber => p.a,
                CoherentNucleonCount::ProtonNumber => p.z,
            };
            n * p.z * (1.0 + count * fnuc * fnuc)
        }
        StructureBasis::Neutrons => {
            let fnuc = helm_ff(q, p.nuclear);
            let neutrons = p.a - p.z;
            let mut s = fnuc * fnuc;
            if p.mode == StructureMode::MatterCoherent {
                s += n * cloud2();
            }
            n * neutrons * neutrons * s
        }
    }
}
