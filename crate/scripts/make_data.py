#!/usr/bin/env python3
"""Regenerate the canonical data files shipped in data/.

Each file is produced from a published, citable model so the repository
carries no opaque binary blobs:

* solar_irradiance_zero_airmass.csv — zero-air-mass solar spectral
  irradiance sampled from a 5772 K Planck spectrum diluted to 1 AU
  (compiled reference spectra agree with this to within a few percent;
  the loader renormalizes the total to the solar constant anyway).
* cosmic_ray_protons_lis.csv — local-interstellar proton spectrum from
  the Vos & Potgieter (2015) fit anchored to Voyager data.  The table
  extends to 1 TeV, past the default 100 GeV analysis cutoff, so cutoff
  sensitivity can be probed.
* zodiacal_dust_grun.csv — interplanetary dust number density per
  log₁₀-mass decade from the Grün et al. (1985) interplanetary flux
  model, converted with n(>m) = 4F(>m)/v₀ at v₀ = 20 km/s.
* solar_neutrinos_normalizations.csv — B16-GS98 standard-solar-model
  component fluxes.

Usage: python3 scripts/make_data.py [out_dir]   (default: data/)
"""

import math
import sys
from pathlib import Path

H_J_S = 6.62607015e-34
C_M_S = 2.99792458e8
KB_J_K = 1.380649e-23
T_SUN_K = 5772.0
R_SUN_M = 6.957e8
AU_M = 1.495978707e11
M_PROTON_MEV = 938.27208816


def planck_irradiance_w_m2_um(lambda_um: float) -> float:
    """Spectral irradiance at 1 AU of a 5772 K blackbody sun, W/(m^2 um)."""
    lam = lambda_um * 1e-6
    x = H_J_S * C_M_S / (lam * KB_J_K * T_SUN_K)
    if x > 700.0:
        return 0.0
    radiance = 2.0 * math.pi * H_J_S * C_M_S**2 / lam**5 / math.expm1(x)
    dilution = (R_SUN_M / AU_M) ** 2
    return radiance * dilution * 1e-6  # per metre -> per micron


def lis_intensity_m2_s_sr_mev(k_mev: float) -> float:
    """Vos & Potgieter (2015) LIS proton intensity, 1/(m^2 s sr MeV)."""
    t_gev = k_mev * 1e-3
    beta2 = k_mev * (k_mev + 2.0 * M_PROTON_MEV) / (k_mev + M_PROTON_MEV) ** 2
    c = 0.67**1.03
    return 2.70 * t_gev**1.12 / beta2 * ((t_gev**1.03 + c) / (1.0 + c)) ** (-3.815)


def grun_neg_dflux_dm(m: float) -> float:
    """-dF/dm of the Grün (1985) cumulative flux, 1/(m^2 s g)."""
    t1 = 4.38 * (2.2e3 * m**0.306 + 15.0) ** (-5.38) * 2.2e3 * 0.306 * m ** (-0.694)
    u2 = m + 1e11 * m * m + 1e27 * m**4
    t2 = 0.36 * 1.3e-9 * u2 ** (-1.36) * (1.0 + 2e11 * m + 4e27 * m**3)
    u3 = m + 1e6 * m * m
    t3 = 0.85 * 1.3e-16 * u3 ** (-1.85) * (1.0 + 2e6 * m)
    return t1 + t2 + t3


def grun_dndlogm_cm3(log10_m: float, v0_km_s: float = 20.0) -> float:
    m = 10.0**log10_m
    v0_m_s = v0_km_s * 1e3
    return math.log(10.0) * m * 4.0 * grun_neg_dflux_dm(m) / v0_m_s * 1e-6


def log_grid(lo: float, hi: float, n: int):
    ratio = hi / lo
    return [lo * ratio ** (i / (n - 1)) for i in range(n)]


def write_solar_irradiance(path: Path) -> None:
    lines = [
        "# Zero-air-mass solar spectral irradiance at 1 AU.",
        "# Sampled from a 5772 K Planck spectrum diluted by (R_sun/1 AU)^2;",
        "# the loader renormalizes the integral to the solar constant.",
        "lambda[um], irradiance[W/(m^2 um)]",
    ]
    for lam in log_grid(0.08, 62.0, 160):
        lines.append(f"{lam:.6e}, {planck_irradiance_w_m2_um(lam):.6e}")
    path.write_text("\n".join(lines) + "\n")


def write_cosmic_rays(path: Path) -> None:
    lines = [
        "# Local-interstellar galactic cosmic-ray proton spectrum,",
        "# Vos & Potgieter (2015) fit anchored to Voyager measurements.",
        "# Extends to 1 TeV so analysis cutoffs can be varied.",
        "K[MeV], intensity[1/(m^2 s sr MeV)]",
    ]
    for k in log_grid(1.0, 1.0e6, 73):
        lines.append(f"{k:.6e}, {lis_intensity_m2_s_sr_mev(k):.6e}")
    path.write_text("\n".join(lines) + "\n")


def write_dust(path: Path) -> None:
    lines = [
        "# Interplanetary dust number density per log10-mass decade at 1 AU,",
        "# from the Gruen et al. (1985) cumulative flux via n(>m) = 4F/v0,",
        "# v0 = 20 km/s.  Support extends below the standard 1e-8 g floor:",
        "# mass-support: extended",
        "log10m[g], dndlogm[1/cm^3]",
    ]
    for i in range(37):
        log10_m = -18.0 + 0.5 * i
        lines.append(f"{log10_m:.1f}, {grun_dndlogm_cm3(log10_m):.6e}")
    path.write_text("\n".join(lines) + "\n")


def write_neutrinos(path: Path) -> None:
    rows = [
        ("pp", "continuum", 0.42, 5.98e10),
        ("pep", "line", 1.442, 1.44e8),
        ("be7", "line", 0.8613, 0.9 * 4.93e9),
        ("be7", "line", 0.3843, 0.1 * 4.93e9),
        ("b8", "continuum", 15.0, 5.46e6),
        ("hep", "continuum", 18.8, 7.98e3),
    ]
    lines = [
        "# Solar-neutrino component normalizations, B16-GS98 standard solar",
        "# model.  Continuum rows give the spectrum endpoint energy; the",
        "# 7Be doublet is split 90/10 between its two lines.",
        "component, kind, energy[MeV], flux[1/(cm^2 s)]",
    ]
    for name, kind, e_mev, flux in rows:
        lines.append(f"{name}, {kind}, {e_mev}, {flux:.6e}")
    path.write_text("\n".join(lines) + "\n")


def main() -> None:
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data"
    out_dir.mkdir(parents=True, exist_ok=True)
    write_solar_irradiance(out_dir / "solar_irradiance_zero_airmass.csv")
    write_cosmic_rays(out_dir / "cosmic_ray_protons_lis.csv")
    write_dust(out_dir / "zodiacal_dust_grun.csv")
    write_neutrinos(out_dir / "solar_neutrinos_normalizations.csv")
    for name in sorted(p.name for p in out_dir.glob("*.csv")):
        print(f"wrote {out_dir / name}")


if __name__ == "__main__":
    main()
