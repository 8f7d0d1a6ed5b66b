//! Interplanetary (zodiacal) dust: grain mass distribution at 1 AU and
//! the kinematic helpers (grain radius from mass, heliocentric speed).
//!
//! The built-in model is the Grün et al. (1985) interplanetary flux
//! F(m) of grains with mass > m onto a flat plate, converted to a
//! spatial density per log-mass decade via n(>m) = 4 F(m)/v₀ for an
//! isotropic population moving at v₀.

use std::path::Path;

use crate::error::{Error, Result};
use crate::spectra::Provenance;

/// Default grain material density, g/cm³.
pub const DUST_DENSITY_G_CM3: f64 = 3.0;

/// Reference dust speed at the reference radius, km/s.
pub const DUST_V0_KM_S: f64 = 20.0;

/// Reference heliocentric radius, AU.
pub const DUST_R0_AU: f64 = 1.0;

/// Standard mass support of published interplanetary-flux tables, grams.
pub const DUST_STANDARD_SUPPORT_G: (f64, f64) = (1e-8, 1.0);

/// Extended lower mass limit of the built-in model, grams. The published
/// flux formula remains finite and integrable down here, and the
/// smallest-grain tail dominates collision *rates* on µm-scale clouds
/// even though it carries almost no mass.
pub const DUST_EXTENDED_FLOOR_G: f64 = 1e-18;

/// Directive a dust data file must carry to be accepted with support
/// outside [`DUST_STANDARD_SUPPORT_G`].
pub const DUST_EXTENDED_DIRECTIVE: &str = "mass-support: extended";

/// Spatial number density of dust grains per log₁₀-mass decade at 1 AU.
#[derive(Debug, Clone)]
pub struct DustDistribution {
    /// Mass support [m_min, m_max] in grams.
    pub mass_support_g: (f64, f64),
    /// Grain material density, g/cm³.
    pub material_density_g_cm3: f64,
    /// Reference speed at `r0_au`, km/s.
    pub v0_km_s: f64,
    /// Reference heliocentric radius, AU.
    pub r0_au: f64,
    /// Analytic model or data file.
    pub provenance: Provenance,
    kind: DustKind,
}

#[derive(Debug, Clone)]
enum DustKind {
    GrunAnalytic,
    Tabulated {
        log10_m: Vec<f64>,
        dndlogm_cm3: Vec<f64>,
    },
}

/// Grün (1985) cumulative interplanetary flux F(m) in m⁻² s⁻¹ of grains
/// with mass greater than `m_g` grams.
pub fn grun_cumulative_flux_m2_s(m_g: f64) -> f64 {
    let m = m_g;
    let g1 = (2.2e3 * m.powf(0.306) + 15.0).powf(-4.38);
    let g2 = 1.3e-9 * (m + 1e11 * m * m + 1e27 * m.powi(4)).powf(-0.36);
    let g3 = 1.3e-16 * (m + 1e6 * m * m).powf(-0.85);
    g1 + g2 + g3
}

/// −dF/dm for the Grün flux (positive; F is strictly decreasing), in
/// m⁻² s⁻¹ g⁻¹.
fn grun_neg_dflux_dm(m: f64) -> f64 {
    let t1 = 4.38 * (2.2e3 * m.powf(0.306) + 15.0).powf(-5.38) * 2.2e3 * 0.306 * m.powf(-0.694);
    let u2 = m + 1e11 * m * m + 1e27 * m.powi(4);
    let t2 = 0.36 * 1.3e-9 * u2.powf(-1.36) * (1.0 + 2e11 * m + 4e27 * m.powi(3));
    let u3 = m + 1e6 * m * m;
    let t3 = 0.85 * 1.3e-16 * u3.powf(-1.85) * (1.0 + 2e6 * m);
    t1 + t2 + t3
}

impl DustDistribution {
    /// Built-in Grün model over the extended support
    /// [[`DUST_EXTENDED_FLOOR_G`], 1] g.
    pub fn builtin_grun() -> Self {
        DustDistribution {
            mass_support_g: (DUST_EXTENDED_FLOOR_G, DUST_STANDARD_SUPPORT_G.1),
            material_density_g_cm3: DUST_DENSITY_G_CM3,
            v0_km_s: DUST_V0_KM_S,
            r0_au: DUST_R0_AU,
            provenance: Provenance::Analytic("grun-1985"),
            kind: DustKind::GrunAnalytic,
        }
    }

    /// dn/dlog₁₀m in cm⁻³ per decade at `log10_m` (mass in grams);
    /// exactly 0 outside the mass support.
    pub fn evaluate_dndlogm(&self, log10_m: f64) -> f64 {
        let m = 10f64.powf(log10_m);
        if m < self.mass_support_g.0 || m > self.mass_support_g.1 {
            return 0.0;
        }
        match &self.kind {
            DustKind::GrunAnalytic => {
                // n(>m) = 4F/v₀ (m⁻³ with v₀ in m/s), so
                // dn/dlog₁₀m = ln10 · m · 4(−dF/dm)/v₀, then m⁻³ → cm⁻³.
                let v0_m_s = self.v0_km_s * 1e3;
                std::f64::consts::LN_10 * m * 4.0 * grun_neg_dflux_dm(m) / v0_m_s * 1e-6
            }
            DustKind::Tabulated {
                log10_m: xs,
                dndlogm_cm3: ys,
            } => {
                let l = log10_m;
                if l < xs[0] || l > *xs.last().unwrap() {
                    return 0.0;
                }
                let i = match xs.binary_search_by(|v| v.total_cmp(&l)) {
                    Ok(i) => return ys[i],
                    Err(i) => i - 1,
                };
                let (x0, x1, y0, y1) = (xs[i], xs[i + 1], ys[i], ys[i + 1]);
                if y0 > 0.0 && y1 > 0.0 {
                    // log-linear in the already-logarithmic abscissa
                    (y0.ln() + (y1 / y0).ln() * (l - x0) / (x1 - x0)).exp()
                } else {
                    (y0 + (y1 - y0) * (l - x0) / (x1 - x0)).max(0.0)
                }
            }
        }
    }

    /// Grain radius a(m) = (3m/4πρ)^{1/3} in cm for mass in grams.
    pub fn grain_radius_cm(&self, m_g: f64) -> f64 {
        (3.0 * m_g / (4.0 * std::f64::consts::PI * self.material_density_g_cm3)).cbrt()
    }

    /// Dust speed v(r) = v₀ √(r/r₀) in km/s at heliocentric radius `r_au`.
    pub fn v_dust_km_s(&self, r_au: f64) -> f64 {
        self.v0_km_s * (r_au / self.r0_au).sqrt()
    }

    /// Load a dust table: CSV of (log₁₀ m [g], dn/dlog m [cm⁻³]) with
    /// '#' comments. Support outside [10⁻⁸, 1] g is rejected unless the
    /// file carries the `# mass-support: extended` directive or
    /// `allow_extended` is set.
    pub fn from_file(path: &Path, allow_extended: bool) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                Error::MissingData(path.to_path_buf())
            } else {
                Error::Io(e)
            }
        })?;
        let mut extended = allow_extended;
        let mut header_seen = false;
        let mut rows: Vec<(f64, f64)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if comment.trim() == DUST_EXTENDED_DIRECTIVE {
                    extended = true;
                }
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
            if !header_seen {
                let a = fields[0].trim();
                let o = fields[1].trim();
                if a != "log10m[g]" {
                    return Err(Error::Unit {
                        path: path.to_path_buf(),
                        unit: a.to_string(),
                    });
                }
                if o != "dndlogm[1/cm^3]" {
                    return Err(Error::Unit {
                        path: path.to_path_buf(),
                        unit: o.to_string(),
                    });
                }
                header_seen = true;
                continue;
            }
            let parse_num = |s: &str| -> Result<f64> {
                s.trim().parse::<f64>().map_err(|_| Error::Parse {
                    path: path.to_path_buf(),
                    line: lineno,
                    msg: format!("cannot parse number '{}'", s.trim()),
                })
            };
            let x = parse_num(fields[0])?;
            let y = parse_num(fields[1])?;
            if !x.is_finite() || !y.is_finite() || y < 0.0 {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: lineno,
                    msg: "non-finite or negative entry".into(),
                });
            }
            rows.push((x, y));
        }
        if !header_seen || rows.len() < 2 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: 0,
                msg: "need a header and at least 2 data rows".into(),
            });
        }
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in rows.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: 0,
                    msg: format!("duplicate log10m abscissa {}", w[0].0),
                });
            }
        }
        let support = (10f64.powf(rows[0].0), 10f64.powf(rows.last().unwrap().0));
        if !extended
            && (support.0 < DUST_STANDARD_SUPPORT_G.0 * (1.0 - 1e-9)
                || support.1 > DUST_STANDARD_SUPPORT_G.1 * (1.0 + 1e-9))
        {
            return Err(Error::config(format!(
                "dust table support [{:e}, {:e}] g outside the standard [1e-8, 1] g; \
                 add the '# {}' directive or pass the override flag",
                support.0, support.1, DUST_EXTENDED_DIRECTIVE
            )));
        }
        Ok(DustDistribution {
            mass_support_g: support,
            material_density_g_cm3: DUST_DENSITY_G_CM3,
            v0_km_s: DUST_V0_KM_S,
            r0_au: DUST_R0_AU,
            provenance: Provenance::File(path.to_path_buf()),
            kind: DustKind::Tabulated {
                log10_m: rows.iter().map(|r| r.0).collect(),
                dndlogm_cm3: rows.iter().map(|r| r.1).collect(),
            },
        })
    }
}
