//! Data-file resolution, checksums, run manifests, and raw-file ingest.
//!
//! Flux tables live in a data directory resolved from an explicit path
//! (CLI `--data-dir`) or the `DECOBUDGET_DATA` environment variable.
//! Every canonical file is optional: a missing file falls back to the
//! corresponding built-in analytic model, and the fallback is reported
//! as a notice so it can be surfaced on stderr.
//!
//! Each run is described by a [`RunManifest`] — inputs, checksums,
//! resolved mission parameters, seed — rendered as `#`-prefixed header
//! lines that are embedded at the top of every emitted result file, so
//! any output can be traced back to the exact inputs that produced it.

use std::env;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::dust::DustDistribution;
use crate::error::{Error, Result};
use crate::missions::MissionConfig;
use crate::rates::BackgroundSources;
use crate::response::{CoherentNucleonCount, StructureMode};
use crate::spectra::{
    cosmic_ray_spectrum, solar_neutrino_spectrum, solar_photon_spectrum, CosmicRaySource,
    NeutrinoComponentSpec, NeutrinoKind, PhotonSource, COSMIC_RAY_CUTOFF_EV,
};

/// Environment variable naming the data directory.
pub const ENV_DATA_DIR: &str = "DECOBUDGET_DATA";

/// Canonical file name: zero-air-mass solar irradiance table.
pub const SOLAR_PHOTON_FILE: &str = "solar_irradiance_zero_airmass.csv";
/// Canonical file name: cosmic-ray proton local-interstellar-spectrum table.
pub const COSMIC_RAY_FILE: &str = "cosmic_ray_protons_lis.csv";
/// Canonical file name: interplanetary-dust number density per mass decade.
pub const DUST_FILE: &str = "zodiacal_dust_grun.csv";
/// Canonical file name: solar-neutrino component normalizations.
pub const NEUTRINO_FILE: &str = "solar_neutrinos_normalizations.csv";

/// Version tag of the output format written by this crate.
pub const OUTPUT_SCHEMA: &str = "decobudget-output/1";

/// Resolve the data directory: an explicit path wins, then the
/// `DECOBUDGET_DATA` environment variable; `None` means built-ins only.
pub fn resolve_data_dir(explicit: Option<PathBuf>) -> Option<PathBuf> {
    explicit.or_else(|| env::var_os(ENV_DATA_DIR).map(PathBuf::from))
}

/// Hex-encoded SHA-256 digest of a file's bytes.
pub fn sha256_hex(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::MissingData(path.to_path_buf())
        } else {
            Error::Io(e)
        }
    })?;
    let digest = Sha256::digest(&bytes);
    let mut hex = String::with_capacity(64);
    for byte in digest {
        let _ = write!(hex, "{byte:02x}");
    }
    Ok(hex)
}

/// Where one background's input came from: a checksummed file or a
/// built-in analytic model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataFileRecord {
    /// Which input this record describes (e.g. "solar-photons").
    pub role: &'static str,
    /// Human-readable source description.
    pub source: String,
    /// SHA-256 of the file, when the source is a file.
    pub sha256: Option<String>,
}

impl DataFileRecord {
    fn from_file(role: &'static str, path: &Path) -> Result<Self> {
        Ok(DataFileRecord {
            role,
            source: format!("file {}", path.display()),
            sha256: Some(sha256_hex(path)?),
        })
    }

    fn builtin(role: &'static str, label: &str) -> Self {
        DataFileRecord {
            role,
            source: format!("builtin-analytic {label}"),
            sha256: None,
        }
    }
}

/// Background sources plus the provenance records and fallback notices
/// produced while loading them.
#[derive(Debug)]
pub struct LoadedSources {
    pub sources: BackgroundSources,
    pub files: Vec<DataFileRecord>,
    pub notices: Vec<String>,
}

/// Load all background inputs from `data_dir`, falling back per file to
/// the built-in analytic models.
///
/// A configured directory that does not exist is an error (the caller
/// asked for data that is not there); an unconfigured directory or a
/// missing individual file is a recorded fallback, not an error.
pub fn load_sources(data_dir: Option<&Path>) -> Result<LoadedSources> {
    let mut files = Vec::new();
    let mut notices = Vec::new();
    let builtin = BackgroundSources::builtin()?;

    if let Some(dir) = data_dir {
        if !dir.is_dir() {
            return Err(Error::MissingData(dir.to_path_buf()));
        }
    } else {
        notices.push(format!(
            "no data directory configured (flag or {ENV_DATA_DIR}); using built-in analytic models"
        ));
    }

    let locate =
        |name: &str| -> Option<PathBuf> { data_dir.map(|d| d.join(name)).filter(|p| p.is_file()) };
    let mut note_fallback = |name: &str, what: &str| {
        if data_dir.is_some() {
            notices.push(format!(
                "{name} not found in data directory; using built-in {what}"
            ));
        }
    };

    let photons = match locate(SOLAR_PHOTON_FILE) {
        Some(path) => {
            files.push(DataFileRecord::from_file("solar-photons", &path)?);
            solar_photon_spectrum(PhotonSource::TabulatedFile(path))?
        }
        None => {
            note_fallback(SOLAR_PHOTON_FILE, "5772 K blackbody");
            files.push(DataFileRecord::builtin("solar-photons", "blackbody-5772K"));
            builtin.photons
        }
    };

    let wind = builtin.wind;
    files.push(DataFileRecord::builtin(
        "solar-wind",
        "flat-band n=5.74cm^-3 0.3-3keV",
    ));

    let cosmic_rays = match locate(COSMIC_RAY_FILE) {
        Some(path) => {
            files.push(DataFileRecord::from_file("cosmic-rays", &path)?);
            cosmic_ray_spectrum(CosmicRaySource::TabulatedFile(path), COSMIC_RAY_CUTOFF_EV)?
        }
        None => {
            note_fallback(COSMIC_RAY_FILE, "Voyager-anchored LIS fit");
            files.push(DataFileRecord::builtin("cosmic-rays", "lis-fit"));
            builtin.cosmic_rays
        }
    };

    let neutrinos = match locate(NEUTRINO_FILE) {
        Some(path) => {
            files.push(DataFileRecord::from_file("solar-neutrinos", &path)?);
            let components = parse_neutrino_normalizations(&path)?;
            solar_neutrino_spectrum(&components)?
        }
        None => {
            note_fallback(NEUTRINO_FILE, "B16-GS98 component set");
            files.push(DataFileRecord::builtin("solar-neutrinos", "b16-gs98"));
            builtin.neutrinos
        }
    };

    let dust = match locate(DUST_FILE) {
        Some(path) => {
            files.push(DataFileRecord::from_file("zodiacal-dust", &path)?);
            DustDistribution::from_file(&path, false)?
        }
        None => {
            note_fallback(DUST_FILE, "Grün interplanetary-flux model");
            files.push(DataFileRecord::builtin("zodiacal-dust", "grun-model"));
            builtin.dust
        }
    };

    Ok(LoadedSources {
        sources: BackgroundSources {
            photons,
            wind,
            cosmic_rays,
            neutrinos,
            dust,
            fermi: builtin.fermi,
            r_orbit_au: builtin.r_orbit_au,
        },
        files,
        notices,
    })
}

/// Parse a neutrino-normalization table: header
/// `component, kind, energy[MeV], flux[1/(cm^2 s)]`, then one row per
/// component (`line` rows give the line energy, `continuum` rows the
/// endpoint). Components may repeat (e.g. two lines of one species).
pub fn parse_neutrino_normalizations(path: &Path) -> Result<Vec<NeutrinoComponentSpec>> {
    let text = fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::MissingData(path.to_path_buf())
        } else {
            Error::Io(e)
        }
    })?;
    let mut header_seen = false;
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno,
                msg: format!("expected 4 columns, found {}", fields.len()),
            });
        }
        if !header_seen {
            if fields[0] != "component"
                || fields[1] != "kind"
                || fields[2] != "energy[MeV]"
                || fields[3] != "flux[1/(cm^2 s)]"
            {
                return Err(Error::Unit {
                    path: path.to_path_buf(),
                    unit: line.to_string(),
                });
            }
            header_seen = true;
            continue;
        }
        let kind = match fields[1] {
            "line" => NeutrinoKind::Line,
            "continuum" => NeutrinoKind::Continuum,
            other => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: lineno,
                    msg: format!("kind must be 'line' or 'continuum', got '{other}'"),
                })
            }
        };
        let parse_num = |s: &str, what: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: lineno,
                msg: format!("cannot parse {what} '{s}'"),
            })
        };
        let energy_mev = parse_num(fields[2], "energy")?;
        let flux_cm2_s = parse_num(fields[3], "flux")?;
        if !(energy_mev > 0.0) || !(flux_cm2_s >= 0.0) {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno,
                msg: "energy must be positive and flux non-negative".into(),
            });
        }
        out.push(NeutrinoComponentSpec {
            name: fields[0].to_string(),
            kind,
            energy_mev,
            flux_cm2_s,
        });
    }
    if !header_seen {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            msg: "empty file: no header row".into(),
        });
    }
    if out.is_empty() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            msg: "no component rows".into(),
        });
    }
    Ok(out)
}

fn mode_slug(mode: StructureMode) -> &'static str {
    match mode {
        StructureMode::ColdAtom => "cold-atom",
        StructureMode::MatterCoherent => "matter-coherent",
    }
}

fn coherent_slug(count: CoherentNucleonCount) -> &'static str {
    match count {
        CoherentNucleonCount::NucleonNumber => "nucleon-number",
        CoherentNucleonCount::ProtonNumber => "proton-number",
    }
}

/// Everything needed to reproduce a run: inputs, their checksums, the
/// resolved mission parameters, and the random seed.
#[derive(Debug, Clone)]
pub struct RunManifest {
    /// Tool name and version.
    pub tool: String,
    /// Output-format version tag.
    pub schema: &'static str,
    /// The subcommand and arguments as invoked.
    pub command: String,
    /// Data directory the inputs were resolved against, if any.
    pub data_dir: Option<PathBuf>,
    /// Provenance of every background input.
    pub files: Vec<DataFileRecord>,
    /// Fully resolved parameters of every mission in the run.
    pub missions: Vec<MissionConfig>,
    /// Random seed for any stochastic validation in the run.
    pub seed: u64,
    /// Relative quadrature tolerance used for the rates.
    pub rel_tol: f64,
    /// Charged-probe regime selector as requested.
    pub regime: String,
    /// RFC 3339 timestamp; `None` when timestamps are suppressed for
    /// byte-reproducible output.
    pub timestamp: Option<String>,
}

impl RunManifest {
    /// Render the manifest as `#`-prefixed header lines (trailing
    /// newline included) for embedding at the top of result files.
    pub fn render_header(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# tool: {}", self.tool);
        let _ = writeln!(s, "# schema: {}", self.schema);
        let _ = writeln!(s, "# command: {}", self.command);
        if let Some(ts) = &self.timestamp {
            let _ = writeln!(s, "# timestamp: {ts}");
        }
        let _ = writeln!(s, "# seed: {}", self.seed);
        let _ = writeln!(s, "# rel-tol: {:e}", self.rel_tol);
        let _ = writeln!(s, "# regime: {}", self.regime);
        match &self.data_dir {
            Some(dir) => {
                let _ = writeln!(s, "# data-dir: {}", dir.display());
            }
            None => {
                let _ = writeln!(s, "# data-dir: (none)");
            }
        }
        for f in &self.files {
            match &f.sha256 {
                Some(hash) => {
                    let _ = writeln!(s, "# input {}: {} sha256={}", f.role, f.source, hash);
                }
                None => {
                    let _ = writeln!(s, "# input {}: {}", f.role, f.source);
                }
            }
        }
        for m in &self.missions {
            let _ = writeln!(
                s,
                "# mission {}: A={} Z={} alpha_vol={}A^3 n_units={:e} n_independent={:e} \
                 r_cloud={:e}m dx={:e}m t_shot={}s t_exp={}s mode={} coherent={}",
                m.name,
                m.target.a,
                m.target.z,
                m.target.polarizability_volume_a3,
                m.n_units,
                m.n_independent,
                m.r_cloud_m,
                m.delta_x_m,
                m.t_shot_s,
                m.t_exp_s,
                mode_slug(m.mode),
                coherent_slug(m.coherent_count),
            );
        }
        s
    }
}

// ---------------------------------------------------------------------
// Ingest: normalize raw flux files into the canonical formats
// ---------------------------------------------------------------------

/// Which canonical format an ingested file should be normalized to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IngestKind {
    /// Photon irradiance or number-flux table → canonical irradiance CSV.
    SolarPhotons,
    /// Cosmic-ray intensity/flux table → canonical energy-flux CSV.
    CosmicRays,
    /// Dust number density per mass decade → canonical dust CSV.
    ZodiacalDust,
    /// Neutrino component normalizations → canonical component CSV.
    SolarNeutrinos,
}

impl IngestKind {
    pub fn from_slug(slug: &str) -> Result<Self> {
        match slug {
            "solar-photons" => Ok(IngestKind::SolarPhotons),
            "cosmic-rays" => Ok(IngestKind::CosmicRays),
            "zodiacal-dust" => Ok(IngestKind::ZodiacalDust),
            "solar-neutrinos" => Ok(IngestKind::SolarNeutrinos),
            other => Err(Error::config(format!(
                "unknown ingest kind '{other}' (expected solar-photons, cosmic-rays, \
                 zodiacal-dust, or solar-neutrinos)"
            ))),
        }
    }

    /// Canonical file name this kind is written to.
    pub fn canonical_name(&self) -> &'static str {
        match self {
            IngestKind::SolarPhotons => SOLAR_PHOTON_FILE,
            IngestKind::CosmicRays => COSMIC_RAY_FILE,
            IngestKind::ZodiacalDust => DUST_FILE,
            IngestKind::SolarNeutrinos => NEUTRINO_FILE,
        }
    }
}

/// Result of normalizing one raw file.
#[derive(Debug, Clone)]
pub struct IngestReport {
    pub kind: IngestKind,
    pub rows: usize,
    pub output: PathBuf,
    pub sha256: String,
}

/// Non-empty parent directory of a file path, if any.
fn out_path_parent(path: &Path) -> Option<&Path> {
    path.parent().filter(|p| !p.as_os_str().is_empty())
}

/// Split a raw line into fields on commas or whitespace.
fn raw_fields(line: &str) -> Vec<String> {
    if line.contains(',') {
        line.split(',').map(|f| f.trim().to_string()).collect()
    } else {
        line.split_whitespace().map(str::to_string).collect()
    }
}

/// Split a header line into column labels, keeping bracketed or
/// parenthesized unit groups (which may contain spaces) intact.
fn split_header(line: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut depth = 0i32;
    for c in line.chars() {
        match c {
            '[' | '(' => {
                depth += 1;
                current.push(c);
            }
            ']' | ')' => {
                depth -= 1;
                current.push(c);
            }
            ',' if depth == 0 => {
                if !current.trim().is_empty() {
                    tokens.push(current.trim().to_string());
                }
                current.clear();
            }
            c if c.is_whitespace() && depth == 0 => {
                if !current.trim().is_empty() {
                    tokens.push(current.trim().to_string());
                }
                current.clear();
            }
            c => current.push(c),
        }
    }
    if !current.trim().is_empty() {
        tokens.push(current.trim().to_string());
    }
    tokens
}

/// Optional `(abscissa, ordinate)` header labels plus the numeric rows
/// of a two-column table.
type RawTable = (Option<(String, String)>, Vec<(f64, f64)>);

/// Read a raw two-column numeric table. Comment lines start with '#',
/// ';', or '%'. A leading non-numeric row is accepted as a header; when
/// it carries bracketed units they are returned for reuse.
fn read_raw_table(path: &Path) -> Result<RawTable> {
    let text = fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::MissingData(path.to_path_buf())
        } else {
            Error::Io(e)
        }
    })?;
    let mut header: Option<(String, String)> = None;
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty()
            || line.starts_with('#')
            || line.starts_with(';')
            || line.starts_with('%')
        {
            continue;
        }
        let fields = raw_fields(line);
        if fields.len() < 2 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno,
                msg: format!("expected at least 2 columns, found {}", fields.len()),
            });
        }
        match (fields[0].parse::<f64>(), fields[1].parse::<f64>()) {
            (Ok(x), Ok(y)) => rows.push((x, y)),
            _ if rows.is_empty() && header.is_none() => {
                let labels = split_header(line);
                if labels.len() < 2 {
                    return Err(Error::Parse {
                        path: path.to_path_buf(),
                        line: lineno,
                        msg: format!("cannot parse header row '{line}'"),
                    });
                }
                header = Some((labels[0].clone(), labels[1].clone()));
            }
            _ => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: lineno,
                    msg: format!("cannot parse numeric row '{line}'"),
                });
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            msg: "no numeric rows".into(),
        });
    }
    Ok((header, rows))
}

fn has_bracket_units(header: &Option<(String, String)>) -> bool {
    matches!(header, Some((a, b)) if a.contains('[') && a.contains(']')
        && b.contains('[') && b.contains(']'))
}

/// Normalize a raw flux/density file into the canonical format for
/// `kind`, writing it to `output` (or `<output>/<canonical name>` when
/// `output` is a directory). The normalized file is re-loaded through
/// the strict canonical loader before the report is returned, so a
/// successful ingest guarantees a usable file.
pub fn ingest_file(kind: IngestKind, input: &Path, output: &Path) -> Result<IngestReport> {
    let trailing_separator = output
        .to_str()
        .is_some_and(|s| s.ends_with(std::path::MAIN_SEPARATOR));
    let out_path = if output.is_dir() || trailing_separator {
        fs::create_dir_all(output)?;
        output.join(kind.canonical_name())
    } else {
        if let Some(parent) = out_path_parent(output) {
            fs::create_dir_all(parent)?;
        }
        output.to_path_buf()
    };

    let mut body = String::new();
    let rows_written = match kind {
        IngestKind::SolarPhotons | IngestKind::CosmicRays => {
            let (header, mut rows) = read_raw_table(input)?;
            if !has_bracket_units(&header) {
                return Err(Error::Unit {
                    path: input.to_path_buf(),
                    unit: header
                        .map(|(a, b)| format!("{a}, {b}"))
                        .unwrap_or_else(|| "(missing header)".into()),
                });
            }
            let (a, o) = header.unwrap();
            rows.sort_by(|p, q| p.0.total_cmp(&q.0));
            rows.dedup_by(|p, q| p.0 == q.0);
            let _ = writeln!(body, "# normalized from {}", input.display());
            let _ = writeln!(body, "{a}, {o}");
            for (x, y) in &rows {
                let _ = writeln!(body, "{x:e}, {y:e}");
            }
            rows.len()
        }
        IngestKind::ZodiacalDust => {
            let (_, mut rows) = read_raw_table(input)?;
            rows.sort_by(|p, q| p.0.total_cmp(&q.0));
            rows.dedup_by(|p, q| p.0 == q.0);
            let lo = rows[0].0;
            let hi = rows[rows.len() - 1].0;
            let _ = writeln!(body, "# normalized from {}", input.display());
            if lo < -8.0 || hi > 0.0 {
                let _ = writeln!(body, "# {}", crate::dust::DUST_EXTENDED_DIRECTIVE);
            }
            let _ = writeln!(body, "log10m[g], dndlogm[1/cm^3]");
            for (x, y) in &rows {
                let _ = writeln!(body, "{x}, {y:e}");
            }
            rows.len()
        }
        IngestKind::SolarNeutrinos => {
            // Component tables are already row-structured; normalize
            // separators and validate strictly via the canonical parser.
            let text = fs::read_to_string(input).map_err(|e| {
                if e.kind() == std::io::ErrorKind::NotFound {
                    Error::MissingData(input.to_path_buf())
                } else {
                    Error::Io(e)
                }
            })?;
            let mut specs = Vec::new();
            for raw in text.lines() {
                let line = raw.trim();
                if line.is_empty()
                    || line.starts_with('#')
                    || line.starts_with(';')
                    || line.starts_with('%')
                {
                    continue;
                }
                let fields = raw_fields(line);
                if fields.len() != 4 {
                    continue;
                }
                if fields[0] == "component" {
                    continue;
                }
                let (Ok(e), Ok(f)) = (fields[2].parse::<f64>(), fields[3].parse::<f64>()) else {
                    continue;
                };
                let k = match fields[1].as_str() {
                    "line" => NeutrinoKind::Line,
                    "continuum" => NeutrinoKind::Continuum,
                    _ => continue,
                };
                specs.push(NeutrinoComponentSpec {
                    name: fields[0].clone(),
                    kind: k,
                    energy_mev: e,
                    flux_cm2_s: f,
                });
            }
            if specs.is_empty() {
                return Err(Error::Parse {
                    path: input.to_path_buf(),
                    line: 0,
                    msg: "no component rows".into(),
                });
            }
            let _ = writeln!(body, "# normalized from {}", input.display());
            let _ = writeln!(body, "component, kind, energy[MeV], flux[1/(cm^2 s)]");
            for c in &specs {
                let k = match c.kind {
                    NeutrinoKind::Line => "line",
                    NeutrinoKind::Continuum => "continuum",
                };
                let _ = writeln!(
                    body,
                    "{}, {k}, {}, {:e}",
                    c.name, c.energy_mev, c.flux_cm2_s
                );
            }
            specs.len()
        }
    };

    fs::write(&out_path, &body)?;

    // Round-trip through the strict loaders to prove the output usable.
    match kind {
        IngestKind::SolarPhotons => {
            solar_photon_spectrum(PhotonSource::TabulatedFile(out_path.clone()))?;
        }
        IngestKind::CosmicRays => {
            cosmic_ray_spectrum(
                CosmicRaySource::TabulatedFile(out_path.clone()),
                COSMIC_RAY_CUTOFF_EV,
            )?;
        }
        IngestKind::ZodiacalDust => {
            DustDistribution::from_file(&out_path, false)?;
        }
        IngestKind::SolarNeutrinos => {
            parse_neutrino_normalizations(&out_path)?;
        }
    }

    Ok(IngestReport {
        kind,
        rows: rows_written,
        sha256: sha256_hex(&out_path)?,
        output: out_path,
    })
}
