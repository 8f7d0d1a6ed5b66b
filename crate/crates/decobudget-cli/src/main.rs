//! `decobudget`: decoherence budgets for space matter-wave interferometers.
//!
//! Subcommands:
//! * `table` — mission × background grids of decoherence rates and the
//!   derived visibility / SNR observables, as CSV.
//! * `scan` — log-spaced parameter scans (cloud radius, arm separation,
//!   atom number) of rate and single-shot SNR, as CSV.
//! * `validate` — stochastic and cross-formalism validation suites.
//! * `ingest` — normalize raw flux/density files into the canonical
//!   data formats.
//!
//! Exit codes: 0 success, 1 configuration error, 2 missing/invalid data,
//! 3 numerical failure (non-converged quadrature or failed validation).

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use decobudget::data::{
    ingest_file, load_sources, resolve_data_dir, IngestKind, LoadedSources, RunManifest,
    OUTPUT_SCHEMA,
};
use decobudget::missions::MissionConfig;
use decobudget::observables::{scan, ScanParameter};
use decobudget::rates::{Background, ChargedRegime, QuadratureConfig};
use decobudget::validate::{all_passed, run_suite, Suite, ValidateOptions};
use decobudget::Error;

const EXIT_CONFIG: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "decobudget",
    version,
    about = "Decoherence budgets for space-based matter-wave interferometers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute mission × background rate/observable tables (CSV).
    Table(TableArgs),
    /// Scan one mission parameter and report rate and SNR (CSV).
    Scan(ScanArgs),
    /// Run validation suites (angular MC, cross-section route, MC spot checks).
    Validate(ValidateArgs),
    /// Normalize a raw flux/density file into the canonical format.
    Ingest(IngestArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Data directory with canonical flux tables (falls back to the
    /// DECOBUDGET_DATA environment variable, then to built-in models).
    #[arg(long, value_name = "DIR")]
    data_dir: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Relative quadrature tolerance for the rate integrals.
    #[arg(long, default_value_t = 1e-4, value_name = "TOL")]
    rel_tol: f64,
    /// Seed for any stochastic component of the run.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Omit the timestamp line so outputs are byte-reproducible.
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Args)]
struct TableArgs {
    /// Comma-separated mission names or config paths, or 'all'.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    missions: Vec<String>,
    /// Comma-separated background names, or 'all'.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    backgrounds: Vec<String>,
    /// Charged-probe momentum-transfer regime: low, high, or both.
    #[arg(long, default_value = "both")]
    regime: String,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct ScanArgs {
    /// Parameter to scan: r_cloud, dx, or n_atoms.
    #[arg(long)]
    parameter: String,
    /// Scan range as LO:HI (positive, log-spaced).
    #[arg(long, value_name = "LO:HI")]
    range: String,
    /// Number of log-spaced points (>= 8).
    #[arg(long, default_value_t = 9)]
    points: usize,
    /// Base mission name or config path.
    #[arg(long)]
    mission: String,
    /// Background to scan against.
    #[arg(long)]
    background: String,
    /// Charged-probe momentum-transfer regime: low, high, or both.
    #[arg(long, default_value = "both")]
    regime: String,
    /// Restrict the photon channel to momentum transfers in this eV
    /// band (LO:HI); solar-photons background only.
    #[arg(long, value_name = "LO:HI")]
    photon_band: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct ValidateArgs {
    /// Suite to run: angular, xsec, mc, or all.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Report tolerance scale; 0 injects a forced-failure fixture.
    #[arg(long, default_value_t = 1e-4, value_name = "TOL")]
    rel_tol: f64,
    /// Seed for the Monte-Carlo suites.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output file for the report; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IngestArgs {
    /// Input kind: solar-photons, cosmic-rays, zodiacal-dust, or
    /// solar-neutrinos.
    #[arg(long)]
    kind: String,
    /// Raw input file.
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
    /// Output file or directory (directories get the canonical name).
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
}

/// A failure carrying the exit code mandated for its class.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    fn numerical(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_NUMERICAL,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match &err {
            Error::Config(_) | Error::Domain(_) | Error::UnsupportedBackground(_) => EXIT_CONFIG,
            Error::MissingData(_) | Error::Io(_) | Error::Parse { .. } | Error::Unit { .. } => {
                EXIT_DATA
            }
            Error::Quadrature { .. } => EXIT_NUMERICAL,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp
                    | ErrorKind::DisplayVersion
                    | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            ) {
                let _ = err.print();
                return ExitCode::SUCCESS;
            }
            let _ = err.print();
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let result = match cli.command {
        Command::Table(args) => cmd_table(args),
        Command::Scan(args) => cmd_scan(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Ingest(args) => cmd_ingest(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn parse_missions(tokens: &[String]) -> Result<Vec<MissionConfig>, Failure> {
    let cleaned: Vec<&str> = tokens
        .iter()
        .map(|t| t.trim())
        .filter(|t| !t.is_empty())
        .collect();
    if cleaned.is_empty() {
        return Err(Failure::config("empty mission list"));
    }
    if cleaned.len() == 1 && cleaned[0].eq_ignore_ascii_case("all") {
        return Ok(MissionConfig::builtin_all());
    }
    let mut out = Vec::new();
    for token in cleaned {
        let mission = if token.ends_with(".toml") || token.contains('/') {
            MissionConfig::from_file(std::path::Path::new(token))?
        } else {
            MissionConfig::builtin(token)?
        };
        out.push(mission);
    }
    Ok(out)
}

fn parse_backgrounds(tokens: &[String]) -> Result<Vec<Background>, Failure> {
    let cleaned: Vec<&str> = tokens
        .iter()
        .map(|t| t.trim())
        .filter(|t| !t.is_empty())
        .collect();
    if cleaned.is_empty() {
        return Err(Failure::config("empty background list"));
    }
    if cleaned.len() == 1 && cleaned[0].eq_ignore_ascii_case("all") {
        return Ok(Background::ALL.to_vec());
    }
    let mut out = Vec::new();
    for token in cleaned {
        out.push(Background::from_slug(token)?);
    }
    Ok(out)
}

fn parse_regime(token: &str) -> Result<ChargedRegime, Failure> {
    match token {
        "low" => Ok(ChargedRegime::Low),
        "high" => Ok(ChargedRegime::High),
        "both" => Ok(ChargedRegime::Both),
        other => Err(Failure::config(format!(
            "regime must be low, high, or both, got '{other}'"
        ))),
    }
}

fn parse_range(text: &str) -> Result<(f64, f64), Failure> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 2 {
        return Err(Failure::config(format!(
            "range must be LO:HI, got '{text}'"
        )));
    }
    let lo: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| Failure::config(format!("cannot parse range bound '{}'", parts[0])))?;
    let hi: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| Failure::config(format!("cannot parse range bound '{}'", parts[1])))?;
    Ok((lo, hi))
}

fn quadrature_config(rel_tol: f64) -> Result<QuadratureConfig, Failure> {
    let cfg = QuadratureConfig {
        rel_tol,
        ..QuadratureConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Load sources, forwarding fallback notices to stderr.
fn load_sources_noisy(data_dir: Option<&std::path::Path>) -> Result<LoadedSources, Failure> {
    let loaded = load_sources(data_dir)?;
    for notice in &loaded.notices {
        eprintln!("note: {notice}");
    }
    Ok(loaded)
}

fn timestamp(no_timestamp: bool) -> Option<String> {
    if no_timestamp {
        None
    } else {
        Some(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true))
    }
}

fn reconstruct_command(name: &str) -> String {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() {
        name.to_string()
    } else {
        args.join(" ")
    }
}

fn write_output(out: Option<&PathBuf>, contents: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            std::fs::write(path, contents).map_err(|e| Failure {
                code: EXIT_DATA,
                message: format!("cannot write {}: {e}", path.display()),
            })?;
        }
        None => print!("{contents}"),
    }
    Ok(())
}

fn regime_slug(regime: ChargedRegime) -> &'static str {
    match regime {
        ChargedRegime::Low => "low",
        ChargedRegime::High => "high",
        ChargedRegime::Both => "both",
    }
}

fn cmd_table(args: TableArgs) -> Result<(), Failure> {
    let missions = parse_missions(&args.missions)?;
    let backgrounds = parse_backgrounds(&args.backgrounds)?;
    let regime = parse_regime(&args.regime)?;
    let cfg = quadrature_config(args.common.rel_tol)?;
    let data_dir = resolve_data_dir(args.common.data_dir.clone());
    let loaded = load_sources_noisy(data_dir.as_deref())?;

    let rows = decobudget::observables::budget_table(
        &missions,
        &backgrounds,
        &loaded.sources,
        regime,
        &cfg,
    )?;

    let failed: Vec<String> = rows
        .iter()
        .filter(|r| !r.rate.converged)
        .map(|r| format!("{}/{}", r.rate.mission, r.rate.background.slug()))
        .collect();
    if !failed.is_empty() {
        return Err(Failure::numerical(format!(
            "quadrature did not converge to rel-tol {:e} for: {}",
            cfg.rel_tol,
            failed.join(", ")
        )));
    }

    let manifest = RunManifest {
        tool: format!("decobudget {}", env!("CARGO_PKG_VERSION")),
        schema: OUTPUT_SCHEMA,
        command: reconstruct_command("table"),
        data_dir,
        files: loaded.files,
        missions,
        seed: args.common.seed,
        rel_tol: cfg.rel_tol,
        regime: regime_slug(regime).to_string(),
        timestamp: timestamp(args.common.no_timestamp),
    };

    let mut body = manifest.render_header();
    let _ = writeln!(
        body,
        "mission,background,regime,gamma_tot[1/s],quad_rel_err,s,delta_v,sigma_v_qnl,snr_shot,n_meas"
    );
    for row in &rows {
        let cell_regime = match row.rate.background {
            Background::SolarWind | Background::CosmicRays => regime_slug(regime),
            _ => "-",
        };
        let _ = writeln!(
            body,
            "{},{},{},{:.6e},{:.3e},{:.6e},{:.6e},{:.6e},{:.6e},{}",
            row.rate.mission,
            row.rate.background.slug(),
            cell_regime,
            row.rate.gamma_tot_per_s,
            row.rate.quadrature_rel_error,
            row.observables.s,
            row.observables.visibility_loss,
            row.observables.sigma_qnl,
            row.observables.snr_shot,
            row.observables.n_meas,
        );
    }
    write_output(args.common.out.as_ref(), &body)
}

fn cmd_scan(args: ScanArgs) -> Result<(), Failure> {
    let parameter = ScanParameter::from_slug(&args.parameter)?;
    let range = parse_range(&args.range)?;
    let mission = parse_missions(std::slice::from_ref(&args.mission))?
        .into_iter()
        .next()
        .expect("one mission parsed");
    let background = Background::from_slug(&args.background)?;
    let regime = parse_regime(&args.regime)?;
    let photon_band = args.photon_band.as_deref().map(parse_range).transpose()?;
    let cfg = quadrature_config(args.common.rel_tol)?;
    let data_dir = resolve_data_dir(args.common.data_dir.clone());
    let loaded = load_sources_noisy(data_dir.as_deref())?;

    let points = scan(
        &mission,
        background,
        &loaded.sources,
        parameter,
        range,
        args.points,
        regime,
        photon_band,
        &cfg,
    )?;

    let manifest = RunManifest {
        tool: format!("decobudget {}", env!("CARGO_PKG_VERSION")),
        schema: OUTPUT_SCHEMA,
        command: reconstruct_command("scan"),
        data_dir,
        files: loaded.files,
        missions: vec![mission],
        seed: args.common.seed,
        rel_tol: cfg.rel_tol,
        regime: regime_slug(regime).to_string(),
        timestamp: timestamp(args.common.no_timestamp),
    };

    let mut body = manifest.render_header();
    let _ = writeln!(body, "# scan parameter: {}", parameter.slug());
    let _ = writeln!(body, "# background: {}", background.slug());
    if let Some((lo, hi)) = photon_band {
        let _ = writeln!(body, "# photon momentum-transfer band: {lo:e}:{hi:e} eV");
    }
    let _ = writeln!(
        body,
        "{},gamma_tot[1/s],quad_rel_err,snr_shot_single,snr_shot_ensemble",
        parameter.slug()
    );
    for p in &points {
        let _ = writeln!(
            body,
            "{:.6e},{:.6e},{:.3e},{:.6e},{:.6e}",
            p.value,
            p.gamma_tot_per_s,
            p.quadrature_rel_error,
            p.snr_shot_single,
            p.snr_shot_ensemble,
        );
    }
    write_output(args.common.out.as_ref(), &body)
}

fn cmd_validate(args: ValidateArgs) -> Result<(), Failure> {
    let suite = Suite::from_name(&args.suite)?;
    if args.rel_tol < 0.0 || !args.rel_tol.is_finite() {
        return Err(Failure::config(format!(
            "rel-tol must be finite and >= 0, got {}",
            args.rel_tol
        )));
    }
    let mut opts = ValidateOptions {
        rel_tol: args.rel_tol,
        seed: args.seed,
        ..ValidateOptions::default()
    };
    if args.rel_tol > 0.0 {
        opts.quad.rel_tol = args.rel_tol.min(opts.quad.rel_tol);
    }
    let reports = run_suite(suite, &opts)?;

    let mut body = String::new();
    let _ = writeln!(body, "# decobudget validation: suite={}", args.suite);
    let _ = writeln!(body, "# seed: {}", args.seed);
    let _ = writeln!(body, "# rel-tol: {:e}", args.rel_tol);
    for report in &reports {
        let _ = writeln!(body, "{}", report.line());
    }
    let passed = reports.iter().filter(|r| r.pass).count();
    let _ = writeln!(body, "# {passed}/{} checks passed", reports.len());
    write_output(args.out.as_ref(), &body)?;

    if all_passed(&reports) {
        Ok(())
    } else {
        Err(Failure::numerical(format!(
            "{} of {} validation checks failed",
            reports.len() - passed,
            reports.len()
        )))
    }
}

fn cmd_ingest(args: IngestArgs) -> Result<(), Failure> {
    let kind = IngestKind::from_slug(&args.kind)?;
    let report = ingest_file(kind, &args.input, &args.out)?;
    println!(
        "normalized {} rows -> {} (sha256={})",
        report.rows,
        report.output.display(),
        report.sha256
    );
    Ok(())
}
