//! Decoherence budgets for space-based matter-wave interferometers.
//!
//! The library computes the rate at which environmental backgrounds —
//! solar photons, solar-wind ions, galactic cosmic rays, solar
//! neutrinos, and zodiacal dust — localize the superpositions prepared
//! by proposed space missions, and converts those rates into
//! interferometric visibility loss and detectability estimates.
//!
//! Organization:
//! - [`constants`]: physical constants and unit conversions (natural
//!   units, eV, with conversions derived from ħc).
//! - [`quadrature`]: deterministic adaptive Gauss–Kronrod integration.
//! - [`kinematics`]: relativistic two-body scattering kinematics.
//! - [`response`]: form factors and cloud structure functions.
//! - [`spectra`]: environmental flux models (built-in and file-loaded).
//! - [`dust`]: interplanetary dust mass distributions.
//! - [`missions`]: mission presets and configuration loading.
//! - [`rates`]: the master rate engine and per-background channels.
//! - [`xsec`]: independent cross-section-route validation oracles.
//! - [`mc`]: Monte-Carlo validation oracles.
//! - [`validate`]: packaged oracle suites.
//! - [`observables`]: visibility loss, SNR, scans, and budget tables.
//! - [`data`]: data-directory resolution, ingest, and run manifests.

// `!(x > 0.0)` is the NaN-rejecting form of a positivity check; writing
// it as `x <= 0.0` would silently accept NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Reference values are frozen at the full precision of the runs that
// produced them so regressions are bit-exact, even where fewer digits
// would parse to the same f64.
#![allow(clippy::excessive_precision)]

pub mod constants;
pub mod data;
pub mod dust;
pub mod error;
pub mod kinematics;
pub mod mc;
pub mod missions;
pub mod observables;
pub mod quadrature;
pub mod rates;
pub mod response;
pub mod spectra;
pub mod validate;
pub mod xsec;

pub use error::{Error, Result};
