//! Monte-Carlo oracles for the deterministic quadrature results.
//!
//! Two estimators are provided: a direct angular-average check of the
//! which-path decoherence factor, and an importance-sampled spot check
//! of full channel rates. Both draw from counter-based ChaCha12 streams
//! in fixed 1024-sample blocks with an ordered reduction, so results
//! are bit-identical regardless of how many threads evaluate blocks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::constants::{ALPHA, EV_TO_PER_S, M_PROTON_EV};
use crate::error::{Error, Result};
use crate::kinematics::q_max;
use crate::missions::MissionConfig;
use crate::rates::{q_high_floor_ev, q_low_cut_ev, QuadratureConfig};
use crate::response::{decoherence_factor, structure_function, StructureBasis};
use crate::spectra::FluxSpectrum;

/// Samples per RNG block (one ChaCha stream per block).
const BLOCK_SAMPLES: u64 = 1024;

/// A Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: u64,
}

/// Accumulate mean and variance over blocks in block order.
fn reduce_blocks(blocks: Vec<(f64, f64, u64)>) -> McEstimate {
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut n = 0u64;
    for (s, s2, c) in blocks {
        sum += s;
        sum_sq += s2;
        n += c;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let var = ((sum_sq - sum * sum / nf) / (nf - 1.0)).max(0.0);
    McEstimate {
        value: mean,
        std_error: (var / nf).sqrt(),
        n_samples: n,
    }
}

fn block_rng(seed: u64, block: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    // Stream 0 is left unused so the unstreamed generator never
    // collides with block 0.
    rng.set_stream(block + 1);
    rng
}

/// Monte-Carlo estimate of the orientation-averaged which-path factor
/// ⟨1 − cos(q·Δx)⟩ for isotropically oriented momentum transfer and
/// separation vectors, whose exact value is 1 − sinc(qΔx). Four angles
/// are sampled per draw (polar and azimuthal for each unit vector).
pub fn mc_angular_factor(q_dx: f64, n_samples: u64, seed: u64) -> Result<McEstimate> {
    if !(q_dx >= 0.0) || !q_dx.is_finite() {
        return Err(Error::domain("phase must be finite and non-negative"));
    }
    if n_samples < 2 {
        return Err(Error::domain("need at least 2 samples"));
    }
    let n_blocks = n_samples.div_ceil(BLOCK_SAMPLES);
    let blocks: Vec<(f64, f64, u64)> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, b);
            let count = BLOCK_SAMPLES.min(n_samples - b * BLOCK_SAMPLES);
            let mut s = 0.0;
            let mut s2 = 0.0;
            for _ in 0..count {
                let cos_a = 2.0 * rng.random::<f64>() - 1.0;
                let phi_a = 2.0 * std::f64::consts::PI * rng.random::<f64>();
                let cos_b = 2.0 * rng.random::<f64>() - 1.0;
                let phi_b = 2.0 * std::f64::consts::PI * rng.random::<f64>();
                let sin_a = (1.0 - cos_a * cos_a).sqrt();
                let sin_b = (1.0 - cos_b * cos_b).sqrt();
                let dot = cos_a * cos_b + sin_a * sin_b * (phi_a - phi_b).cos();
                let f = 1.0 - (q_dx * dot).cos();
                s += f;
                s2 += f * f;
            }
            (s, s2, count)
        })
        .collect();
    Ok(reduce_blocks(blocks))
}

/// Channels the rate spot check can sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpotcheckChannel {
    SolarPhotons,
    ChargedLowQ,
    ChargedHighQ,
}

impl SpotcheckChannel {
    pub fn label(&self) -> &'static str {
        match self {
            SpotcheckChannel::SolarPhotons => "solar-photons",
            SpotcheckChannel::ChargedLowQ => "charged-low-q",
            SpotcheckChannel::ChargedHighQ => "charged-high-q",
        }
    }
}

/// Piecewise-linear importance sampler for the outer energy variable,
/// built on a fixed grid over the spectrum support.
struct EnergySampler {
    knots: Vec<f64>,
    density: Vec<f64>,
    cumulative: Vec<f64>,
    total: f64,
}

impl EnergySampler {
    fn build(spectrum: &FluxSpectrum) -> Result<Self> {
        let (a, b) = spectrum.support();
        if !(b > a) {
            return Err(Error::domain("spectrum support is empty"));
        }
        let n = 129usize;
        let log_grid = a > 0.0 && b / a > 100.0;
        let knots: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                if log_grid {
                    a * (b / a).powf(t)
                } else {
                    a + (b - a) * t
                }
            })
            .collect();
        let density: Vec<f64> = knots
            .iter()
            .map(|&k| spectrum.evaluate_natural(k).max(0.0))
            .collect();
        let mut cumulative = vec![0.0; n];
        for i in 1..n {
            let w = 0.5 * (density[i - 1] + density[i]) * (knots[i] - knots[i - 1]);
            cumulative[i] = cumulative[i - 1] + w;
        }
        let total = cumulative[n - 1];
        if !(total > 0.0) {
            return Err(Error::domain("spectrum integrates to zero"));
        }
        Ok(EnergySampler {
            knots,
            density,
            cumulative,
            total,
        })
    }

    /// Draw an energy from the piecewise-linear density; returns the
    /// sample and its pdf value (normalized).
    fn sample(&self, u: f64) -> (f64, f64) {
        let target = u * self.total;
        let idx = match self
            .cumulative
            .binary_search_by(|c| c.partial_cmp(&target).unwrap())
        {
            Ok(i) => i.min(self.knots.len() - 2),
            Err(i) => (i.max(1) - 1).min(self.knots.len() - 2),
        };
        let (k0, k1) = (self.knots[idx], self.knots[idx + 1]);
        let (f0, f1) = (self.density[idx], self.density[idx + 1]);
        let rem = target - self.cumulative[idx];
        let h = k1 - k0;
        let slope = (f1 - f0) / h;
        // Solve f0·t + slope·t²/2 = rem for t ∈ [0, h].
        let t = if slope.abs() * h < 1e-12 * f0.max(1e-300) {
            rem / f0.max(1e-300)
        } else {
            let disc = (f0 * f0 + 2.0 * slope * rem).max(0.0);
            (disc.sqrt() - f0) / slope
        };
        let t = t.clamp(0.0, h);
        let k = k0 + t;
        let pdf = (f0 + slope * t) / self.total;
        (k, pdf.max(1e-300))
    }
}

/// Importance-sampled Monte-Carlo estimate of a full channel rate:
/// energies drawn from a piecewise-linear approximation of the flux,
/// momentum transfer drawn uniformly in the channel's q-window,
/// with the exact master-formula integrand in the numerator (so the
/// approximation biases only the variance, not the mean).
pub fn mc_rate_spotcheck(
    mission: &MissionConfig,
    spectrum: &FluxSpectrum,
    channel: SpotcheckChannel,
    n_samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    if n_samples < 2 {
        return Err(Error::domain("need at least 2 samples"));
    }
    if spectrum.total_flux_native() == 0.0 {
        // No incident particles: the rate is exactly zero, with zero
        // sampling uncertainty.
        return Ok(McEstimate {
            value: 0.0,
            std_error: 0.0,
            n_samples,
        });
    }
    let sampler = EnergySampler::build(spectrum)?;
    let m_in = spectrum.species.mass_ev;
    match channel {
        SpotcheckChannel::SolarPhotons => {
            if spectrum.species.label != "photon" {
                return Err(Error::config("photon spot check needs a photon spectrum"));
            }
        }
        _ => {
            if m_in <= 0.0 {
                return Err(Error::config("charged spot check needs a massive species"));
            }
        }
    }
    let params = mission.structure_params();
    let m_unit = mission.unit_mass_ev();
    let alpha_n = mission.target.alpha_n_inv_ev3();
    let dx = mission.delta_x_inv_ev();
    let q_cut = q_low_cut_ev(mission.target.r_atom_m);
    let q_floor = q_high_floor_ev(mission.target.r_atom_m);
    let (m_target, basis) = match channel {
        SpotcheckChannel::SolarPhotons | SpotcheckChannel::ChargedLowQ => {
            (m_unit, StructureBasis::Atoms)
        }
        SpotcheckChannel::ChargedHighQ => (M_PROTON_EV, StructureBasis::Protons),
    };

    let integrand = |k: f64, q: f64| -> f64 {
        let omega = k + m_in;
        let p2 = k * (k + 2.0 * m_in);
        if p2 <= 0.0 {
            return 0.0;
        }
        let recoil_left = m_target + omega - m_target.hypot(q);
        let msq = match channel {
            SpotcheckChannel::SolarPhotons => (alpha_n * omega).powi(2) / 16.0,
            SpotcheckChannel::ChargedLowQ => {
                std::f64::consts::PI.powi(2) * alpha_n * alpha_n * ALPHA * ALPHA * q * q / 64.0
            }
            SpotcheckChannel::ChargedHighQ => {
                16.0 * std::f64::consts::PI.powi(2) * ALPHA * ALPHA * omega
                    / (q.powi(4) * recoil_left)
            }
        };
        let flux = spectrum.evaluate_natural(k);
        flux * (omega / p2)
            * q
            * recoil_left
            * msq
            * structure_function(q, basis, &params)
            * decoherence_factor(q * dx)
            / (2.0 * std::f64::consts::PI)
    };
    let q_window = |k: f64| -> (f64, f64) {
        match channel {
            SpotcheckChannel::SolarPhotons => (0.0, q_max(0.0, m_target, k).unwrap_or(0.0)),
            SpotcheckChannel::ChargedLowQ => {
                (0.0, q_max(m_in, m_target, k).unwrap_or(0.0).min(q_cut))
            }
            SpotcheckChannel::ChargedHighQ => (q_floor, q_max(m_in, m_target, k).unwrap_or(0.0)),
        }
    };

    let n_blocks = n_samples.div_ceil(BLOCK_SAMPLES);
    let blocks: Vec<(f64, f64, u64)> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, b);
            let count = BLOCK_SAMPLES.min(n_samples - b * BLOCK_SAMPLES);
            let mut s = 0.0;
            let mut s2 = 0.0;
            for _ in 0..count {
                let (k, pdf_k) = sampler.sample(rng.random::<f64>());
                let (q_lo, q_hi) = q_window(k);
                let f = if q_hi > q_lo {
                    let q = q_lo + (q_hi - q_lo) * rng.random::<f64>();
                    integrand(k, q) * (q_hi - q_lo) / pdf_k
                } else {
                    0.0
                };
                s += f;
                s2 += f * f;
            }
            (s, s2, count)
        })
        .collect();
    let est = reduce_blocks(blocks);
    Ok(McEstimate {
        value: est.value * EV_TO_PER_S,
        std_error: est.std_error * EV_TO_PER_S,
        n_samples: est.n_samples,
    })
}

/// Convenience: the quadrature rate this spot check should reproduce.
pub fn spotcheck_reference(
    mission: &MissionConfig,
    spectrum: &FluxSpectrum,
    channel: SpotcheckChannel,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    use crate::rates::{rate_charged_highq, rate_charged_lowq, rate_solar_photons, Background};
    let r = match channel {
        SpotcheckChannel::SolarPhotons => rate_solar_photons(mission, spectrum, cfg)?,
        SpotcheckChannel::ChargedLowQ => {
            rate_charged_lowq(mission, spectrum, 1, None, cfg, Background::SolarWind)?
        }
        SpotcheckChannel::ChargedHighQ => {
            rate_charged_highq(mission, spectrum, 1, None, cfg, Background::SolarWind)?
        }
    };
    Ok(r.gamma_tot_per_s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{
        solar_photon_spectrum, solar_wind_spectrum, PhotonSource, SOLAR_WIND_BAND_EV,
        SOLAR_WIND_DENSITY_CM3,
    };

    #[test]
    fn angular_factor_matches_exact_average_at_three_sigma() {
        for q_dx in [0.1, 1.0, 10.0, 50.0, 1e3] {
            let est = mc_angular_factor(q_dx, 1_000_000, 20260818).unwrap();
            let exact = decoherence_factor(q_dx);
            assert!(
                (est.value - exact).abs() <= 3.0 * est.std_error,
                "q_dx {q_dx}: {} vs {} (se {})",
                est.value,
                exact,
                est.std_error
            );
        }
    }

    #[test]
    fn angular_estimates_are_thread_count_invariant() {
        // The block/stream discipline makes the reduction independent of
        // the rayon pool; same seed must give bit-identical numbers.
        let a = mc_angular_factor(1.0, 100_000, 7).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| mc_angular_factor(1.0, 100_000, 7).unwrap());
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    }

    #[test]
    fn standard_error_scales_as_inverse_sqrt_n() {
        let ns = [1_000u64, 10_000, 100_000, 1_000_000, 10_000_000];
        let ses: Vec<f64> = ns
            .iter()
            .map(|&n| mc_angular_factor(1.0, n, 42).unwrap().std_error)
            .collect();
        // Least-squares slope of log(se) against log(n).
        let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
        let ys: Vec<f64> = ses.iter().map(|s| s.ln()).collect();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let slope = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (x - mx) * (y - my))
            .sum::<f64>()
            / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
        assert!(
            (slope + 0.5).abs() < 0.1,
            "error-scaling slope {slope} not within -0.5 ± 0.1"
        );
    }

    #[test]
    fn rate_spotchecks_agree_at_three_sigma() {
        let wind = solar_wind_spectrum(SOLAR_WIND_DENSITY_CM3, SOLAR_WIND_BAND_EV).unwrap();
        let photons = solar_photon_spectrum(PhotonSource::Blackbody {
            temperature_k: crate::constants::T_SUN_K,
        })
        .unwrap();
        let cfg = QuadratureConfig::default();
        let cases = [
            ("MAQRO", &photons, SpotcheckChannel::SolarPhotons),
            ("MAQRO", &wind, SpotcheckChannel::ChargedLowQ),
            ("BECCAL", &wind, SpotcheckChannel::ChargedHighQ),
        ];
        for (name, spectrum, channel) in cases {
            let m = MissionConfig::builtin(name).unwrap();
            let reference = spotcheck_reference(&m, spectrum, channel, &cfg).unwrap();
            let est = mc_rate_spotcheck(&m, spectrum, channel, 400_000, 99).unwrap();
            assert!(
                (est.value - reference).abs() <= 3.0 * est.std_error.max(1e-4 * reference),
                "{name} {}: mc {} vs quad {} (se {})",
                channel.label(),
                est.value,
                reference,
                est.std_error
            );
            assert!(
                est.std_error / est.value < 0.10,
                "{name} {}: relative MC error {} too large",
                channel.label(),
                est.std_error / est.value
            );
        }
    }

    #[test]
    fn domain_errors() {
        assert!(mc_angular_factor(-1.0, 100, 1).is_err());
        assert!(mc_angular_factor(1.0, 1, 1).is_err());
    }

    #[test]
    fn zero_flux_spot_check_is_exactly_zero() {
        let mission = MissionConfig::builtin("MAQRO").unwrap();
        let spectrum = solar_photon_spectrum(PhotonSource::Blackbody {
            temperature_k: crate::constants::T_SUN_K,
        })
        .unwrap()
        .rescaled(0.0)
        .unwrap();
        let est = mc_rate_spotcheck(&mission, &spectrum, SpotcheckChannel::SolarPhotons, 1000, 7)
            .unwrap();
        assert_eq!(est.value, 0.0);
        assert_eq!(est.std_error, 0.0);
    }
}
