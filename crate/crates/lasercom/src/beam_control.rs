//! Beam-width selection and the mutual-acquisition Monte Carlo.
//!
//! Widening a beam shrinks its transmitter gain as `1/(4 sigma^2)` but
//! grows the solid angle it covers, so both the acquisition probability
//! over random pointing and the flux at a known off-pointing have an
//! interior optimum in the beam width:
//!
//! * over Gaussian pointing statistics the optimum sits where the
//!   margin ratio satisfies `ln Sigma = 1`, giving the closed form
//!   `sigma* = sqrt(P0 L_s G_Rx R_PD / (8 q e SNR* B F_EN))` for the
//!   APD model (and the analogous form for the photoelectron model);
//! * at a known instantaneous off-pointing `dtheta` the flux
//!   `(1/sigma^2) exp(-dtheta^2/(2 sigma^2))` peaks at
//!   `sigma = dtheta / sqrt(2)`.
//!
//! The simulator plays the acquisition scenario forward in time: each
//! terminal jitters around the line of sight with its pointing error
//! while sinusoidally modulating its beam width, and a mutual
//! acquisition is recorded at the first step where both directed links
//! clear the detection floor simultaneously.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::acquisition::{single_acq_prob, TerminalSpec, Threshold};
use crate::constants::ELEMENTARY_CHARGE_C;
use crate::error::{Error, Result};
use crate::link_budget::{rx_gain, space_loss, snr_tilde_for_beam_width, SnrModel};

/// Sinusoidal beam-width modulation for one terminal:
/// `sigma(t) = sigma0 (1 + A sin(2 pi t / T + phase))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationPolicy {
    /// Center beam width \[rad\].
    pub sigma0_rad: f64,
    /// Fractional modulation depth A in [0, 1).
    pub amplitude_frac: f64,
    /// Modulation period \[s\].
    pub period_s: f64,
    /// Initial phase \[rad\]; `None` draws a fresh phase per run from the
    /// run's seeded stream.
    pub phase_rad: Option<f64>,
}

impl ModulationPolicy {
    pub fn new(
        sigma0_rad: f64,
        amplitude_frac: f64,
        period_s: f64,
        phase_rad: Option<f64>,
    ) -> Result<Self> {
        let p = Self {
            sigma0_rad,
            amplitude_frac,
            period_s,
            phase_rad,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma0_rad > 0.0) {
            return Err(Error::domain(format!(
                "modulation sigma0_rad must be > 0, got {}",
                self.sigma0_rad
            )));
        }
        if !(self.amplitude_frac >= 0.0 && self.amplitude_frac < 1.0) {
            return Err(Error::domain(format!(
                "modulation amplitude_frac must be in [0, 1), got {}",
                self.amplitude_frac
            )));
        }
        if !(self.period_s > 0.0) {
            return Err(Error::domain(format!(
                "modulation period_s must be > 0, got {}",
                self.period_s
            )));
        }
        Ok(())
    }

    fn sigma_at(&self, t_s: f64, phase: f64) -> f64 {
        self.sigma0_rad
            * (1.0
                + self.amplitude_frac
                    * (std::f64::consts::TAU * t_s / self.period_s + phase).sin())
    }
}

/// Time structure of the pointing jitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointingProcess {
    /// A fresh Gaussian draw every step.
    IidGaussian,
    /// Ornstein-Uhlenbeck jitter with the given correlation time and
    /// the terminal's pointing error as stationary standard deviation.
    OrnsteinUhlenbeck { correlation_time_s: f64 },
}

/// Monte Carlo run configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    /// Number of independent runs.
    pub runs: u32,
    /// Time step \[s\].
    pub dt_s: f64,
    /// Per-run cap \[s\]; runs that never acquire are counted, not errors.
    pub max_time_s: f64,
    /// Master seed. Run `r` uses the stream seeded with
    /// `splitmix64(seed ^ r)`, so runs are independent and the outcome
    /// does not depend on how they are scheduled.
    pub seed: u64,
    pub pointing_process: PointingProcess,
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.runs < 1 {
            return Err(Error::domain("mc runs must be >= 1".to_string()));
        }
        if !(self.dt_s > 0.0) {
            return Err(Error::domain(format!(
                "mc dt_s must be > 0, got {}",
                self.dt_s
            )));
        }
        if !(self.max_time_s >= self.dt_s) {
            return Err(Error::domain(format!(
                "mc max_time_s ({}) must be >= dt_s ({})",
                self.max_time_s, self.dt_s
            )));
        }
        if let PointingProcess::OrnsteinUhlenbeck { correlation_time_s } = self.pointing_process {
            if !(correlation_time_s > 0.0) {
                return Err(Error::domain(format!(
                    "ou correlation_time_s must be > 0, got {correlation_time_s}"
                )));
            }
        }
        Ok(())
    }
}

/// State of both terminals at the instant a run acquired.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcquisitionEvent {
    pub run_id: u32,
    pub time_s: f64,
    pub dtheta_a_rad: f64,
    pub sigma_a_rad: f64,
    pub dtheta_b_rad: f64,
    pub sigma_b_rad: f64,
}

/// Aggregate over all runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSummary {
    pub runs: u32,
    pub acquisitions: u32,
    pub acq_fraction: f64,
    /// Mean time to acquire over acquiring runs; `None` if none did.
    pub mean_time_s: Option<f64>,
}

/// Events (ordered by run id) plus the summary.
#[derive(Debug, Clone, PartialEq)]
pub struct McOutcome {
    pub events: Vec<AcquisitionEvent>,
    pub summary: McSummary,
}

/// One cell of an acquisition-probability sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub distance_m: f64,
    pub zeta_rad: f64,
    pub p_ij: f64,
}

/// Beam width at which the directed link `tx -> rx` has margin ratio
/// `Sigma = e` — the acquisition-probability optimum.
pub fn optimal_sigma_acquisition(
    tx: &TerminalSpec,
    rx: &TerminalSpec,
    distance_m: f64,
    thr: &Threshold,
) -> Result<f64> {
    tx.validate()?;
    rx.validate()?;
    let e = std::f64::consts::E;
    let ls = space_loss(tx.emitter.wavelength_m, distance_m)?;
    let grx = rx_gain(&rx.detector, tx.emitter.wavelength_m)?;
    let p0 = tx.emitter.power_w;
    match rx.snr_model {
        SnrModel::ApdElectrical => {
            let det = &rx.detector;
            Ok((p0 * ls * grx * det.responsivity_a_per_w
                / (8.0
                    * ELEMENTARY_CHARGE_C
                    * e
                    * thr.snr_star
                    * det.bandwidth_hz
                    * det.excess_noise))
                .sqrt())
        }
        SnrModel::PhotoelectronCount => {
            let qe = rx.detector.qe.ok_or_else(|| {
                Error::config("snr model PhotoelectronCount requires detector qe".to_string())
            })?;
            let rate = rx.detector.noise_electron_rate.ok_or_else(|| {
                Error::config(
                    "snr model PhotoelectronCount requires detector noise_electron_rate"
                        .to_string(),
                )
            })?;
            Ok((p0 * ls * grx * qe / (4.0 * e * thr.snr_star * rate)).sqrt())
        }
    }
}

/// Beam width that maximizes on-detector flux at a known off-pointing:
/// `dtheta / sqrt(2)`. `dtheta = 0` returns 0, the degenerate
/// tightest-beam limit.
pub fn optimal_defocus_active(offpoint_rad: f64) -> Result<f64> {
    if !(offpoint_rad >= 0.0) {
        return Err(Error::domain(format!(
            "offpoint_rad must be >= 0, got {offpoint_rad}"
        )));
    }
    Ok(offpoint_rad / std::f64::consts::SQRT_2)
}

fn directed_single_prob(
    tx: &TerminalSpec,
    rx: &TerminalSpec,
    distance_m: f64,
    thr: &Threshold,
    zeta_rad: f64,
    sigma_rad: f64,
) -> Result<f64> {
    let st = snr_tilde_for_beam_width(&tx.emitter, &rx.detector, distance_m, rx.snr_model, sigma_rad)?;
    single_acq_prob(sigma_rad, zeta_rad, st / thr.snr_star)
}

/// Mutual-acquisition probability over a distance x pointing-error
/// grid, row-major in distance. The grid `zeta` replaces the combined
/// pointing error of both terminals. With `optimize` set, each directed
/// link uses its [`optimal_sigma_acquisition`] beam width instead of
/// the hardware one.
pub fn acquisition_probability_sweep(
    a: &TerminalSpec,
    b: &TerminalSpec,
    distances_m: &[f64],
    zetas_rad: &[f64],
    thr: &Threshold,
    optimize: bool,
) -> Result<Vec<SweepPoint>> {
    if distances_m.is_empty() || zetas_rad.is_empty() {
        return Err(Error::domain(
            "sweep ranges must be non-empty".to_string(),
        ));
    }
    if let Some(d) = distances_m.iter().find(|d| !(**d > 0.0)) {
        return Err(Error::domain(format!("sweep distance must be > 0, got {d}")));
    }
    if let Some(z) = zetas_rad.iter().find(|z| !(**z > 0.0)) {
        return Err(Error::domain(format!("sweep zeta must be > 0, got {z}")));
    }
    let mut out = Vec::with_capacity(distances_m.len() * zetas_rad.len());
    for &d in distances_m {
        let sigma_a = if optimize {
            optimal_sigma_acquisition(a, b, d, thr)?
        } else {
            a.emitter.diffraction_sigma()
        };
        let sigma_b = if optimize {
            optimal_sigma_acquisition(b, a, d, thr)?
        } else {
            b.emitter.diffraction_sigma()
        };
        for &zeta in zetas_rad {
            let p_a = directed_single_prob(a, b, d, thr, zeta, sigma_a)?;
            let p_b = directed_single_prob(b, a, d, thr, zeta, sigma_b)?;
            out.push(SweepPoint {
                distance_m: d,
                zeta_rad: zeta,
                p_ij: p_a * p_b,
            });
        }
    }
    Ok(out)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct PointingSim {
    zeta: f64,
    state: f64,
    rho: f64,
    diffusion: f64,
    iid: bool,
}

impl PointingSim {
    fn init(zeta: f64, process: PointingProcess, dt: f64, rng: &mut ChaCha8Rng) -> Self {
        match process {
            PointingProcess::IidGaussian => Self {
                zeta,
                state: 0.0,
                rho: 0.0,
                diffusion: 0.0,
                iid: true,
            },
            PointingProcess::OrnsteinUhlenbeck { correlation_time_s } => {
                let rho = (-dt / correlation_time_s).exp();
                let n: f64 = rng.sample(StandardNormal);
                Self {
                    zeta,
                    state: zeta * n, // stationary start
                    rho,
                    diffusion: zeta * (1.0 - rho * rho).sqrt(),
                    iid: false,
                }
            }
        }
    }

    /// Off-pointing for the current step; advances the process.
    fn step(&mut self, first: bool, rng: &mut ChaCha8Rng) -> f64 {
        if self.iid {
            let n: f64 = rng.sample(StandardNormal);
            self.zeta * n
        } else if first {
            self.state
        } else {
            let n: f64 = rng.sample(StandardNormal);
            self.state = self.state * self.rho + self.diffusion * n;
            self.state
        }
    }
}

/// Play the two-terminal acquisition scenario `cfg.runs` times.
///
/// Per step each terminal draws its off-pointing from its process and
/// sets `sigma(t)` from its modulation policy; the first step at which
/// both directed SNRs reach the floor ends the run with an
/// [`AcquisitionEvent`]. Runs execute in parallel; the event stream is
/// ordered by run id and depends only on the seed.
pub fn run_mc_acquisition(
    a: &TerminalSpec,
    b: &TerminalSpec,
    distance_m: f64,
    thr: &Threshold,
    policy_a: &ModulationPolicy,
    policy_b: &ModulationPolicy,
    cfg: &McConfig,
) -> Result<McOutcome> {
    a.validate()?;
    b.validate()?;
    policy_a.validate()?;
    policy_b.validate()?;
    cfg.validate()?;

    // snr(sigma, dtheta) = snr1 / sigma^2 * exp(-dtheta^2 / (2 sigma^2))
    // with snr1 the no-pointing-loss SNR at unit beam width.
    let snr1_ab = snr_tilde_for_beam_width(&a.emitter, &b.detector, distance_m, b.snr_model, 1.0)?;
    let snr1_ba = snr_tilde_for_beam_width(&b.emitter, &a.detector, distance_m, a.snr_model, 1.0)?;
    let zeta_a = a.pointing.combined();
    let zeta_b = b.pointing.combined();
    let n_steps = (cfg.max_time_s / cfg.dt_s).floor() as u64;

    let snr_of = |snr1: f64, sigma: f64, dtheta: f64| {
        snr1 / (sigma * sigma) * (-dtheta * dtheta / (2.0 * sigma * sigma)).exp()
    };

    let per_run: Vec<Option<AcquisitionEvent>> = (0..cfg.runs)
        .into_par_iter()
        .map(|run_id| {
            let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(cfg.seed ^ run_id as u64));
            let phase_a = policy_a
                .phase_rad
                .unwrap_or_else(|| rng.random_range(0.0..std::f64::consts::TAU));
            let phase_b = policy_b
                .phase_rad
                .unwrap_or_else(|| rng.random_range(0.0..std::f64::consts::TAU));
            let mut point_a = PointingSim::init(zeta_a, cfg.pointing_process, cfg.dt_s, &mut rng);
            let mut point_b = PointingSim::init(zeta_b, cfg.pointing_process, cfg.dt_s, &mut rng);
            for k in 0..=n_steps {
                let t = k as f64 * cfg.dt_s;
                let da = point_a.step(k == 0, &mut rng);
                let db = point_b.step(k == 0, &mut rng);
                let sa = policy_a.sigma_at(t, phase_a);
                let sb = policy_b.sigma_at(t, phase_b);
                if snr_of(snr1_ab, sa, da) >= thr.snr_star
                    && snr_of(snr1_ba, sb, db) >= thr.snr_star
                {
                    return Some(AcquisitionEvent {
                        run_id,
                        time_s: t,
                        dtheta_a_rad: da,
                        sigma_a_rad: sa,
                        dtheta_b_rad: db,
                        sigma_b_rad: sb,
                    });
                }
            }
            None
        })
        .collect();

    let events: Vec<AcquisitionEvent> = per_run.into_iter().flatten().collect();
    let acquisitions = events.len() as u32;
    let mean_time_s = if acquisitions > 0 {
        Some(events.iter().map(|e| e.time_s).sum::<f64>() / acquisitions as f64)
    } else {
        None
    };
    Ok(McOutcome {
        summary: McSummary {
            runs: cfg.runs,
            acquisitions,
            acq_fraction: acquisitions as f64 / cfg.runs as f64,
            mean_time_s,
        },
        events,
    })
}
