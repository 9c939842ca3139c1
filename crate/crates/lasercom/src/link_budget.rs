//! Gaussian-beam link budget for optical beacon terminals.
//!
//! The received power decomposes into four dimensionless factors in the
//! style of a radio link budget:
//!
//! ```text
//! P_Rx = P0 * L_s * G_Tx * G_Rx * L_p
//!
//! L_s  = lambda^2 / (4 pi d^2)            (space loss)
//! G_Tx = pi^2 w0^2 / lambda^2 = 1/(4 s^2) (Tx gain, s = diffraction sigma)
//! G_Rx = 4 A_det / lambda^2               (Rx gain)
//! L_p  = exp(-dtheta^2 / (2 s^2))         (pointing loss)
//! ```
//!
//! with `s = lambda / (2 pi w0)` the diffraction spreading of the beam.
//! Two signal-to-noise models are supported on top of the received
//! power: the APD electrical SNR `P_Rx R_PD / (2 q B F_EN)` and a
//! photoelectron-count SNR `P_Rx QE / n_e`.
//!
//! All functions are pure and all quantities SI.

use crate::constants::{to_db, ELEMENTARY_CHARGE_C};
use crate::error::{Error, Result};

/// Laser emitter parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmitterParams {
    /// Emitted optical power \[W\].
    pub power_w: f64,
    /// Wavelength \[m\].
    pub wavelength_m: f64,
    /// Beam radius at the emission point \[m\].
    pub waist_m: f64,
}

impl EmitterParams {
    /// Validate and build. Requires strictly positive fields and
    /// `wavelength < waist` (far-field Gaussian optics).
    pub fn new(power_w: f64, wavelength_m: f64, waist_m: f64) -> Result<Self> {
        let e = Self {
            power_w,
            wavelength_m,
            waist_m,
        };
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.power_w > 0.0) {
            return Err(Error::domain(format!(
                "emitter power_w must be > 0, got {}",
                self.power_w
            )));
        }
        if !(self.wavelength_m > 0.0) {
            return Err(Error::domain(format!(
                "emitter wavelength_m must be > 0, got {}",
                self.wavelength_m
            )));
        }
        if !(self.waist_m > 0.0) {
            return Err(Error::domain(format!(
                "emitter waist_m must be > 0, got {}",
                self.waist_m
            )));
        }
        if self.wavelength_m >= self.waist_m {
            return Err(Error::domain(format!(
                "wavelength_m ({}) must be smaller than waist_m ({}) for the far-field beam model",
                self.wavelength_m, self.waist_m
            )));
        }
        Ok(())
    }

    /// Diffraction spreading `lambda / (2 pi w0)` \[rad\].
    pub fn diffraction_sigma(&self) -> f64 {
        self.wavelength_m / (2.0 * std::f64::consts::PI * self.waist_m)
    }
}

/// Photodetector parameters: aperture plus APD noise chain, with an
/// optional photoelectron model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorParams {
    /// Collecting area \[m^2\].
    pub area_m2: f64,
    /// APD gain M (dimensionless, >= 1). Carried for completeness; the
    /// electrical SNR below does not depend on it.
    pub apd_gain: f64,
    /// Photodiode responsivity \[A/W\].
    pub responsivity_a_per_w: f64,
    /// Excess noise factor F_EN (dimensionless, >= 1).
    pub excess_noise: f64,
    /// Noise equivalent bandwidth \[Hz\].
    pub bandwidth_hz: f64,
    /// Quantum efficiency in (0, 1], required by the photoelectron model.
    pub qe: Option<f64>,
    /// Noise electron rate \[e-/s\], required by the photoelectron model.
    pub noise_electron_rate: Option<f64>,
}

impl DetectorParams {
    /// APD detector without the optional photoelectron model.
    pub fn new_apd(
        area_m2: f64,
        apd_gain: f64,
        responsivity_a_per_w: f64,
        excess_noise: f64,
        bandwidth_hz: f64,
    ) -> Result<Self> {
        let d = Self {
            area_m2,
            apd_gain,
            responsivity_a_per_w,
            excess_noise,
            bandwidth_hz,
            qe: None,
            noise_electron_rate: None,
        };
        d.validate()?;
        Ok(d)
    }

    /// Attach the photoelectron model parameters.
    pub fn with_photoelectron_model(mut self, qe: f64, noise_electron_rate: f64) -> Result<Self> {
        self.qe = Some(qe);
        self.noise_electron_rate = Some(noise_electron_rate);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.area_m2 > 0.0) {
            return Err(Error::domain(format!(
                "detector area_m2 must be > 0, got {}",
                self.area_m2
            )));
        }
        if !(self.apd_gain >= 1.0) {
            return Err(Error::domain(format!(
                "detector apd_gain must be >= 1, got {}",
                self.apd_gain
            )));
        }
        if !(self.responsivity_a_per_w > 0.0) {
            return Err(Error::domain(format!(
                "detector responsivity_a_per_w must be > 0, got {}",
                self.responsivity_a_per_w
            )));
        }
        if !(self.excess_noise >= 1.0) {
            return Err(Error::domain(format!(
                "detector excess_noise must be >= 1, got {}",
                self.excess_noise
            )));
        }
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::domain(format!(
                "detector bandwidth_hz must be > 0, got {}",
                self.bandwidth_hz
            )));
        }
        if let Some(qe) = self.qe {
            if !(qe > 0.0 && qe <= 1.0) {
                return Err(Error::domain(format!(
                    "detector qe must be in (0, 1], got {qe}"
                )));
            }
        }
        if let Some(rate) = self.noise_electron_rate {
            if !(rate > 0.0) {
                return Err(Error::domain(format!(
                    "detector noise_electron_rate must be > 0, got {rate}"
                )));
            }
        }
        Ok(())
    }
}

/// Which SNR definition to apply to the received power.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnrModel {
    /// `SNR = P_Rx R_PD / (2 q B F_EN)`.
    ApdElectrical,
    /// `SNR = P_Rx QE / n_e`; requires `qe` and `noise_electron_rate`.
    PhotoelectronCount,
}

/// Geometry of one directed link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkState {
    /// Inter-terminal distance \[m\].
    pub distance_m: f64,
    /// Angular displacement of the receiver from the beam center line \[rad\].
    /// The beam is symmetric, so only the magnitude matters.
    pub offpoint_rad: f64,
}

impl LinkState {
    pub fn new(distance_m: f64, offpoint_rad: f64) -> Result<Self> {
        let l = Self {
            distance_m,
            offpoint_rad,
        };
        l.validate()?;
        Ok(l)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.distance_m > 0.0) {
            return Err(Error::domain(format!(
                "link distance_m must be > 0, got {}",
                self.distance_m
            )));
        }
        if !(self.offpoint_rad >= 0.0) {
            return Err(Error::domain(format!(
                "link offpoint_rad must be >= 0, got {}",
                self.offpoint_rad
            )));
        }
        Ok(())
    }
}

/// The four link-budget factors and the received power they produce.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    /// Space loss [-], in (0, 1).
    pub space_loss: f64,
    /// Transmitter gain [-].
    pub tx_gain: f64,
    /// Receiver gain [-].
    pub rx_gain: f64,
    /// Pointing loss [-], in (0, 1].
    pub pointing_loss: f64,
    /// `P0 * L_s * G_Tx * G_Rx * L_p` \[W\].
    pub received_power_w: f64,
}

impl LinkBudget {
    pub fn space_loss_db(&self) -> f64 {
        to_db(self.space_loss)
    }
    pub fn tx_gain_db(&self) -> f64 {
        to_db(self.tx_gain)
    }
    pub fn rx_gain_db(&self) -> f64 {
        to_db(self.rx_gain)
    }
    pub fn pointing_loss_db(&self) -> f64 {
        to_db(self.pointing_loss)
    }
    /// Received power referenced to 1 W \[dBW\].
    pub fn received_power_dbw(&self) -> f64 {
        to_db(self.received_power_w)
    }
}

// Far-field guard: the w ~ sigma*d spreading approximation needs the
// receiver to sit well beyond the waist.
const FAR_FIELD_WAIST_MULTIPLE: f64 = 100.0;

fn check_far_field(e: &EmitterParams, distance_m: f64) -> Result<()> {
    if distance_m <= FAR_FIELD_WAIST_MULTIPLE * e.waist_m {
        return Err(Error::domain(format!(
            "distance_m ({}) must exceed {FAR_FIELD_WAIST_MULTIPLE} x waist_m ({}) for the far-field model",
            distance_m, e.waist_m
        )));
    }
    Ok(())
}

/// Diffraction spreading `lambda / (2 pi w0)` \[rad\] of a validated emitter.
pub fn diffraction_sigma(e: &EmitterParams) -> Result<f64> {
    e.validate()?;
    Ok(e.diffraction_sigma())
}

/// Space loss `lambda^2 / (4 pi d^2)`.
pub fn space_loss(wavelength_m: f64, distance_m: f64) -> Result<f64> {
    if !(wavelength_m > 0.0) {
        return Err(Error::domain(format!(
            "wavelength_m must be > 0, got {wavelength_m}"
        )));
    }
    if !(distance_m > 0.0) {
        return Err(Error::domain(format!(
            "distance_m must be > 0, got {distance_m}"
        )));
    }
    Ok(wavelength_m * wavelength_m / (4.0 * std::f64::consts::PI * distance_m * distance_m))
}

/// Transmitter gain `pi^2 w0^2 / lambda^2`, identically `1/(4 sigma^2)`
/// for the diffraction spreading sigma.
pub fn tx_gain(e: &EmitterParams) -> Result<f64> {
    e.validate()?;
    let pi = std::f64::consts::PI;
    Ok(pi * pi * e.waist_m * e.waist_m / (e.wavelength_m * e.wavelength_m))
}

/// Transmitter gain `1/(4 sigma^2)` for an explicitly chosen beam
/// width, the design variable of beam-width modulation.
pub fn tx_gain_for_beam_width(sigma_rad: f64) -> Result<f64> {
    if !(sigma_rad > 0.0) {
        return Err(Error::domain(format!(
            "sigma_rad must be > 0, got {sigma_rad}"
        )));
    }
    Ok(1.0 / (4.0 * sigma_rad * sigma_rad))
}

/// Receiver gain `4 A_det / lambda^2`.
pub fn rx_gain(det: &DetectorParams, wavelength_m: f64) -> Result<f64> {
    det.validate()?;
    if !(wavelength_m > 0.0) {
        return Err(Error::domain(format!(
            "wavelength_m must be > 0, got {wavelength_m}"
        )));
    }
    Ok(4.0 * det.area_m2 / (wavelength_m * wavelength_m))
}

/// Pointing loss `exp(-dtheta^2 / (2 sigma^2))`.
pub fn pointing_loss(offpoint_rad: f64, sigma_rad: f64) -> Result<f64> {
    if !(sigma_rad > 0.0) {
        return Err(Error::domain(format!(
            "sigma_rad must be > 0, got {sigma_rad}"
        )));
    }
    Ok((-offpoint_rad * offpoint_rad / (2.0 * sigma_rad * sigma_rad)).exp())
}

/// Full budget for one directed link. The factors in the returned
/// [`LinkBudget`] multiply back to `received_power_w` exactly.
pub fn received_power(
    e: &EmitterParams,
    det: &DetectorParams,
    link: &LinkState,
) -> Result<LinkBudget> {
    link.validate()?;
    check_far_field(e, link.distance_m)?;
    let ls = space_loss(e.wavelength_m, link.distance_m)?;
    let gtx = tx_gain(e)?;
    let grx = rx_gain(det, e.wavelength_m)?;
    let lp = pointing_loss(link.offpoint_rad, e.diffraction_sigma())?;
    Ok(LinkBudget {
        space_loss: ls,
        tx_gain: gtx,
        rx_gain: grx,
        pointing_loss: lp,
        received_power_w: e.power_w * ls * gtx * grx * lp,
    })
}

fn snr_from_power(received_power_w: f64, det: &DetectorParams, model: SnrModel) -> Result<f64> {
    match model {
        SnrModel::ApdElectrical => Ok(received_power_w * det.responsivity_a_per_w
            / (2.0 * ELEMENTARY_CHARGE_C * det.bandwidth_hz * det.excess_noise)),
        SnrModel::PhotoelectronCount => {
            let qe = det.qe.ok_or_else(|| {
                Error::config("snr model PhotoelectronCount requires detector qe".to_string())
            })?;
            let rate = det.noise_electron_rate.ok_or_else(|| {
                Error::config(
                    "snr model PhotoelectronCount requires detector noise_electron_rate"
                        .to_string(),
                )
            })?;
            Ok(received_power_w * qe / rate)
        }
    }
}

/// Signal-to-noise ratio (linear) of one directed link. Use
/// [`crate::constants::to_db`] for the decibel view.
pub fn snr(
    e: &EmitterParams,
    det: &DetectorParams,
    link: &LinkState,
    model: SnrModel,
) -> Result<f64> {
    let budget = received_power(e, det, link)?;
    snr_from_power(budget.received_power_w, det, model)
}

/// SNR with pointing loss forced to one (the on-axis ceiling).
pub fn snr_tilde(
    e: &EmitterParams,
    det: &DetectorParams,
    distance_m: f64,
    model: SnrModel,
) -> Result<f64> {
    snr(
        e,
        det,
        &LinkState {
            distance_m,
            offpoint_rad: 0.0,
        },
        model,
    )
}

/// No-pointing-loss SNR for an explicitly chosen beam width: the
/// emitter's wavelength and power are kept, but `G_Tx = 1/(4 sigma^2)`
/// replaces the hardware transmitter gain.
pub fn snr_tilde_for_beam_width(
    e: &EmitterParams,
    det: &DetectorParams,
    distance_m: f64,
    model: SnrModel,
    sigma_rad: f64,
) -> Result<f64> {
    e.validate()?;
    check_far_field(e, distance_m)?;
    let ls = space_loss(e.wavelength_m, distance_m)?;
    let gtx = tx_gain_for_beam_width(sigma_rad)?;
    let grx = rx_gain(det, e.wavelength_m)?;
    snr_from_power(e.power_w * ls * gtx * grx, det, model)
}
