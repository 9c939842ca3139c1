//! Attitude-knowledge error from gyro/star-tracker fusion.
//!
//! A single-axis two-state Kalman filter (attitude plus gyro bias)
//! propagates with the gyro between star-tracker updates. Its
//! steady-state covariance is found by iterating the discrete Riccati
//! recursion to a fixed point:
//!
//! ```text
//! propagate: P <- F P F' + diag(arw^2 dt, rrw^2 dt),  F = [[1, -dt], [0, 1]]
//! update:    P <- P - P h (h' P h + noise^2)^-1 h' P,  h = [1, 0]
//! ```
//!
//! The square root of the converged attitude variance is the knowledge
//! part of the pointing error. A separate thermomechanical model gives
//! the noise floor of a MEMS gyro as a function of temperature and
//! quality factor.

use crate::acquisition::PointingError;
use crate::constants::BOLTZMANN_J_PER_K;
use crate::error::{Error, Result};

/// Gyro noise densities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GyroParams {
    /// Angle random walk \[rad/sqrt(s)\].
    pub arw: f64,
    /// Rate random walk \[rad/s^(3/2)\].
    pub rrw: f64,
}

impl GyroParams {
    pub fn new(arw: f64, rrw: f64) -> Result<Self> {
        let g = Self { arw, rrw };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.arw >= 0.0) || !(self.rrw >= 0.0) {
            return Err(Error::domain(format!(
                "gyro noise densities must be >= 0, got arw {} rrw {}",
                self.arw, self.rrw
            )));
        }
        if self.arw == 0.0 && self.rrw == 0.0 {
            return Err(Error::domain(
                "gyro arw and rrw cannot both be zero".to_string(),
            ));
        }
        Ok(())
    }
}

/// Star-tracker measurement noise and cadence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarTrackerParams {
    /// 1-sigma single-measurement error \[rad\].
    pub noise_rad: f64,
    /// Update interval \[s\].
    pub cadence_s: f64,
}

impl StarTrackerParams {
    pub fn new(noise_rad: f64, cadence_s: f64) -> Result<Self> {
        let st = Self {
            noise_rad,
            cadence_s,
        };
        st.validate()?;
        Ok(st)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.noise_rad > 0.0) {
            return Err(Error::domain(format!(
                "star tracker noise_rad must be > 0, got {}",
                self.noise_rad
            )));
        }
        if !(self.cadence_s > 0.0) {
            return Err(Error::domain(format!(
                "star tracker cadence_s must be > 0, got {}",
                self.cadence_s
            )));
        }
        Ok(())
    }
}

/// Physical parameters of a vibratory MEMS gyro for the thermal model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemsThermalParams {
    pub temperature_k: f64,
    pub quality_factor: f64,
    pub proof_mass_kg: f64,
    pub drive_amplitude_m: f64,
    pub resonant_freq_rad_s: f64,
    /// Dimensionless angular-gain scale factor.
    pub angular_gain: f64,
}

impl MemsThermalParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("temperature_k", self.temperature_k),
            ("quality_factor", self.quality_factor),
            ("proof_mass_kg", self.proof_mass_kg),
            ("drive_amplitude_m", self.drive_amplitude_m),
            ("resonant_freq_rad_s", self.resonant_freq_rad_s),
            ("angular_gain", self.angular_gain),
        ] {
            if !(v > 0.0) {
                return Err(Error::domain(format!("mems {name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }
}

const RICCATI_REL_TOL: f64 = 1e-12;
const RICCATI_MAX_ROUNDS: u32 = 256;

type Mat2 = [[f64; 2]; 2];

fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

fn add2(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] + b[0][0], a[0][1] + b[0][1]],
        [a[1][0] + b[1][0], a[1][1] + b[1][1]],
    ]
}

fn t2(a: &Mat2) -> Mat2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

fn inv2(a: &Mat2) -> Option<Mat2> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    Some([
        [a[1][1] / det, -a[0][1] / det],
        [-a[1][0] / det, a[0][0] / det],
    ])
}

/// Steady state of the covariance recursion
/// `X <- F (X - X h h' X / (h' X h + r)) F' + Q` by repeated squaring
/// of the recursion map (each round composes the map with itself, so
/// round `k` is `2^k` filter cycles). The squaring converges
/// quadratically even when the bias state is only weakly observable, a
/// regime where cycling one update at a time creeps for ~1e9 cycles
/// and stalls any per-update stopping rule.
fn riccati_steady_state(q1: f64, q2: f64, r: f64, dt: f64) -> Result<f64> {
    // map parametrization M(X) = H + E X (I + G X)^-1 E', squared via
    // the structure-preserving doubling recursion
    let mut e: Mat2 = [[1.0, -dt], [0.0, 1.0]]; // F
    let mut g: Mat2 = [[1.0 / r, 0.0], [0.0, 0.0]]; // h h' / r
    let mut h: Mat2 = [[q1, 0.0], [0.0, q2]]; // Q
    let ident: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

    let mut prev = h[0][0];
    for _ in 0..RICCATI_MAX_ROUNDS {
        // w = (I + G H)^-1; (I + H G)^-1 is its transpose
        let w = inv2(&add2(&ident, &mul2(&g, &h))).ok_or_else(|| {
            Error::Numerical("attitude covariance doubling produced a singular pivot".to_string())
        })?;
        let new_e = mul2(&mul2(&e, &t2(&w)), &e);
        let new_g = add2(&g, &mul2(&t2(&e), &mul2(&w, &mul2(&g, &e))));
        let new_h = add2(&h, &mul2(&e, &mul2(&h, &mul2(&w, &t2(&e)))));
        e = new_e;
        g = new_g;
        h = new_h;
        let x00 = h[0][0];
        let change = (x00 - prev).abs();
        // E is the composed map's dependence on the starting
        // covariance; a weakly observable bias mode keeps its diagonal
        // near one long after the attitude entry has gone quiet, and
        // its future contribution is not in H yet. Accept the fixed
        // point only once that dependence is dead too.
        let contracted = e[0][0].abs() < 1e-16 && e[1][1].abs() < 1e-16;
        if change == 0.0 || (change < RICCATI_REL_TOL * x00 && contracted) {
            // posterior attitude variance from the a priori fixed point
            return Ok((x00 * r / (x00 + r)).sqrt());
        }
        prev = x00;
    }
    Err(Error::Numerical(format!(
        "attitude covariance recursion did not converge within {RICCATI_MAX_ROUNDS} doubling rounds"
    )))
}

/// Steady-state 1-sigma attitude knowledge error \[rad\] of the
/// gyro/star-tracker filter.
pub fn steady_state_knowledge_error(g: &GyroParams, st: &StarTrackerParams) -> Result<f64> {
    g.validate()?;
    st.validate()?;
    let dt = st.cadence_s;
    let q1 = g.arw * g.arw * dt;
    let q2 = g.rrw * g.rrw * dt;
    let r = st.noise_rad * st.noise_rad;
    riccati_steady_state(q1, q2, r, dt)
}

/// Knowledge error over the Cartesian product of gyro and tracker
/// candidates, row-major in the gyro list.
pub fn knowledge_error_grid(
    gyros: &[GyroParams],
    trackers: &[StarTrackerParams],
) -> Result<Vec<Vec<f64>>> {
    if gyros.is_empty() || trackers.is_empty() {
        return Err(Error::domain(
            "knowledge error grid needs at least one gyro and one tracker".to_string(),
        ));
    }
    gyros
        .iter()
        .map(|g| {
            trackers
                .iter()
                .map(|st| steady_state_knowledge_error(g, st))
                .collect()
        })
        .collect()
}

/// Thermomechanical rate-noise floor of a vibratory MEMS gyro
/// \[rad/s/sqrt(Hz)\]:
///
/// ```text
/// arw = sqrt(4 k_B T w0 / (m Q)) / (2 kappa x_d w0)
/// ```
///
/// Scales as `sqrt(T/Q)` and `1/sqrt(m)`.
pub fn mems_thermal_arw(p: &MemsThermalParams) -> Result<f64> {
    p.validate()?;
    let brownian_force = (4.0 * BOLTZMANN_J_PER_K * p.temperature_k * p.resonant_freq_rad_s
        / (p.proof_mass_kg * p.quality_factor))
        .sqrt();
    Ok(brownian_force / (2.0 * p.angular_gain * p.drive_amplitude_m * p.resonant_freq_rad_s))
}

/// Combine control and knowledge errors in quadrature into a
/// [`PointingError`].
pub fn combined_pointing_error(control_rad: f64, knowledge_rad: f64) -> Result<PointingError> {
    PointingError::new(control_rad, knowledge_rad)
}
