//! Closed-form mutual-acquisition statistics.
//!
//! A link closes when the received SNR clears a detection floor
//! `SNR*`. With the pointing loss as the only angular dependence, the
//! largest tolerable off-pointing is
//!
//! ```text
//! dtheta_max = sqrt(2 sigma^2 ln(Sigma)),   Sigma = SNRtilde / SNR*
//! ```
//!
//! and with the off-pointing of terminal `i` Gaussian with standard
//! deviation `zeta_i`, the probability that terminal `i` is detectable
//! by its peer is `P_i = erf((sigma_i/zeta_i) sqrt(ln Sigma_i))`. The
//! mutual-acquisition probability of an independent pair is the product
//! of its two directed probabilities.
//!
//! `Sigma <= 1` means the link cannot close even on axis; the
//! probability operations return 0 there so distance sweeps cross the
//! boundary smoothly.

use crate::error::{Error, Result};
use crate::link_budget::{snr_tilde, DetectorParams, EmitterParams, SnrModel};

/// One-sigma pointing error, split into control and knowledge parts
/// that add in quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointingError {
    /// 1-sigma control error \[rad\].
    pub control_rad: f64,
    /// 1-sigma knowledge error \[rad\].
    pub knowledge_rad: f64,
}

impl PointingError {
    pub fn new(control_rad: f64, knowledge_rad: f64) -> Result<Self> {
        let p = Self {
            control_rad,
            knowledge_rad,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.control_rad >= 0.0) {
            return Err(Error::domain(format!(
                "pointing control_rad must be >= 0, got {}",
                self.control_rad
            )));
        }
        if !(self.knowledge_rad >= 0.0) {
            return Err(Error::domain(format!(
                "pointing knowledge_rad must be >= 0, got {}",
                self.knowledge_rad
            )));
        }
        Ok(())
    }

    /// Quadrature sum `sqrt(control^2 + knowledge^2)` \[rad\].
    pub fn combined(&self) -> f64 {
        self.control_rad.hypot(self.knowledge_rad)
    }
}

/// Detection floor, stored linear.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    /// Minimum SNR for detection (linear).
    pub snr_star: f64,
}

impl Threshold {
    pub fn from_linear(snr_star: f64) -> Result<Self> {
        if !(snr_star > 0.0) {
            return Err(Error::domain(format!(
                "threshold snr_star must be > 0, got {snr_star}"
            )));
        }
        Ok(Self { snr_star })
    }

    /// Build from a decibel floor, `snr_star = 10^(dB/10)`.
    pub fn from_db(snr_star_db: f64) -> Result<Self> {
        Self::from_linear(crate::constants::from_db(snr_star_db))
    }

    pub fn snr_star_db(&self) -> f64 {
        crate::constants::to_db(self.snr_star)
    }
}

/// A complete optical terminal: emitter, detector, pointing statistics
/// and the SNR model its detector is evaluated under.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerminalSpec {
    pub emitter: EmitterParams,
    pub detector: DetectorParams,
    pub pointing: PointingError,
    pub snr_model: SnrModel,
}

impl TerminalSpec {
    pub fn new(
        emitter: EmitterParams,
        detector: DetectorParams,
        pointing: PointingError,
        snr_model: SnrModel,
    ) -> Result<Self> {
        let t = Self {
            emitter,
            detector,
            pointing,
            snr_model,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        self.emitter.validate()?;
        self.detector.validate()?;
        self.pointing.validate()?;
        if self.snr_model == SnrModel::PhotoelectronCount
            && (self.detector.qe.is_none() || self.detector.noise_electron_rate.is_none())
        {
            return Err(Error::config(
                "snr model PhotoelectronCount requires detector qe and noise_electron_rate"
                    .to_string(),
            ));
        }
        Ok(())
    }
}

/// Error function `erf(x) = (2/sqrt(pi)) int_0^x exp(-t^2) dt`.
///
/// Evaluated with the scaled all-positive-terms series
/// `erf(x) = (2/sqrt(pi)) exp(-x^2) sum_n (2x^2)^n x / (2n+1)!!`,
/// which is free of cancellation; |x| >= 6 saturates to +-1 (the
/// complement is below 3e-17 there). Absolute error < 1e-15.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == 0.0 {
        return x;
    }
    let ax = x.abs();
    if ax >= 6.0 {
        return 1f64.copysign(x);
    }
    let two_x2 = 2.0 * ax * ax;
    let mut term = ax;
    let mut sum = ax;
    for n in 1..=500u32 {
        term *= two_x2 / (2.0 * n as f64 + 1.0);
        let next = sum + term;
        if next == sum {
            break;
        }
        sum = next;
    }
    // rounding can overshoot saturation by an ulp; keep the range contract
    let val = (2.0 / std::f64::consts::PI.sqrt() * (-ax * ax).exp() * sum).min(1.0);
    val.copysign(x)
}

/// Link-margin ratio `Sigma = SNRtilde / SNR*` for the directed link
/// `tx -> rx`: transmitter beam and power, receiver detector and SNR
/// model.
pub fn sigma_ratio(
    tx: &TerminalSpec,
    rx: &TerminalSpec,
    distance_m: f64,
    thr: &Threshold,
) -> Result<f64> {
    tx.validate()?;
    rx.validate()?;
    let st = snr_tilde(&tx.emitter, &rx.detector, distance_m, rx.snr_model)?;
    Ok(st / thr.snr_star)
}

/// Maximum allowable off-pointing `sqrt(2 sigma^2 ln Sigma)` \[rad\].
///
/// Returns `None` when `Sigma < 1`: the link cannot close at any
/// pointing, not even on axis.
pub fn max_offpoint(sigma_theta_rad: f64, sigma_ratio: f64) -> Result<Option<f64>> {
    if !(sigma_theta_rad > 0.0) {
        return Err(Error::domain(format!(
            "sigma_theta_rad must be > 0, got {sigma_theta_rad}"
        )));
    }
    if !(sigma_ratio > 0.0) {
        return Err(Error::domain(format!(
            "sigma_ratio must be > 0, got {sigma_ratio}"
        )));
    }
    if sigma_ratio < 1.0 {
        return Ok(None);
    }
    Ok(Some(
        sigma_theta_rad * (2.0 * sigma_ratio.ln()).sqrt(),
    ))
}

/// Probability that a single terminal with beam width `sigma_theta`
/// and Gaussian pointing error `zeta` is detectable by its peer:
/// `erf((sigma_theta/zeta) sqrt(ln Sigma))`, and 0 for `Sigma <= 1`.
pub fn single_acq_prob(sigma_theta_rad: f64, zeta_rad: f64, sigma_ratio: f64) -> Result<f64> {
    if !(sigma_theta_rad > 0.0) {
        return Err(Error::domain(format!(
            "sigma_theta_rad must be > 0, got {sigma_theta_rad}"
        )));
    }
    if !(sigma_ratio > 0.0) {
        return Err(Error::domain(format!(
            "sigma_ratio must be > 0, got {sigma_ratio}"
        )));
    }
    if zeta_rad < 0.0 || zeta_rad.is_nan() {
        return Err(Error::domain(format!(
            "zeta_rad must be >= 0, got {zeta_rad}"
        )));
    }
    if zeta_rad == 0.0 {
        // A delta-function pointing distribution contradicts the model;
        // reject instead of returning certainty.
        return Err(Error::degenerate(
            "zeta_rad = 0: pointing error distribution is degenerate".to_string(),
        ));
    }
    if sigma_ratio <= 1.0 {
        return Ok(0.0);
    }
    Ok(erf(sigma_theta_rad / zeta_rad * sigma_ratio.ln().sqrt()))
}

/// Mutual-acquisition probability of the terminal pair: the product of
/// the two directed single-terminal probabilities. Each directed link
/// `i -> j` uses emitter `i`, detector `j` under `j`'s SNR model, and
/// terminal `i`'s pointing error.
pub fn mutual_acq_prob(
    a: &TerminalSpec,
    b: &TerminalSpec,
    distance_m: f64,
    thr: &Threshold,
) -> Result<f64> {
    let sigma_ab = sigma_ratio(a, b, distance_m, thr)?;
    let sigma_ba = sigma_ratio(b, a, distance_m, thr)?;
    let p_a = single_acq_prob(
        a.emitter.diffraction_sigma(),
        a.pointing.combined(),
        sigma_ab,
    )?;
    let p_b = single_acq_prob(
        b.emitter.diffraction_sigma(),
        b.pointing.combined(),
        sigma_ba,
    )?;
    Ok(p_a * p_b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{from_db, ARCSEC_RAD, GEO_RADIUS_M};
    use crate::link_budget::{DetectorParams, EmitterParams};
    use proptest::prelude::*;

    const D_2GEO: f64 = 2.0 * GEO_RADIUS_M;

    fn table1_terminal(zeta_arcsec: f64) -> TerminalSpec {
        TerminalSpec::new(
            EmitterParams::new(2.02, 1.55e-6, 0.05).unwrap(),
            DetectorParams::new_apd(0.0025, 10.0, 0.99, 4.3, 300e6).unwrap(),
            PointingError::new(zeta_arcsec * ARCSEC_RAD, 0.0).unwrap(),
            SnrModel::ApdElectrical,
        )
        .unwrap()
    }

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs()
    }

    #[test]
    fn erf_reference_values() {
        assert_eq!(erf(0.0), 0.0);
        assert!((erf(0.5) - 0.520_499_877_813_046_5).abs() < 1e-12);
        assert!((erf(1.0) - 0.842_700_792_949_714_9).abs() < 1e-12);
        assert!((erf(2.0) - 0.995_322_265_018_952_7).abs() < 1e-12);
        assert!((erf(3.0) - 0.999_977_909_503_001_4).abs() < 1e-12);
        assert_eq!(erf(7.0), 1.0);
        assert_eq!(erf(-7.0), -1.0);
    }

    #[test]
    fn erf_matches_quadrature_of_definition() {
        // independent route: Simpson integration of (2/sqrt(pi)) exp(-t^2)
        for &x in &[0.1, 0.37, 0.9, 1.5, 2.2, 3.1, 4.5] {
            let n = 20_000;
            let h = x / n as f64;
            let f = |t: f64| (-t * t).exp();
            let mut s = f(0.0) + f(x);
            for k in 1..n {
                let t = k as f64 * h;
                s += if k % 2 == 1 { 4.0 * f(t) } else { 2.0 * f(t) };
            }
            let quad = 2.0 / std::f64::consts::PI.sqrt() * s * h / 3.0;
            assert!((erf(x) - quad).abs() < 1e-12, "x={x}");
        }
    }

    proptest! {
        #[test]
        fn erf_is_odd_and_bounded(x in -5.9f64..5.9) {
            prop_assume!(x != 0.0);
            let y = erf(x);
            prop_assert!((y + erf(-x)).abs() < 1e-15);
            prop_assert!(y.abs() <= 1.0);
            if x.abs() < 5.0 {
                // strictly inside (-1, 1) until f64 saturation
                prop_assert!(y.abs() < 1.0);
            }
        }
    }

    #[test]
    fn sigma_ratio_table1_two_geo() {
        let t = table1_terminal(1.0);
        let thr = Threshold::from_db(3.0).unwrap();
        let s = sigma_ratio(&t, &t, D_2GEO, &thr).unwrap();
        assert!(rel_close(s, 2.786_630_315_144, 1e-11), "{s}");
    }

    #[test]
    fn sigma_ratio_is_one_at_threshold() {
        let t = table1_terminal(1.0);
        let st = crate::link_budget::snr_tilde(
            &t.emitter,
            &t.detector,
            D_2GEO,
            SnrModel::ApdElectrical,
        )
        .unwrap();
        let thr = Threshold::from_linear(st).unwrap();
        let s = sigma_ratio(&t, &t, D_2GEO, &thr).unwrap();
        assert!(rel_close(s, 1.0, 1e-12));
    }

    #[test]
    fn sigma_ratio_decibel_form() {
        // 13 dB over a 3 dB floor is a margin ratio of exactly 10
        let s = from_db(13.0) / Threshold::from_db(3.0).unwrap().snr_star;
        assert!(rel_close(s, 10.0, 1e-12));
    }

    #[test]
    fn max_offpoint_table1() {
        let t = table1_terminal(1.0);
        let thr = Threshold::from_db(3.0).unwrap();
        let s = sigma_ratio(&t, &t, D_2GEO, &thr).unwrap();
        let m = max_offpoint(t.emitter.diffraction_sigma(), s)
            .unwrap()
            .unwrap();
        assert!(rel_close(m, 7.063_556_019_892e-6, 1e-11), "{m}");
    }

    #[test]
    fn max_offpoint_boundaries() {
        let s = 4.9e-6;
        assert_eq!(max_offpoint(s, 1.0).unwrap(), Some(0.0));
        assert_eq!(max_offpoint(s, 0.5).unwrap(), None);
        let at_e = max_offpoint(s, std::f64::consts::E).unwrap().unwrap();
        assert!(rel_close(at_e, std::f64::consts::SQRT_2 * s, 1e-12));
        assert!(max_offpoint(0.0, 2.0).is_err());
    }

    #[test]
    fn single_prob_table1() {
        let t = table1_terminal(1.0);
        let thr = Threshold::from_db(3.0).unwrap();
        let s = sigma_ratio(&t, &t, D_2GEO, &thr).unwrap();
        let p = single_acq_prob(t.emitter.diffraction_sigma(), ARCSEC_RAD, s).unwrap();
        assert!(rel_close(p, 0.854_873_409_916_193, 1e-11), "{p}");
    }

    #[test]
    fn single_prob_boundaries() {
        let s = 4.9e-6;
        assert_eq!(single_acq_prob(s, 1e-6, 1.0).unwrap(), 0.0);
        assert_eq!(single_acq_prob(s, 1e-6, 0.3).unwrap(), 0.0);
        // zeta -> 0+ with margin: probability approaches certainty
        let p = single_acq_prob(s, 1e-12, 2.0).unwrap();
        assert_eq!(p, 1.0);
        assert!(matches!(
            single_acq_prob(s, 0.0, 2.0),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn mutual_prob_table1_is_square_of_single() {
        let t = table1_terminal(1.0);
        let thr = Threshold::from_db(3.0).unwrap();
        let p = mutual_acq_prob(&t, &t, D_2GEO, &thr).unwrap();
        assert!(rel_close(p, 0.730_808_546_982, 1e-11), "{p}");

        let s = sigma_ratio(&t, &t, D_2GEO, &thr).unwrap();
        let single = single_acq_prob(t.emitter.diffraction_sigma(), ARCSEC_RAD, s).unwrap();
        assert_eq!(p, single * single);
    }

    #[test]
    fn mutual_prob_commutes_and_dies_beyond_margin() {
        let a = table1_terminal(0.5);
        let b = table1_terminal(2.0);
        let thr = Threshold::from_db(3.0).unwrap();
        let pab = mutual_acq_prob(&a, &b, D_2GEO, &thr).unwrap();
        let pba = mutual_acq_prob(&b, &a, D_2GEO, &thr).unwrap();
        assert_eq!(pab, pba);

        // 20 x GEO: margin ratio far below one, probability exactly zero
        let far = mutual_acq_prob(&a, &b, 20.0 * GEO_RADIUS_M, &thr).unwrap();
        assert_eq!(far, 0.0);
    }

    #[test]
    fn mutual_prob_monotonicities() {
        let thr = Threshold::from_db(3.0).unwrap();
        let base = table1_terminal(1.0);
        let p0 = mutual_acq_prob(&base, &base, D_2GEO, &thr).unwrap();

        // farther or shakier never helps
        let farther = mutual_acq_prob(&base, &base, 1.2 * D_2GEO, &thr).unwrap();
        assert!(farther < p0);
        let shakier = table1_terminal(1.5);
        assert!(mutual_acq_prob(&shakier, &shakier, D_2GEO, &thr).unwrap() < p0);
        let mixed = mutual_acq_prob(&base, &shakier, D_2GEO, &thr).unwrap();
        assert!(mixed < p0);

        // more power or a bigger aperture never hurts
        let mut strong = base;
        strong.emitter.power_w *= 2.0;
        assert!(mutual_acq_prob(&strong, &strong, D_2GEO, &thr).unwrap() > p0);
        let mut wide = base;
        wide.detector.area_m2 *= 2.0;
        assert!(mutual_acq_prob(&wide, &wide, D_2GEO, &thr).unwrap() > p0);
    }

    #[test]
    fn pointing_error_quadrature() {
        let p = PointingError::new(3.0, 4.0).unwrap();
        assert_eq!(p.combined(), 5.0);
        let q = PointingError::new(4.0, 3.0).unwrap();
        assert_eq!(p.combined(), q.combined());
        assert_eq!(PointingError::new(7.0, 0.0).unwrap().combined(), 7.0);
        assert!(PointingError::new(-1.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn combined_dominates_components(c in 0.0f64..1e-3, k in 0.0f64..1e-3) {
            let p = PointingError { control_rad: c, knowledge_rad: k };
            prop_assert!(p.combined() >= c.max(k));
            prop_assert!(p.combined() <= c + k + 1e-18);
        }

        #[test]
        fn single_prob_monotone_in_margin(
            sigma in 1e-7f64..1e-4,
            zeta in 1e-7f64..1e-4,
            s1 in 1.01f64..1e3,
            factor in 1.1f64..10.0,
        ) {
            let p1 = single_acq_prob(sigma, zeta, s1).unwrap();
            let p2 = single_acq_prob(sigma, zeta, s1 * factor).unwrap();
            prop_assert!(p2 >= p1);
            if p1 < 1.0 - 1e-12 {
                // strict until erf saturates
                prop_assert!(p2 > p1);
            }
        }
    }

    #[test]
    fn threshold_round_trip() {
        let t = Threshold::from_db(3.0).unwrap();
        assert!(rel_close(t.snr_star, 1.995_262_314_969, 1e-12));
        assert!(rel_close(t.snr_star_db(), 3.0, 1e-12));
        assert!(Threshold::from_linear(0.0).is_err());
    }
}
