//! Physical constants and unit conversions.
//!
//! Everything in the crate is SI (m, W, Hz, rad, s, K). The conversion
//! constants below exist so that front-ends can accept the units common
//! in the field (arcseconds, astronomical units, GEO multiples) and
//! convert exactly once at the boundary.

/// Elementary charge \[C\] (exact, 2019 SI).
pub const ELEMENTARY_CHARGE_C: f64 = 1.602_176_634e-19;

/// Boltzmann constant \[J/K\] (exact, 2019 SI).
pub const BOLTZMANN_J_PER_K: f64 = 1.380_649e-23;

/// Heliocentric gravitational parameter GM_sun \[m^3/s^2\].
pub const GM_SUN_M3_S2: f64 = 1.327_124_400_18e20;

/// Astronomical unit \[m\] (IAU 2012 definition).
pub const AU_M: f64 = 1.495_978_707e11;

/// Geostationary orbital radius \[m\], used as a distance yardstick.
pub const GEO_RADIUS_M: f64 = 4.2164e7;

/// One arcsecond \[rad\].
pub const ARCSEC_RAD: f64 = std::f64::consts::PI / (180.0 * 3600.0);

/// Linear power ratio to decibels, `10 log10(x)`.
#[inline]
pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Decibels to linear power ratio, `10^(dB/10)`.
#[inline]
pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn db_round_trip() {
        for x in [1e-12, 0.5, 1.0, 3.0, 5.56, 1e9] {
            let rel = (from_db(to_db(x)) - x).abs() / x;
            assert!(rel < 1e-12, "round trip failed for {x}: rel {rel}");
        }
    }

    #[test]
    fn db_of_unity_is_zero() {
        assert_eq!(to_db(1.0), 0.0);
    }

    #[test]
    fn arcsec_is_about_4_85_microrad() {
        assert!((ARCSEC_RAD - 4.848_136_811e-6).abs() < 1e-14);
    }
}
