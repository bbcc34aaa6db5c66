//! Unit conversions used at the presentation and configuration boundaries.

/// Nominal propagation speed. 30 GHz maps to a 1 cm wavelength exactly.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Linear values below this print as zero with a `-inf` dB field.
pub const DB_FLOOR: f64 = 1e-300;

pub fn wavelength_from_ghz(freq_ghz: f64) -> f64 {
    SPEED_OF_LIGHT / (freq_ghz * 1e9)
}

pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thirty_ghz_is_one_centimetre() {
        assert_eq!(wavelength_from_ghz(30.0), 0.01);
    }

    #[test]
    fn db_round_trip() {
        assert_eq!(from_db(50.0), 1e5);
        assert!((to_db(from_db(-13.7)) + 13.7).abs() < 1e-12);
    }
}
