//! Line-of-sight near-field channel vectors and receive-beamforming SNR.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{invalid, require_positive, Error, Result};
use crate::geometry::{ArcArrayGeometry, UlaArrayGeometry, UserLocation};
use crate::units::from_db;

/// Transmit power, noise and reference gain, reduced to the reference SNR
/// γ̄₀ = P β₀ / σ².
#[derive(Debug, Clone, PartialEq)]
pub struct LinkBudget {
    wavelength: f64,
    gamma0_bar: f64,
    power: Option<f64>,
    noise_power: Option<f64>,
    reference_gain: Option<f64>,
}

impl LinkBudget {
    pub fn from_components(
        power: f64,
        noise_power: f64,
        reference_gain: f64,
        wavelength: f64,
    ) -> Result<Self> {
        require_positive("power", power)?;
        require_positive("noise_power", noise_power)?;
        require_positive("reference_gain", reference_gain)?;
        require_positive("wavelength", wavelength)?;
        Ok(Self {
            wavelength,
            gamma0_bar: power * reference_gain / noise_power,
            power: Some(power),
            noise_power: Some(noise_power),
            reference_gain: Some(reference_gain),
        })
    }

    /// Link budget known only through its reference SNR. Channel entries then
    /// use unit reference gain; the SNR does not depend on that choice.
    pub fn from_reference_snr(gamma0_bar: f64, wavelength: f64) -> Result<Self> {
        require_positive("gamma0_bar", gamma0_bar)?;
        require_positive("wavelength", wavelength)?;
        Ok(Self {
            wavelength,
            gamma0_bar,
            power: None,
            noise_power: None,
            reference_gain: None,
        })
    }

    pub fn from_reference_snr_db(gamma0_bar_db: f64, wavelength: f64) -> Result<Self> {
        if !gamma0_bar_db.is_finite() {
            return Err(invalid("gamma0_bar_db", "must be finite"));
        }
        Self::from_reference_snr(from_db(gamma0_bar_db), wavelength)
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn gamma0_bar(&self) -> f64 {
        self.gamma0_bar
    }

    pub fn power(&self) -> Option<f64> {
        self.power
    }

    pub fn noise_power(&self) -> Option<f64> {
        self.noise_power
    }

    /// β₀ as stored in channel entries (1 when only γ̄₀ was given).
    pub fn reference_gain(&self) -> f64 {
        self.reference_gain.unwrap_or(1.0)
    }
}

/// Channel entries `√β₀ / r_m · exp(-j 2π r_m / λ)` in antenna index order.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector {
    entries: Vec<Complex64>,
}

impl ChannelVector {
    pub fn from_entries(entries: Vec<Complex64>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry for the signed antenna index `m`.
    pub fn get(&self, m: i64) -> Option<Complex64> {
        let half = (self.entries.len() as i64 - 1) / 2;
        usize::try_from(m + half)
            .ok()
            .and_then(|i| self.entries.get(i))
            .copied()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }
}

/// Unit-norm receive combiner.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformingVector {
    entries: Vec<Complex64>,
}

impl BeamformingVector {
    /// Normalizes `entries` to unit Euclidean norm.
    pub fn normalized(entries: Vec<Complex64>) -> Result<Self> {
        let norm = entries.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroChannel);
        }
        Ok(Self {
            entries: entries.into_iter().map(|e| e / norm).collect(),
        })
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.entries
            .iter()
            .map(Complex64::norm_sqr)
            .sum::<f64>()
            .sqrt()
    }
}

/// Propagation phase -2π r / λ, reduced modulo 2π before scaling.
fn propagation_phase(distance: f64, wavelength: f64) -> f64 {
    let cycles = distance / wavelength;
    -TAU * (cycles - cycles.floor())
}

fn channel_entry(distance: f64, amplitude: f64, wavelength: f64) -> Complex64 {
    Complex64::from_polar(amplitude / distance, propagation_phase(distance, wavelength))
}

fn ensure_outside(geom: &ArcArrayGeometry, user: &UserLocation) -> Result<()> {
    let g = geom.user_arc_coords(user).g;
    if g > geom.radius() {
        Ok(())
    } else {
        Err(Error::UserInsideArc {
            g,
            radius: geom.radius(),
        })
    }
}

pub fn channel_vector(
    geom: &ArcArrayGeometry,
    user: &UserLocation,
    link: &LinkBudget,
) -> Result<ChannelVector> {
    ensure_outside(geom, user)?;
    let amplitude = link.reference_gain().sqrt();
    let entries = geom
        .distances(user)
        .into_iter()
        .map(|r| channel_entry(r, amplitude, link.wavelength()))
        .collect();
    Ok(ChannelVector { entries })
}

/// Channel of the linear baseline; fails if the user sits on an antenna.
pub fn ula_channel_vector(
    ula: &UlaArrayGeometry,
    user: &UserLocation,
    link: &LinkBudget,
) -> Result<ChannelVector> {
    let amplitude = link.reference_gain().sqrt();
    let distances = ula.distances(user);
    if distances.iter().any(|&r| r <= 0.0) {
        return Err(invalid("user", "coincides with an antenna"));
    }
    let entries = distances
        .into_iter()
        .map(|r| channel_entry(r, amplitude, link.wavelength()))
        .collect();
    Ok(ChannelVector { entries })
}

/// Maximum ratio combiner v = b / ‖b‖.
pub fn mrc_beamformer(channel: &ChannelVector) -> Result<BeamformingVector> {
    BeamformingVector::normalized(channel.entries.clone())
}

/// γ = (P/σ²) |vᴴ h|² written as γ̄₀ |vᴴ b|² / β₀, since b already carries √β₀.
pub fn snr_with_beamformer(
    combiner: &BeamformingVector,
    channel: &ChannelVector,
    link: &LinkBudget,
) -> Result<f64> {
    if combiner.len() != channel.len() {
        return Err(Error::DimensionMismatch {
            left: combiner.len(),
            right: channel.len(),
        });
    }
    let inner: Complex64 = combiner
        .entries
        .iter()
        .zip(&channel.entries)
        .map(|(v, b)| v.conj() * b)
        .sum();
    Ok(link.gamma0_bar() * inner.norm_sqr() / link.reference_gain())
}

fn inverse_square_sum(distances: impl IntoIterator<Item = f64>) -> f64 {
    distances.into_iter().map(|r| 1.0 / (r * r)).sum()
}

/// MRC SNR by direct summation, γ̄₀ Σ 1/r_m².
pub fn mrc_snr_direct(
    geom: &ArcArrayGeometry,
    user: &UserLocation,
    link: &LinkBudget,
) -> Result<f64> {
    ensure_outside(geom, user)?;
    Ok(link.gamma0_bar() * inverse_square_sum(geom.distances(user)))
}

pub fn mrc_snr_direct_ula(
    ula: &UlaArrayGeometry,
    user: &UserLocation,
    link: &LinkBudget,
) -> Result<f64> {
    let distances = ula.distances(user);
    if distances.iter().any(|&r| r <= 0.0) {
        return Err(invalid("user", "coincides with an antenna"));
    }
    Ok(link.gamma0_bar() * inverse_square_sum(distances))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const LAMBDA: f64 = 0.01;

    fn link() -> LinkBudget {
        LinkBudget::from_reference_snr(1e5, LAMBDA).unwrap()
    }

    fn random_unit(rng: &mut ChaCha8Rng, len: usize) -> BeamformingVector {
        let entries = (0..len)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        BeamformingVector::normalized(entries).unwrap()
    }

    #[test]
    fn link_budget_reference_snr() {
        let lb = LinkBudget::from_components(2.0, 1e-9, 1e-4, LAMBDA).unwrap();
        assert_relative_eq!(lb.gamma0_bar(), 2e5, max_relative = 1e-15);
        assert_eq!(LinkBudget::from_reference_snr_db(50.0, LAMBDA).unwrap().gamma0_bar(), 1e5);
        assert!(LinkBudget::from_components(0.0, 1.0, 1.0, LAMBDA).is_err());
    }

    #[test]
    fn single_antenna_channel() {
        let geom = ArcArrayGeometry::single_element(10.0, 2.0, LAMBDA).unwrap();
        let lb = LinkBudget::from_components(1.0, 1.0, 4e-6, LAMBDA).unwrap();
        let user = UserLocation::new(20.0, 0.0).unwrap();
        let b = channel_vector(&geom, &user, &lb).unwrap();
        assert_eq!(b.len(), 1);
        assert_relative_eq!(b.entries()[0].norm(), 2e-3 / 18.0, max_relative = 1e-14);
        assert_relative_eq!(
            mrc_snr_direct(&geom, &user, &lb).unwrap(),
            lb.gamma0_bar() / 324.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn channel_entries_match_geometry() {
        let geom = ArcArrayGeometry::from_aperture_support(5.0, 1.0, LAMBDA).unwrap();
        let user = UserLocation::from_degrees(16.0, 30.0).unwrap();
        let lb = LinkBudget::from_components(1.0, 1e-10, 1e-5, LAMBDA).unwrap();
        let b = channel_vector(&geom, &user, &lb).unwrap();
        for (entry, m) in b.entries().iter().zip(geom.indices()) {
            let r = geom.antenna_user_distance_cartesian(&user, m).unwrap();
            assert_relative_eq!(entry.norm(), 1e-5f64.sqrt() / r, max_relative = 1e-12);
            let expected = -TAU * r / LAMBDA;
            let wrapped = (entry.arg() - expected).rem_euclid(TAU);
            assert!(wrapped < 1e-6 || TAU - wrapped < 1e-6, "m={m} phase off by {wrapped}");
        }
        assert_eq!(b.get(0), Some(b.entries()[geom.half_count() as usize]));
        assert_eq!(b.get(geom.half_count() + 1), None);
    }

    #[test]
    fn broadside_channel_is_symmetric() {
        let geom = ArcArrayGeometry::from_aperture_support(5.0, 1.0, LAMBDA).unwrap();
        let user = UserLocation::new(16.0, 0.0).unwrap();
        let b = channel_vector(&geom, &user, &link()).unwrap();
        for m in 1..=geom.half_count() {
            assert_eq!(b.get(m), b.get(-m));
        }
    }

    #[test]
    fn channel_rejects_user_inside_arc() {
        let geom = ArcArrayGeometry::from_aperture_support(8.0, 4.0, LAMBDA).unwrap();
        let user = UserLocation::new(1.0, 0.0).unwrap();
        assert!(matches!(
            channel_vector(&geom, &user, &link()),
            Err(Error::UserInsideArc { .. })
        ));
        assert!(matches!(
            mrc_snr_direct(&geom, &user, &link()),
            Err(Error::UserInsideArc { .. })
        ));
    }

    #[test]
    fn norm_squared_times_reference_is_direct_snr() {
        // Large-aperture configuration at D = 50 m.
        let geom = ArcArrayGeometry::from_aperture_support(50.0, 4.0, LAMBDA).unwrap();
        let user = UserLocation::from_degrees(16.0, 30.0).unwrap();
        let lb = LinkBudget::from_components(1.0, 1e-3, 100.0, LAMBDA).unwrap();
        let b = channel_vector(&geom, &user, &lb).unwrap();
        let via_norm = b.norm_sqr() * lb.gamma0_bar() / lb.reference_gain();
        let direct = mrc_snr_direct(&geom, &user, &lb).unwrap();
        assert_relative_eq!(via_norm, direct, max_relative = 1e-12);
        // Independent summation over Cartesian distances.
        let oracle: f64 = geom
            .indices()
            .map(|m| geom.antenna_user_distance_cartesian(&user, m).unwrap().powi(-2))
            .sum::<f64>()
            * lb.gamma0_bar();
        assert_relative_eq!(direct, oracle, max_relative = 1e-12);
    }

    #[test]
    fn mrc_beamformer_properties() {
        let geom = ArcArrayGeometry::from_aperture_support(5.0, 1.0, LAMBDA).unwrap();
        let user = UserLocation::from_degrees(20.0, -10.0).unwrap();
        let b = channel_vector(&geom, &user, &link()).unwrap();
        let v = mrc_beamformer(&b).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-12);
        let scaled = mrc_beamformer(&b.scaled(37.5)).unwrap();
        for (a, c) in v.entries().iter().zip(scaled.entries()) {
            assert!((a - c).norm() < 1e-12);
        }
        let one = ChannelVector::from_entries(vec![Complex64::from_polar(3e-4, 1.1)]);
        let v1 = mrc_beamformer(&one).unwrap();
        assert_relative_eq!(v1.entries()[0].norm(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(v1.entries()[0].arg(), 1.1, max_relative = 1e-14);
        let zero = ChannelVector::from_entries(vec![Complex64::new(0.0, 0.0); 3]);
        assert_eq!(mrc_beamformer(&zero), Err(Error::ZeroChannel));
    }

    #[test]
    fn snr_with_beamformer_cases() {
        let geom = ArcArrayGeometry::from_aperture_support(5.0, 1.0, LAMBDA).unwrap();
        let user = UserLocation::from_degrees(16.0, 30.0).unwrap();
        let lb = LinkBudget::from_components(1.0, 1e-3, 100.0, LAMBDA).unwrap();
        let b = channel_vector(&geom, &user, &lb).unwrap();
        let mrc = snr_with_beamformer(&mrc_beamformer(&b).unwrap(), &b, &lb).unwrap();
        let expect = lb.gamma0_bar() * geom.distances(&user).iter().map(|r| r.powi(-2)).sum::<f64>();
        assert_relative_eq!(mrc, expect, max_relative = 1e-12);

        let two = ChannelVector::from_entries(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]);
        let orth = BeamformingVector::normalized(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0)]).unwrap();
        assert!(snr_with_beamformer(&orth, &two, &link()).unwrap() < 1e-20);

        let short = BeamformingVector::normalized(vec![Complex64::new(1.0, 0.0)]).unwrap();
        assert_eq!(
            snr_with_beamformer(&short, &two, &link()),
            Err(Error::DimensionMismatch { left: 1, right: 2 })
        );
    }

    #[test]
    fn mrc_beats_random_combiners() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let lb = link();
        for _ in 0..100 {
            let aperture = rng.random_range(5.0..20.0);
            let support = aperture * rng.random_range(0.01..0.5);
            let geom = ArcArrayGeometry::from_aperture_support(aperture, support, LAMBDA).unwrap();
            let user = UserLocation::new(
                rng.random_range(2.0 * aperture..200.0),
                rng.random_range(-1.4..1.4),
            )
            .unwrap();
            let b = channel_vector(&geom, &user, &lb).unwrap();
            let best = snr_with_beamformer(&mrc_beamformer(&b).unwrap(), &b, &lb).unwrap();
            let v = random_unit(&mut rng, b.len());
            assert!(snr_with_beamformer(&v, &b, &lb).unwrap() <= best);
        }
    }

    #[test]
    fn direct_snr_hand_instances() {
        // r0 = 10, three antennas, broadside user at 20 m: extended-precision
        // evaluation of the three inverse squares gives 0.0075000000000000684.
        let geom = ArcArrayGeometry::from_radius_count(10.0, 3, LAMBDA).unwrap();
        let user = UserLocation::new(20.0, 0.0).unwrap();
        let snr = mrc_snr_direct(&geom, &user, &link()).unwrap();
        assert_relative_eq!(snr / 1e5, 0.007_500_000_000_000_068, max_relative = 1e-13);

        let ula = UlaArrayGeometry::from_count(101, 0.005, LAMBDA).unwrap();
        let far = UserLocation::new(16.0, 0.0).unwrap();
        let snr = mrc_snr_direct_ula(&ula, &far, &link()).unwrap();
        assert_relative_eq!(snr, 39_449.850_571_565_25, max_relative = 1e-13);

        let ula3 = UlaArrayGeometry::from_count(3, 0.005, LAMBDA).unwrap();
        let unit = UserLocation::new(1.0, 0.0).unwrap();
        assert_relative_eq!(
            mrc_snr_direct_ula(&ula3, &unit, &link()).unwrap(),
            1e5 * (1.0 + 2.0 / 1.000_025),
            max_relative = 1e-14
        );
        let ula1 = UlaArrayGeometry::from_count(1, 0.005, LAMBDA).unwrap();
        assert_relative_eq!(mrc_snr_direct_ula(&ula1, &far, &link()).unwrap(), 1e5 / 256.0, max_relative = 1e-15);
    }

    #[test]
    fn snr_is_even_in_angle_and_decreasing_in_range() {
        let geom = ArcArrayGeometry::from_aperture_support(20.0, 4.0, LAMBDA).unwrap();
        let lb = link();
        for deg in [5.0, 20.0, 45.0, 70.0] {
            let up = UserLocation::from_degrees(30.0, deg).unwrap();
            let a = mrc_snr_direct(&geom, &up, &lb).unwrap();
            let b = mrc_snr_direct(&geom, &up.mirrored(), &lb).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
        let mut prev = f64::INFINITY;
        for r in [15.0, 20.0, 40.0, 80.0, 160.0, 1000.0] {
            let s = mrc_snr_direct(&geom, &UserLocation::from_degrees(r, 30.0).unwrap(), &lb).unwrap();
            assert!(s < prev);
            prev = s;
        }
    }
}
