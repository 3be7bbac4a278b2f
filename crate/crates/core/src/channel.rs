//! GEO-to-ground link model: free-space pathloss, log-normal shadowing,
//! linear channel gain and receiver noise power.
//!
//! Every dB/linear conversion in the crate goes through [`db_to_linear`] and
//! [`linear_to_db`]; the solvers work purely in linear units.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean Earth radius in meters, used for slant-range geometry.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Geostationary orbit altitude in meters.
pub const GEO_ALTITUDE_M: f64 = 35_786_000.0;

/// Constant term of the free-space pathloss formula with distance in meters
/// and frequency in GHz.
pub const FSPL_CONSTANT_DB: f64 = 32.45;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BandLabel {
    S,
    Ka,
}

impl BandLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            BandLabel::S => "S",
            BandLabel::Ka => "Ka",
        }
    }
}

impl std::fmt::Display for BandLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for BandLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S" | "s" => Ok(BandLabel::S),
            "Ka" | "ka" | "KA" => Ok(BandLabel::Ka),
            other => Err(Error::config(format!(
                "unknown band `{other}`, expected `S` or `Ka`"
            ))),
        }
    }
}

/// Carrier and total bandwidth of an operating band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyBand {
    pub label: BandLabel,
    pub carrier_ghz: f64,
    pub total_bandwidth_hz: f64,
}

impl FrequencyBand {
    pub fn new(label: BandLabel, carrier_ghz: f64, total_bandwidth_hz: f64) -> Result<Self> {
        if !(carrier_ghz > 0.0 && carrier_ghz.is_finite()) {
            return Err(Error::domain(format!(
                "carrier frequency must be positive, got {carrier_ghz} GHz"
            )));
        }
        if !(total_bandwidth_hz > 0.0 && total_bandwidth_hz.is_finite()) {
            return Err(Error::domain(format!(
                "total bandwidth must be positive, got {total_bandwidth_hz} Hz"
            )));
        }
        Ok(Self {
            label,
            carrier_ghz,
            total_bandwidth_hz,
        })
    }

    /// S-band preset: 2 GHz carrier, 30 MHz.
    pub fn s_band() -> Self {
        Self {
            label: BandLabel::S,
            carrier_ghz: 2.0,
            total_bandwidth_hz: 30e6,
        }
    }

    /// Ka-band preset: 20 GHz carrier, 400 MHz.
    pub fn ka_band() -> Self {
        Self {
            label: BandLabel::Ka,
            carrier_ghz: 20.0,
            total_bandwidth_hz: 400e6,
        }
    }

    pub fn preset(label: BandLabel) -> Self {
        match label {
            BandLabel::S => Self::s_band(),
            BandLabel::Ka => Self::ka_band(),
        }
    }
}

/// Components of the total pathloss, all in dB.
///
/// `total` is always the plain sum of the four components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathlossBreakdown {
    /// Free-space loss plus shadow fading (clutter is neglected).
    pub basic: f64,
    pub gas: f64,
    pub scintillation: f64,
    pub entry: f64,
    pub total: f64,
}

impl PathlossBreakdown {
    fn from_components(basic: f64, gas: f64, scintillation: f64, entry: f64) -> Self {
        Self {
            basic,
            gas,
            scintillation,
            entry,
            total: basic + gas + scintillation + entry,
        }
    }
}

/// Zero-mean log-normal shadowing with standard deviation `sigma_db`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShadowFadingModel {
    sigma_db: f64,
}

impl ShadowFadingModel {
    pub const DEFAULT_SIGMA_DB: f64 = 4.0;

    pub fn new(sigma_db: f64) -> Result<Self> {
        if !(sigma_db >= 0.0 && sigma_db.is_finite()) {
            return Err(Error::domain(format!(
                "shadow fading sigma must be finite and >= 0, got {sigma_db} dB"
            )));
        }
        Ok(Self { sigma_db })
    }

    pub fn sigma_db(&self) -> f64 {
        self.sigma_db
    }

    pub fn mean_db(&self) -> f64 {
        0.0
    }
}

impl Default for ShadowFadingModel {
    fn default() -> Self {
        Self {
            sigma_db: Self::DEFAULT_SIGMA_DB,
        }
    }
}

/// Thermal noise floor plus receiver noise figure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub thermal_density_dbm_hz: f64,
    pub noise_figure_db: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            thermal_density_dbm_hz: -174.0,
            noise_figure_db: 7.0,
        }
    }
}

/// Free-space pathloss in dB for `distance_m` meters at `carrier_ghz` GHz.
pub fn fspl_db(distance_m: f64, carrier_ghz: f64) -> Result<f64> {
    if !(distance_m > 0.0 && distance_m.is_finite()) {
        return Err(Error::domain(format!(
            "distance must be positive, got {distance_m} m"
        )));
    }
    if !(carrier_ghz > 0.0 && carrier_ghz.is_finite()) {
        return Err(Error::domain(format!(
            "carrier frequency must be positive, got {carrier_ghz} GHz"
        )));
    }
    Ok(FSPL_CONSTANT_DB + 20.0 * carrier_ghz.log10() + 20.0 * distance_m.log10())
}

/// Draws one shadow-fading realization in dB.
pub fn sample_shadow_fading<R: Rng + ?Sized>(model: &ShadowFadingModel, rng: &mut R) -> f64 {
    if model.sigma_db == 0.0 {
        return 0.0;
    }
    // sigma was validated finite and positive
    let normal = Normal::new(0.0, model.sigma_db).expect("valid shadow fading sigma");
    normal.sample(rng)
}

/// Total pathloss for a clear-sky outdoor link. Gas, scintillation and
/// building-entry losses are zero; `shadow_db` is folded into the basic
/// pathloss.
pub fn total_pathloss_db(distance_m: f64, carrier_ghz: f64, shadow_db: f64) -> Result<PathlossBreakdown> {
    let fspl = fspl_db(distance_m, carrier_ghz)?;
    Ok(PathlossBreakdown::from_components(fspl + shadow_db, 0.0, 0.0, 0.0))
}

/// Linear power gain of a link with the given total pathloss and antenna gains.
pub fn channel_gain_linear(pathloss_total_db: f64, tx_antenna_gain_dbi: f64, rx_antenna_gain_dbi: f64) -> f64 {
    db_to_linear(tx_antenna_gain_dbi + rx_antenna_gain_dbi - pathloss_total_db)
}

/// Receiver noise power in watts over `bandwidth_hz`.
pub fn noise_power_watts(bandwidth_hz: f64, model: &NoiseModel) -> Result<f64> {
    if !(bandwidth_hz > 0.0 && bandwidth_hz.is_finite()) {
        return Err(Error::domain(format!(
            "noise bandwidth must be positive, got {bandwidth_hz} Hz"
        )));
    }
    let dbm = model.thermal_density_dbm_hz + linear_to_db(bandwidth_hz) + model.noise_figure_db;
    Ok(db_to_linear(dbm - 30.0))
}

/// Slant range from a ground point to a satellite at `altitude_m` seen at
/// `elevation_deg` above the horizon.
pub fn slant_range_m(altitude_m: f64, elevation_deg: f64) -> Result<f64> {
    if !(altitude_m > 0.0 && altitude_m.is_finite()) {
        return Err(Error::domain(format!(
            "altitude must be positive, got {altitude_m} m"
        )));
    }
    if !(elevation_deg > 0.0 && elevation_deg <= 90.0) {
        return Err(Error::domain(format!(
            "elevation must lie in (0, 90] degrees, got {elevation_deg}"
        )));
    }
    if elevation_deg == 90.0 {
        return Ok(altitude_m);
    }
    let r = EARTH_RADIUS_M;
    let (sin_e, cos_e) = elevation_deg.to_radians().sin_cos();
    let orbit = r + altitude_m;
    Ok((orbit * orbit - r * r * cos_e * cos_e).sqrt() - r * sin_e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fspl_unit_inputs_is_constant() {
        assert_eq!(fspl_db(1.0, 1.0).unwrap(), 32.45);
    }

    #[test]
    fn fspl_geo_s_and_ka() {
        // 32.45 + 20 log10(2) + 20 log10(35,786,000)
        assert!((fspl_db(GEO_ALTITUDE_M, 2.0).unwrap() - 189.545).abs() < 0.01);
        assert!((fspl_db(GEO_ALTITUDE_M, 20.0).unwrap() - 209.545).abs() < 0.01);
    }

    #[test]
    fn fspl_rejects_non_positive() {
        assert!(matches!(fspl_db(0.0, 2.0), Err(Error::Domain(_))));
        assert!(matches!(fspl_db(1.0, -2.0), Err(Error::Domain(_))));
        assert!(fspl_db(f64::NAN, 2.0).is_err());
    }

    #[test]
    fn fspl_decade_adds_twenty_db() {
        for &(d, f) in &[(1.0, 1.0), (123.4, 2.0), (3.5e7, 20.0)] {
            let a = fspl_db(d, f).unwrap();
            let b = fspl_db(10.0 * d, f).unwrap();
            assert!((b - a - 20.0).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_sigma_shadowing_is_degenerate() {
        let model = ShadowFadingModel::new(0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(sample_shadow_fading(&model, &mut rng), 0.0);
        }
    }

    #[test]
    fn shadowing_is_reproducible() {
        let model = ShadowFadingModel::default();
        let a: Vec<f64> = {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            (0..16).map(|_| sample_shadow_fading(&model, &mut rng)).collect()
        };
        let b: Vec<f64> = {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            (0..16).map(|_| sample_shadow_fading(&model, &mut rng)).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn shadowing_statistics() {
        let model = ShadowFadingModel::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100_000;
        let draws: Vec<f64> = (0..n).map(|_| sample_shadow_fading(&model, &mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 0.05, "mean {mean}");
        assert!((var.sqrt() - 4.0).abs() < 0.1, "std {}", var.sqrt());
    }

    #[test]
    fn negative_sigma_rejected() {
        assert!(ShadowFadingModel::new(-1.0).is_err());
    }

    #[test]
    fn pathloss_breakdown() {
        let pl = total_pathloss_db(GEO_ALTITUDE_M, 2.0, 0.0).unwrap();
        assert!((pl.total - 189.545).abs() < 0.01);
        assert_eq!(pl.gas, 0.0);
        assert_eq!(pl.scintillation, 0.0);
        assert_eq!(pl.entry, 0.0);
        assert_eq!(pl.total - (pl.basic + pl.gas + pl.scintillation + pl.entry), 0.0);

        let shadowed = total_pathloss_db(GEO_ALTITUDE_M, 2.0, 4.0).unwrap();
        assert_eq!(shadowed.total, pl.basic + 4.0);
    }

    #[test]
    fn gain_conversion() {
        assert_eq!(channel_gain_linear(0.0, 0.0, 0.0), 1.0);
        let g = channel_gain_linear(189.545, 30.0, 0.0);
        assert!((g / 1.1104e-16 - 1.0).abs() < 1e-3, "{g}");
        assert!(channel_gain_linear(100.0, 0.0, 0.0) > channel_gain_linear(100.1, 0.0, 0.0));
    }

    #[test]
    fn noise_power() {
        let n = noise_power_watts(180e3, &NoiseModel::default()).unwrap();
        assert!((n / 3.5915e-15 - 1.0).abs() < 1e-4, "{n}");
        assert!((linear_to_db(n) + 30.0 + 114.447).abs() < 1e-3);

        let bare = NoiseModel {
            thermal_density_dbm_hz: -174.0,
            noise_figure_db: 0.0,
        };
        let n1 = noise_power_watts(1.0, &bare).unwrap();
        assert!((n1 / 3.981_071_705_534_986e-21 - 1.0).abs() < 1e-12);

        let n2 = noise_power_watts(360e3, &NoiseModel::default()).unwrap();
        assert!((linear_to_db(n2 / n) - 10.0 * 2f64.log10()).abs() < 1e-12);

        assert!(noise_power_watts(0.0, &NoiseModel::default()).is_err());
    }

    #[test]
    fn slant_range_at_nadir_is_altitude() {
        assert_eq!(slant_range_m(GEO_ALTITUDE_M, 90.0).unwrap(), GEO_ALTITUDE_M);
        let low = slant_range_m(GEO_ALTITUDE_M, 30.0).unwrap();
        assert!(low > GEO_ALTITUDE_M);
        // near-continuity toward nadir
        let near = slant_range_m(GEO_ALTITUDE_M, 89.999_999).unwrap();
        assert!((near - GEO_ALTITUDE_M).abs() < 1.0);
        assert!(slant_range_m(GEO_ALTITUDE_M, 0.0).is_err());
    }

    #[test]
    fn band_presets() {
        let s = FrequencyBand::s_band();
        assert_eq!((s.carrier_ghz, s.total_bandwidth_hz), (2.0, 30e6));
        let ka = FrequencyBand::ka_band();
        assert_eq!((ka.carrier_ghz, ka.total_bandwidth_hz), (20.0, 400e6));
        assert!(FrequencyBand::new(BandLabel::S, 0.0, 1.0).is_err());
        assert!(FrequencyBand::new(BandLabel::S, 1.0, 0.0).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn gain_round_trip(pl in -50.0f64..300.0, tx in -10.0f64..60.0, rx in -10.0f64..30.0) {
                let g = channel_gain_linear(pl, tx, rx);
                prop_assert!(g > 0.0);
                let back = -linear_to_db(g) + tx + rx;
                prop_assert!((back - pl).abs() < 1e-9);
            }

            #[test]
            fn breakdown_is_additive(d in 1.0f64..1e8, f in 0.1f64..100.0, s in -20.0f64..20.0) {
                let pl = total_pathloss_db(d, f, s).unwrap();
                prop_assert_eq!(pl.total, pl.basic + pl.gas + pl.scintillation + pl.entry);
            }
        }
    }
}
