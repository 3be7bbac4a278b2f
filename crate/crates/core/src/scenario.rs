//! Experiment instances: beam layout, RBG partition, UE drops and per-RBG
//! channel gains.
//!
//! The band is cut into `K` equal RBGs and the RBGs are dealt out to the
//! beams in contiguous blocks, so beams occupy disjoint frequency slices and
//! never interfere. Each (beam, RBG) pair then holds an independent group of
//! UEs sharing that RBG through power-domain superposition.
//!
//! Randomness is drawn from one ChaCha stream per `(seed, drop, beam, rbg)`,
//! so instances can be built in any order or in parallel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{
    channel_gain_linear, noise_power_watts, sample_shadow_fading, slant_range_m, total_pathloss_db, BandLabel,
    FrequencyBand, NoiseModel, ShadowFadingModel, GEO_ALTITUDE_M,
};
use crate::error::{Error, Result};
use crate::solvers::{GainConvention, ProblemInstance};

/// Subcarriers per resource block.
pub const SUBCARRIERS_PER_RB: usize = 12;

/// UE antenna heights are drawn uniformly from `[0, MAX_UE_HEIGHT_M]`.
pub const MAX_UE_HEIGHT_M: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Preset {
    #[serde(rename = "S-SSB")]
    SSsb,
    #[serde(rename = "S-MSB")]
    SMsb,
    #[serde(rename = "Ka-SSB")]
    KaSsb,
    #[serde(rename = "Ka-MSB")]
    KaMsb,
    #[serde(rename = "custom")]
    Custom,
}

impl Preset {
    pub const REFERENCE_SET: [Preset; 4] = [Preset::SSsb, Preset::SMsb, Preset::KaSsb, Preset::KaMsb];

    pub fn label(self) -> &'static str {
        match self {
            Preset::SSsb => "S-SSB",
            Preset::SMsb => "S-MSB",
            Preset::KaSsb => "Ka-SSB",
            Preset::KaMsb => "Ka-MSB",
            Preset::Custom => "custom",
        }
    }

    pub fn band(self) -> Option<BandLabel> {
        match self {
            Preset::SSsb | Preset::SMsb => Some(BandLabel::S),
            Preset::KaSsb | Preset::KaMsb => Some(BandLabel::Ka),
            Preset::Custom => None,
        }
    }

    pub fn beam_count(self) -> Option<usize> {
        match self {
            Preset::SSsb | Preset::KaSsb => Some(1),
            Preset::SMsb | Preset::KaMsb => Some(ScenarioConfig::DEFAULT_MSB_BEAMS),
            Preset::Custom => None,
        }
    }
}

impl std::fmt::Display for Preset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Preset::SSsb, Preset::SMsb, Preset::KaSsb, Preset::KaMsb, Preset::Custom]
            .into_iter()
            .find(|p| p.label().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::config(format!(
                    "unknown preset `{s}`, expected one of S-SSB, S-MSB, Ka-SSB, Ka-MSB, custom"
                ))
            })
    }
}

/// Full description of one simulated deployment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub altitude_m: f64,
    pub band: FrequencyBand,
    pub beam_count: usize,
    pub beam_radius_m: f64,
    pub ues_per_rbg: usize,
    pub scs_hz: f64,
    pub rbs_per_rbg: usize,
    pub power_budget_per_beam_w: f64,
    /// Elevation of the satellite seen from the centre of beam 0.
    pub elevation_deg: f64,
    pub drops: usize,
    pub seed: u64,
    pub tx_antenna_gain_dbi: f64,
    pub rx_antenna_gain_dbi: f64,
    pub shadow_sigma_db: f64,
    pub noise: NoiseModel,
    pub convention: GainConvention,
    /// Reserved RBG cost budget; not used by any solver.
    pub cost_budget: Option<f64>,
}

impl ScenarioConfig {
    pub const DEFAULT_MSB_BEAMS: usize = 7;
    pub const DEFAULT_BEAM_RADIUS_M: f64 = 100_000.0;
    pub const DEFAULT_UES_PER_RBG: usize = 4;
    pub const DEFAULT_POWER_BUDGET_W: f64 = 10_000.0;
    pub const DEFAULT_DROPS: usize = 20;
    pub const DEFAULT_SEED: u64 = 20_240_601;

    /// Defaults for `band` with `beam_count` beams.
    pub fn new(name: impl Into<String>, band: FrequencyBand, beam_count: usize) -> Self {
        Self {
            name: name.into(),
            altitude_m: GEO_ALTITUDE_M,
            band,
            beam_count,
            beam_radius_m: Self::DEFAULT_BEAM_RADIUS_M,
            ues_per_rbg: Self::DEFAULT_UES_PER_RBG,
            scs_hz: 15_000.0,
            rbs_per_rbg: 1,
            power_budget_per_beam_w: Self::DEFAULT_POWER_BUDGET_W,
            elevation_deg: 90.0,
            drops: Self::DEFAULT_DROPS,
            seed: Self::DEFAULT_SEED,
            tx_antenna_gain_dbi: 30.0,
            rx_antenna_gain_dbi: 0.0,
            shadow_sigma_db: ShadowFadingModel::DEFAULT_SIGMA_DB,
            noise: NoiseModel::default(),
            convention: GainConvention::VictimGain,
            cost_budget: None,
        }
    }

    /// Defaults for one of the four reference deployments. `None` for
    /// [`Preset::Custom`].
    pub fn preset(preset: Preset) -> Option<Self> {
        Some(Self::new(
            preset.label(),
            FrequencyBand::preset(preset.band()?),
            preset.beam_count()?,
        ))
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(name: &str, v: f64) -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(format!("{name} must be positive, got {v}")))
            }
        }
        positive("altitude_m", self.altitude_m)?;
        positive("beam_radius_m", self.beam_radius_m)?;
        positive("scs_hz", self.scs_hz)?;
        positive("power_budget_per_beam_w", self.power_budget_per_beam_w)?;
        FrequencyBand::new(self.band.label, self.band.carrier_ghz, self.band.total_bandwidth_hz)
            .map_err(|e| Error::config(e.to_string()))?;
        if self.beam_count == 0 {
            return Err(Error::config("beam_count must be >= 1"));
        }
        if self.ues_per_rbg == 0 {
            return Err(Error::config("ues_per_rbg must be >= 1"));
        }
        if self.rbs_per_rbg == 0 {
            return Err(Error::config("rbs_per_rbg must be >= 1"));
        }
        if self.drops == 0 {
            return Err(Error::config("drops must be >= 1"));
        }
        if !(self.elevation_deg > 0.0 && self.elevation_deg <= 90.0) {
            return Err(Error::config(format!(
                "elevation_deg must lie in (0, 90], got {}",
                self.elevation_deg
            )));
        }
        ShadowFadingModel::new(self.shadow_sigma_db).map_err(|e| Error::config(e.to_string()))?;
        for (name, v) in [
            ("tx_antenna_gain_dbi", self.tx_antenna_gain_dbi),
            ("rx_antenna_gain_dbi", self.rx_antenna_gain_dbi),
            ("thermal_density_dbm_hz", self.noise.thermal_density_dbm_hz),
            ("noise_figure_db", self.noise.noise_figure_db),
        ] {
            if !v.is_finite() {
                return Err(Error::config(format!("{name} must be finite, got {v}")));
            }
        }
        let plan = self.rbg_plan()?;
        if plan.rbg_count < self.beam_count {
            return Err(Error::config(format!(
                "{} RBGs cannot be shared by {} beams",
                plan.rbg_count, self.beam_count
            )));
        }
        Ok(())
    }

    pub fn rbg_plan(&self) -> Result<RbgPlan> {
        partition_rbgs(&self.band, self.scs_hz, self.rbs_per_rbg)
    }
}

/// Uniform RBG grid over a band, with no guard bands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RbgPlan {
    pub rbg_count: usize,
    pub rb_bandwidth_hz: f64,
    pub rbg_bandwidth_hz: f64,
}

impl RbgPlan {
    pub fn occupied_bandwidth_hz(&self) -> f64 {
        self.rbg_count as f64 * self.rbg_bandwidth_hz
    }
}

pub fn partition_rbgs(band: &FrequencyBand, scs_hz: f64, rbs_per_rbg: usize) -> Result<RbgPlan> {
    if !(scs_hz > 0.0 && scs_hz.is_finite()) || rbs_per_rbg == 0 {
        return Err(Error::config(format!(
            "subcarrier spacing and RBs per RBG must be positive, got {scs_hz} Hz and {rbs_per_rbg}"
        )));
    }
    let rb_bandwidth_hz = SUBCARRIERS_PER_RB as f64 * scs_hz;
    let rbg_bandwidth_hz = rbs_per_rbg as f64 * rb_bandwidth_hz;
    // the ratio is formed first so exact fits do not fall one short
    let ratio = band.total_bandwidth_hz / rbg_bandwidth_hz;
    let rbg_count = (ratio * (1.0 + 1e-12)).floor() as usize;
    if rbg_count == 0 {
        return Err(Error::config(format!(
            "band of {} Hz cannot hold one RBG of {rbg_bandwidth_hz} Hz",
            band.total_bandwidth_hz
        )));
    }
    Ok(RbgPlan {
        rbg_count,
        rb_bandwidth_hz,
        rbg_bandwidth_hz,
    })
}

/// Planar position in meters relative to the centre of beam 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Position {
    pub east_m: f64,
    pub north_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Beam {
    pub id: usize,
    pub center: Position,
    /// `[start, end)` in Hz.
    pub frequency_slice: (f64, f64),
    pub rbg_ids: Vec<usize>,
}

/// Hexagonal beam centres at spacing `sqrt(3) * radius`, ring by ring.
fn hex_centers(count: usize, radius_m: f64) -> Vec<Position> {
    // axial directions of a hex ring walk
    const DIRS: [(i64, i64); 6] = [(1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1)];
    let spacing = 3f64.sqrt() * radius_m;
    let to_pos = |q: i64, r: i64| {
        let (q, r) = (q as f64, r as f64);
        Position {
            east_m: spacing * (q + r / 2.0),
            north_m: spacing * r * 3f64.sqrt() / 2.0,
        }
    };
    let mut out = vec![to_pos(0, 0)];
    let mut ring = 1i64;
    while out.len() < count {
        // start at the "south-west" corner of the ring and walk its six sides
        let (mut q, mut r) = (-ring, ring);
        for (dq, dr) in DIRS {
            for _ in 0..ring {
                if out.len() == count {
                    return out;
                }
                out.push(to_pos(q, r));
                q += dq;
                r += dr;
            }
        }
        ring += 1;
    }
    out.truncate(count);
    out
}

/// Deals the RBGs of `plan` to `config.beam_count` beams in contiguous blocks,
/// the first `K mod beam_count` beams taking one extra.
pub fn layout_beams(config: &ScenarioConfig, plan: &RbgPlan) -> Result<Vec<Beam>> {
    let n = config.beam_count;
    if n == 0 || plan.rbg_count < n {
        return Err(Error::config(format!(
            "{} RBGs cannot be shared by {n} beams",
            plan.rbg_count
        )));
    }
    let base = plan.rbg_count / n;
    let extra = plan.rbg_count % n;
    let lower_edge_hz = config.band.carrier_ghz * 1e9 - config.band.total_bandwidth_hz / 2.0;
    let mut next = 0;
    Ok(hex_centers(n, config.beam_radius_m)
        .into_iter()
        .enumerate()
        .map(|(id, center)| {
            let count = base + usize::from(id < extra);
            let rbg_ids: Vec<usize> = (next..next + count).collect();
            let slice = (
                lower_edge_hz + next as f64 * plan.rbg_bandwidth_hz,
                lower_edge_hz + (next + count) as f64 * plan.rbg_bandwidth_hz,
            );
            next += count;
            Beam {
                id,
                center,
                frequency_slice: slice,
                rbg_ids,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UserEquipment {
    pub id: usize,
    pub beam_id: usize,
    pub rbg_id: usize,
    pub position: Position,
    pub height_m: f64,
    pub rx_antenna_gain_dbi: f64,
}

/// Random source for one (drop, beam, RBG) group.
pub fn group_rng(seed: u64, drop_index: usize, beam_id: usize, rbg_id: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stream = ((drop_index as u64) << 40) ^ ((beam_id as u64) << 24) ^ rbg_id as u64;
    rng.set_stream(stream);
    rng
}

/// Places `config.ues_per_rbg` UEs uniformly over the disk of `beam`.
pub fn drop_group<R: Rng + ?Sized>(config: &ScenarioConfig, beam: &Beam, rbg_id: usize, rng: &mut R) -> Vec<UserEquipment> {
    (0..config.ues_per_rbg)
        .map(|id| {
            // sqrt of a uniform radius fraction gives uniform area density
            let radius = config.beam_radius_m * rng.random::<f64>().sqrt();
            let angle = std::f64::consts::TAU * rng.random::<f64>();
            let height_m = MAX_UE_HEIGHT_M * rng.random::<f64>();
            UserEquipment {
                id,
                beam_id: beam.id,
                rbg_id,
                position: Position {
                    east_m: beam.center.east_m + radius * angle.cos(),
                    north_m: beam.center.north_m + radius * angle.sin(),
                },
                height_m,
                rx_antenna_gain_dbi: config.rx_antenna_gain_dbi,
            }
        })
        .collect()
}

/// UE groups of one drop, ordered by beam then RBG.
pub fn drop_users(config: &ScenarioConfig, beams: &[Beam], drop_index: usize) -> Vec<Vec<UserEquipment>> {
    beams
        .iter()
        .flat_map(|beam| {
            beam.rbg_ids.iter().map(move |&rbg| {
                let mut rng = group_rng(config.seed, drop_index, beam.id, rbg);
                drop_group(config, beam, rbg, &mut rng)
            })
        })
        .collect()
}

/// Satellite position in the local frame of beam 0's centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SatelliteGeometry {
    north_m: f64,
    up_m: f64,
}

impl SatelliteGeometry {
    pub fn new(altitude_m: f64, elevation_deg: f64) -> Result<Self> {
        let range = slant_range_m(altitude_m, elevation_deg)?;
        let (sin_e, cos_e) = elevation_deg.to_radians().sin_cos();
        Ok(if elevation_deg == 90.0 {
            Self {
                north_m: 0.0,
                up_m: altitude_m,
            }
        } else {
            Self {
                north_m: range * cos_e,
                up_m: range * sin_e,
            }
        })
    }

    pub fn for_config(config: &ScenarioConfig) -> Result<Self> {
        Self::new(config.altitude_m, config.elevation_deg)
    }

    /// Distance from the satellite to a UE antenna.
    pub fn distance_m(&self, ue: &UserEquipment) -> f64 {
        let dn = self.north_m - ue.position.north_m;
        let de = ue.position.east_m;
        let du = self.up_m - ue.height_m;
        (dn * dn + de * de + du * du).sqrt()
    }
}

/// Linear gains of one (beam, RBG) group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainMatrix {
    pub beam_id: usize,
    pub rbg_id: usize,
    pub gains: Vec<f64>,
}

/// Pathloss plus one shadow draw per UE, converted to linear gain.
pub fn build_gain_matrix<R: Rng + ?Sized>(
    config: &ScenarioConfig,
    geometry: &SatelliteGeometry,
    beam: &Beam,
    rbg_id: usize,
    ues: &[UserEquipment],
    rng: &mut R,
) -> Result<GainMatrix> {
    let shadow = ShadowFadingModel::new(config.shadow_sigma_db)?;
    let gains = ues
        .iter()
        .map(|ue| {
            let shadow_db = sample_shadow_fading(&shadow, rng);
            let pl = total_pathloss_db(geometry.distance_m(ue), config.band.carrier_ghz, shadow_db)?;
            let g = channel_gain_linear(pl.total, config.tx_antenna_gain_dbi, ue.rx_antenna_gain_dbi);
            if g > 0.0 && g.is_finite() {
                Ok(g)
            } else {
                Err(Error::domain(format!("channel gain {g} is not positive and finite")))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GainMatrix {
        beam_id: beam.id,
        rbg_id,
        gains,
    })
}

/// Solver input for one (beam, RBG) pair of one drop.
#[derive(Debug, Clone, PartialEq)]
pub struct RbgInstance {
    pub beam_id: usize,
    pub rbg_id: usize,
    pub instance: ProblemInstance,
}

/// Everything a drop needs that does not depend on the drop index.
#[derive(Debug, Clone)]
pub struct Deployment {
    pub config: ScenarioConfig,
    pub plan: RbgPlan,
    pub beams: Vec<Beam>,
    pub geometry: SatelliteGeometry,
    pub noise_power_w: f64,
}

impl Deployment {
    pub fn new(config: &ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let plan = config.rbg_plan()?;
        let beams = layout_beams(config, &plan)?;
        Ok(Self {
            config: config.clone(),
            geometry: SatelliteGeometry::for_config(config)?,
            noise_power_w: noise_power_watts(plan.rbg_bandwidth_hz, &config.noise)?,
            plan,
            beams,
        })
    }

    /// Per-RBG share of the beam budget.
    pub fn rbg_budget_w(&self, beam: &Beam) -> f64 {
        self.config.power_budget_per_beam_w / beam.rbg_ids.len() as f64
    }

    pub fn instance_count(&self) -> usize {
        self.beams.iter().map(|b| b.rbg_ids.len()).sum()
    }

    pub fn build_group(&self, beam: &Beam, rbg_id: usize, drop_index: usize) -> Result<RbgInstance> {
        let mut rng = group_rng(self.config.seed, drop_index, beam.id, rbg_id);
        let ues = drop_group(&self.config, beam, rbg_id, &mut rng);
        let gm = build_gain_matrix(&self.config, &self.geometry, beam, rbg_id, &ues, &mut rng)?;
        Ok(RbgInstance {
            beam_id: beam.id,
            rbg_id,
            instance: ProblemInstance::new(gm.gains, self.noise_power_w, self.rbg_budget_w(beam), self.config.convention)?,
        })
    }

    /// Every (beam, RBG) instance of one drop, ordered by beam then RBG.
    pub fn build_drop(&self, drop_index: usize) -> Result<Vec<RbgInstance>> {
        let slots: Vec<(&Beam, usize)> = self
            .beams
            .iter()
            .flat_map(|b| b.rbg_ids.iter().map(move |&r| (b, r)))
            .collect();
        slots
            .into_par_iter()
            .map(|(beam, rbg)| self.build_group(beam, rbg, drop_index))
            .collect()
    }
}

/// Solver-ready instances for one drop of `config`.
pub fn build_instance(config: &ScenarioConfig, drop_index: usize) -> Result<Vec<RbgInstance>> {
    Deployment::new(config)?.build_drop(drop_index)
}
