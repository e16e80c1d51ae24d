//! Seeded synthetic community generation and load aggregation.
//!
//! Essential loads follow a fixed 24-hour template (overnight trough, morning
//! shoulder, evening peak) scaled per home with jitter and rescaled so the
//! community meets its mean daily energy target. AC windows are contiguous
//! and start on a discrete triangular distribution whose demand mode falls in
//! the configured afternoon interval.

use std::fs;
use std::path::Path;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    cooling_btu_per_hr, AcUnit, Home, HomeId, LoadProfile, SimClock, StateSchedule,
};

/// Schema tag written into community snapshot files.
pub const COMMUNITY_SCHEMA: &str = "ac-drm/community/v1";

/// Relative hourly essential demand, hour 0 = midnight.
const ESSENTIAL_TEMPLATE: [f64; 24] = [
    0.55, 0.48, 0.45, 0.44, 0.45, 0.52, 0.75, 0.95, 0.95, 0.85, 0.80, 0.78, 0.80, 0.80, 0.78, 0.80,
    0.95, 1.25, 1.55, 1.70, 1.65, 1.45, 1.10, 0.75,
];

/// Clock time at which dwelling heat gain is largest.
const HEAT_GAIN_PEAK_HOUR: f64 = 15.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommunitySpec {
    pub num_homes: usize,
    pub seed: u64,
    pub slot_count: usize,
    /// Mean daily household energy with every AC at rated power, kWh.
    pub target_daily_kwh: f64,
    pub ac_rated_power: f64,
    pub ac_eer: f64,
    pub ac_num_states: u16,
    /// Length of every AC demand window, hours.
    pub ac_window_hours: f64,
    /// Afternoon interval holding the mode of AC demand, clock hours.
    pub window_peak_start: f64,
    pub window_peak_end: f64,
    /// Half-width of the triangular window-start distribution, hours.
    pub window_start_spread: f64,
    /// Range of each home's daily maximum heat gain, BTU/hr.
    pub heat_gain_range: [f64; 2],
    /// Fractional drop of heat gain from its afternoon maximum to its overnight minimum.
    pub heat_gain_swing: f64,
    /// Range of thermal capacity, BTU/°F.
    pub thermal_capacity_range: [f64; 2],
    /// Multiplicative per-home scale range for the essential template.
    pub essential_scale_range: [f64; 2],
    /// Per-slot multiplicative noise amplitude on essential load.
    pub essential_jitter: f64,
    /// Room temperature at the start of each demand window, °F.
    pub initial_temp: f64,
}

impl Default for CommunitySpec {
    fn default() -> Self {
        Self {
            num_homes: 1000,
            seed: 2016,
            slot_count: 288,
            target_daily_kwh: 41.0,
            ac_rated_power: 5.0,
            ac_eer: 10.0,
            ac_num_states: 2,
            ac_window_hours: 4.0,
            window_peak_start: 13.0,
            window_peak_end: 18.0,
            window_start_spread: 7.0,
            // Just under the 50 000 BTU/hr rated cooling: rated power holds the
            // room at its setpoint and an idle AC warms it by about 8 °F/hr.
            heat_gain_range: [49_850.0, 49_950.0],
            heat_gain_swing: 0.0,
            thermal_capacity_range: [6_320.0, 6_480.0],
            essential_scale_range: [0.6, 1.4],
            essential_jitter: 0.15,
            initial_temp: 65.0,
        }
    }
}

impl CommunitySpec {
    pub fn clock(&self) -> Result<SimClock> {
        SimClock::new(self.slot_count)
    }

    pub fn validate(&self) -> Result<()> {
        let mut errors = Vec::new();
        let positive = |v: f64| v.is_finite() && v > 0.0;
        let range_ok = |r: [f64; 2]| positive(r[0]) && positive(r[1]) && r[0] <= r[1];
        if self.num_homes == 0 {
            errors.push("num_homes must be >= 1".to_string());
        }
        if self.slot_count == 0 {
            errors.push("slot_count must be >= 1".to_string());
        }
        if !positive(self.target_daily_kwh) {
            errors.push("target_daily_kwh must be > 0".to_string());
        }
        if !positive(self.ac_rated_power) {
            errors.push("ac_rated_power must be > 0".to_string());
        }
        if !self.ac_eer.is_finite() || self.ac_eer < crate::model::MIN_EER {
            errors.push(format!("ac_eer must be >= {}", crate::model::MIN_EER));
        }
        if self.ac_num_states < 2 {
            errors.push("ac_num_states must be >= 2".to_string());
        }
        if !positive(self.ac_window_hours) || self.ac_window_hours > 24.0 {
            errors.push("ac_window_hours must be in (0, 24]".to_string());
        }
        if !(self.window_peak_start.is_finite()
            && self.window_peak_end.is_finite()
            && 0.0 <= self.window_peak_start
            && self.window_peak_start <= self.window_peak_end
            && self.window_peak_end <= 24.0)
        {
            errors.push("window peak interval must satisfy 0 <= start <= end <= 24".to_string());
        }
        if !self.window_start_spread.is_finite() || self.window_start_spread < 0.0 {
            errors.push("window_start_spread must be >= 0".to_string());
        }
        if !range_ok(self.heat_gain_range) {
            errors.push("heat_gain_range must be a non-empty positive interval".to_string());
        }
        if !(0.0..1.0).contains(&self.heat_gain_swing) {
            errors.push("heat_gain_swing must be in [0, 1)".to_string());
        }
        if !range_ok(self.thermal_capacity_range) {
            errors.push("thermal_capacity_range must be a non-empty positive interval".to_string());
        }
        if !range_ok(self.essential_scale_range) {
            errors.push("essential_scale_range must be a non-empty positive interval".to_string());
        }
        if !(0.0..1.0).contains(&self.essential_jitter) {
            errors.push("essential_jitter must be in [0, 1)".to_string());
        }
        if !self.initial_temp.is_finite() {
            errors.push("initial_temp must be finite".to_string());
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errors))
        }
    }
}

/// A set of homes sharing one clock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Community {
    pub clock: SimClock,
    pub homes: Vec<Home>,
}

impl Community {
    pub fn new(clock: SimClock, homes: Vec<Home>) -> Result<Self> {
        let community = Self { clock, homes };
        community.validate()?;
        Ok(community)
    }

    pub fn validate(&self) -> Result<()> {
        self.clock.validate()?;
        let mut errors = Vec::new();
        for home in &self.homes {
            if let Err(Error::Validation(v)) = home.validate(&self.clock) {
                errors.extend(v);
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errors))
        }
    }

    pub fn len(&self) -> usize {
        self.homes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.homes.is_empty()
    }

    /// Copy of the community with every AC reconfigured to `num_states` states.
    pub fn with_num_states(&self, num_states: u16) -> Self {
        let mut out = self.clone();
        for home in &mut out.homes {
            home.ac.num_states = num_states;
        }
        out
    }

    /// Every AC at rated power throughout.
    pub fn rated_schedules(&self) -> Vec<StateSchedule> {
        self.homes
            .iter()
            .map(|h| StateSchedule::rated(self.clock.slot_count, h.ac.num_states))
            .collect()
    }

    /// Aggregate demand with no throttling.
    pub fn baseline(&self) -> LoadProfile {
        aggregate_load(self, &self.rated_schedules()).expect("rated schedules are well formed")
    }
}

/// On-disk community snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityFile {
    pub schema: String,
    /// Generator settings, when the community was synthesised.
    pub spec: Option<CommunitySpec>,
    pub clock: SimClock,
    pub homes: Vec<Home>,
}

pub fn save_community(
    community: &Community,
    spec: Option<&CommunitySpec>,
    path: &Path,
) -> Result<()> {
    let file = CommunityFile {
        schema: COMMUNITY_SCHEMA.to_string(),
        spec: spec.cloned(),
        clock: community.clock,
        homes: community.homes.clone(),
    };
    let json = serde_json::to_string(&file).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    fs::write(path, json).map_err(|e| Error::io(path, e))
}

pub fn load_community(path: &Path) -> Result<(Community, Option<CommunitySpec>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: CommunityFile = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    if file.schema != COMMUNITY_SCHEMA {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            message: format!("schema `{}`, expected `{COMMUNITY_SCHEMA}`", file.schema),
        });
    }
    let community = Community::new(file.clock, file.homes)?;
    Ok((community, file.spec))
}

/// Synthesises a community from `spec`; identical specs give identical output.
pub fn generate_community(spec: &CommunitySpec) -> Result<Community> {
    spec.validate()?;
    let clock = spec.clock()?;
    let slots = clock.slot_count;

    let window = clock.whole_slots(spec.ac_window_hours).ok_or_else(|| {
        Error::Generation(format!(
            "AC window of {} h is not a whole number of slots",
            spec.ac_window_hours
        ))
    })?;
    if window == 0 || window > slots {
        return Err(Error::Generation(format!(
            "AC window of {window} slots does not fit a {slots}-slot day"
        )));
    }

    let rated_cooling = cooling_btu_per_hr(spec.ac_eer, spec.ac_rated_power)?;
    if spec.heat_gain_range[1] >= rated_cooling {
        return Err(Error::Generation(format!(
            "max heat gain {} BTU/hr is not below rated cooling {} BTU/hr",
            spec.heat_gain_range[1], rated_cooling
        )));
    }

    let ac_daily_kwh = spec.ac_rated_power * window as f64 * clock.slot_duration;
    let essential_daily_kwh = spec.target_daily_kwh - ac_daily_kwh;
    if essential_daily_kwh <= 0.0 {
        return Err(Error::Generation(format!(
            "target {} kWh/day does not exceed AC energy {} kWh/day",
            spec.target_daily_kwh, ac_daily_kwh
        )));
    }

    let starts = window_start_distribution(spec, &clock, window)?;
    let template = slot_template(&clock);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut homes = Vec::with_capacity(spec.num_homes);
    for j in 0..spec.num_homes {
        let start = starts.sample(&mut rng);
        let scale = rng.gen_range(spec.essential_scale_range[0]..=spec.essential_scale_range[1]);
        let shift_range = (1.0 / clock.slot_duration).round() as i64;
        let shift = rng.gen_range(-shift_range..=shift_range);
        let essential: Vec<f64> = (0..slots)
            .map(|t| {
                let src = (t as i64 - shift).rem_euclid(slots as i64) as usize;
                let noise = 1.0 + spec.essential_jitter * rng.gen_range(-1.0..=1.0);
                template[src] * scale * noise
            })
            .collect();

        let gain_max = rng.gen_range(spec.heat_gain_range[0]..=spec.heat_gain_range[1]);
        let heat_gain = (0..slots)
            .map(|t| {
                let hours = (t as f64 + 0.5) * clock.slot_duration;
                let phase = (hours - HEAT_GAIN_PEAK_HOUR) / 24.0 * std::f64::consts::TAU;
                let trough = 0.5 * (1.0 - phase.cos());
                gain_max * (1.0 - spec.heat_gain_swing * trough)
            })
            .collect();
        let thermal_capacity =
            rng.gen_range(spec.thermal_capacity_range[0]..=spec.thermal_capacity_range[1]);

        homes.push(Home {
            id: HomeId(j as u32),
            essential_load: essential,
            ac: AcUnit {
                rated_power: spec.ac_rated_power,
                eer: spec.ac_eer,
                num_states: spec.ac_num_states,
                demand_start: start,
                demand_end: start + window - 1,
            },
            heat_gain,
            thermal_capacity,
            initial_temp: spec.initial_temp,
        });
    }

    let mean_essential = homes
        .iter()
        .map(|h| h.essential_load.iter().sum::<f64>() * clock.slot_duration)
        .sum::<f64>()
        / homes.len() as f64;
    let factor = essential_daily_kwh / mean_essential;
    for home in &mut homes {
        for v in &mut home.essential_load {
            *v *= factor;
        }
    }

    Community::new(clock, homes)
}

/// Template value for every slot, linearly interpolated between hours and
/// normalised to mean 1.
fn slot_template(clock: &SimClock) -> Vec<f64> {
    let raw: Vec<f64> = (0..clock.slot_count)
        .map(|t| {
            let hours = t as f64 * clock.slot_duration;
            let h0 = hours.floor() as usize % 24;
            let h1 = (h0 + 1) % 24;
            let frac = hours - hours.floor();
            ESSENTIAL_TEMPLATE[h0] * (1.0 - frac) + ESSENTIAL_TEMPLATE[h1] * frac
        })
        .collect();
    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
    raw.into_iter().map(|v| v / mean).collect()
}

/// Discrete triangular distribution over feasible window starts, centred so
/// that demand is most concentrated at the middle of the peak interval.
fn window_start_distribution(
    spec: &CommunitySpec,
    clock: &SimClock,
    window: usize,
) -> Result<WeightedIndex<f64>> {
    let latest = clock.slot_count - window;
    let centre_hours =
        0.5 * (spec.window_peak_start + spec.window_peak_end) - 0.5 * spec.ac_window_hours;
    let mode = (centre_hours / clock.slot_duration)
        .round()
        .clamp(0.0, latest as f64);
    let half = spec.window_start_spread / clock.slot_duration;
    let weights: Vec<f64> = (0..=latest)
        .map(|s| (half + 1.0 - (s as f64 - mode).abs()).max(0.0))
        .collect();
    WeightedIndex::new(weights)
        .map_err(|e| Error::Generation(format!("window start distribution: {e}")))
}

/// Community demand under the given per-home schedules.
pub fn aggregate_load(community: &Community, schedules: &[StateSchedule]) -> Result<LoadProfile> {
    let slots = community.clock.slot_count;
    if schedules.len() != community.homes.len() {
        return Err(Error::domain(format!(
            "{} schedules for {} homes",
            schedules.len(),
            community.homes.len()
        )));
    }
    let mut load = vec![0.0; slots];
    for (home, schedule) in community.homes.iter().zip(schedules) {
        if schedule.len() != slots || home.essential_load.len() != slots {
            return Err(Error::domain(format!(
                "{}: profile length mismatch (expected {slots} slots)",
                home.id
            )));
        }
        for (t, v) in load.iter_mut().enumerate() {
            let ac = if home.ac.is_demanded(t) {
                home.ac.power(schedule.get(t))?
            } else {
                0.0
            };
            *v += home.essential_load[t] + ac;
        }
    }
    Ok(LoadProfile::new(load))
}

/// Peak demand and the earliest slot where it occurs.
pub fn peak(profile: &LoadProfile) -> Option<(f64, usize)> {
    profile.peak()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec(n: usize) -> CommunitySpec {
        CommunitySpec {
            num_homes: n,
            seed: 11,
            ..CommunitySpec::default()
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let a = generate_community(&small_spec(50)).unwrap();
        let b = generate_community(&small_spec(50)).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let c = generate_community(&CommunitySpec {
            seed: 12,
            ..small_spec(50)
        })
        .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn single_home_has_four_hour_window() {
        let c = generate_community(&small_spec(1)).unwrap();
        assert_eq!(c.homes.len(), 1);
        assert_eq!(c.homes[0].ac.window_len(), 48);
    }

    #[test]
    fn energy_and_pull_down_calibration() {
        let spec = small_spec(200);
        let c = generate_community(&spec).unwrap();
        let dt = c.clock.slot_duration;
        let mean: f64 = c
            .homes
            .iter()
            .map(|h| {
                (0..c.clock.slot_count)
                    .map(|t| {
                        h.essential_load[t]
                            + if h.ac.is_demanded(t) {
                                h.ac.rated_power
                            } else {
                                0.0
                            }
                    })
                    .sum::<f64>()
                    * dt
            })
            .sum::<f64>()
            / c.homes.len() as f64;
        assert!((mean - spec.target_daily_kwh).abs() / spec.target_daily_kwh < 0.02);
        for h in &c.homes {
            let rated = h.ac.cooling_btu(h.ac.num_states).unwrap();
            let max_gain = h.heat_gain.iter().cloned().fold(0.0, f64::max);
            assert!(rated > max_gain);
        }
    }

    #[test]
    fn infeasible_calibration_rejected() {
        let spec = CommunitySpec {
            target_daily_kwh: 15.0,
            ..small_spec(3)
        };
        assert!(matches!(
            generate_community(&spec),
            Err(Error::Generation(_))
        ));
        let spec = CommunitySpec {
            heat_gain_range: [40_000.0, 60_000.0],
            ..small_spec(3)
        };
        assert!(matches!(
            generate_community(&spec),
            Err(Error::Generation(_))
        ));
        let spec = CommunitySpec {
            num_homes: 0,
            ..small_spec(3)
        };
        assert!(matches!(
            generate_community(&spec),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn demand_mode_in_afternoon() {
        let c = generate_community(&small_spec(1000)).unwrap();
        let mut active = vec![0usize; c.clock.slot_count];
        for h in &c.homes {
            for t in h.ac.window() {
                active[t] += 1;
            }
        }
        let mode = (0..active.len())
            .max_by_key(|&t| (active[t], usize::MAX - t))
            .unwrap();
        let hours = mode as f64 * c.clock.slot_duration;
        assert!((13.0..=18.0).contains(&hours), "mode at {hours} h");
    }

    #[test]
    fn aggregate_examples() {
        let clock = SimClock::new(4).unwrap();
        let mk = |id, start, end, ess: Vec<f64>| Home {
            id: HomeId(id),
            essential_load: ess,
            ac: AcUnit {
                rated_power: 5.0,
                eer: 10.0,
                num_states: 3,
                demand_start: start,
                demand_end: end,
            },
            heat_gain: vec![1000.0; 4],
            thermal_capacity: 1000.0,
            initial_temp: 65.0,
        };
        let community = Community::new(
            clock,
            vec![
                mk(0, 0, 1, vec![1.0, 2.0, 3.0, 4.0]),
                mk(1, 2, 3, vec![0.5, 0.5, 0.5, 0.5]),
            ],
        )
        .unwrap();
        let schedules = vec![
            StateSchedule::from_states(vec![2, 3, 3, 3]),
            StateSchedule::from_states(vec![3, 3, 1, 3]),
        ];
        let profile = aggregate_load(&community, &schedules).unwrap();
        // slot 0: 1 + 2.5 + 0.5; slot 1: 2 + 5 + 0.5; slot 2: 3 + 0.5 + 0; slot 3: 4 + 0.5 + 5
        assert_eq!(profile.values(), &[4.0, 7.5, 3.5, 9.5]);
        assert_eq!(peak(&profile), Some((9.5, 3)));

        let off = vec![StateSchedule::from_states(vec![1; 4]); 2];
        assert_eq!(
            aggregate_load(&community, &off).unwrap().values(),
            &[1.5, 2.5, 3.5, 4.5]
        );
        assert!(aggregate_load(&community, &off[..1]).is_err());
    }

    #[test]
    fn full_window_constant_profile() {
        let clock = SimClock::new(24).unwrap();
        let home = Home {
            id: HomeId(0),
            essential_load: vec![0.0; 24],
            ac: AcUnit {
                rated_power: 5.0,
                eer: 10.0,
                num_states: 2,
                demand_start: 0,
                demand_end: 23,
            },
            heat_gain: vec![0.0; 24],
            thermal_capacity: 1.0,
            initial_temp: 65.0,
        };
        let c = Community::new(clock, vec![home]).unwrap();
        assert!(c.baseline().values().iter().all(|&v| v == 5.0));
    }

    #[test]
    fn snapshot_round_trip() {
        let spec = small_spec(5);
        let c = generate_community(&spec).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("community.json");
        save_community(&c, Some(&spec), &path).unwrap();
        let (back, spec_back) = load_community(&path).unwrap();
        assert_eq!(back, c);
        assert_eq!(spec_back, Some(spec));
        assert!(load_community(&dir.path().join("missing.json"))
            .unwrap_err()
            .is_io());
    }
}
