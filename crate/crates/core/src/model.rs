//! Domain types and the algebraic power/cooling relations.
//!
//! Units are fixed across the crate: electrical power in kW, time in hours,
//! temperature in °F, heat flows in BTU/hr and thermal capacity in BTU/°F.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// BTU/hr delivered by one kW of thermal power.
pub const BTU_PER_HR_PER_KW: f64 = 3412.14;

/// BTU/hr in one ton of refrigeration.
pub const BTU_PER_HR_PER_TON: f64 = 12_000.0;

/// Minimum energy efficiency ratio accepted for an air conditioner.
pub const MIN_EER: f64 = 8.0;

const CLOCK_TOLERANCE: f64 = 1e-9;

/// Uniform discretisation of one day.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimClock {
    pub slot_count: usize,
    /// Length of one slot in hours.
    pub slot_duration: f64,
}

impl SimClock {
    pub fn new(slot_count: usize) -> Result<Self> {
        if slot_count == 0 {
            return Err(Error::Validation(vec!["slot_count must be >= 1".into()]));
        }
        Ok(Self {
            slot_count,
            slot_duration: 24.0 / slot_count as f64,
        })
    }

    /// 288 five-minute slots.
    pub fn five_minute() -> Self {
        Self {
            slot_count: 288,
            slot_duration: 24.0 / 288.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut errors = Vec::new();
        if self.slot_count == 0 {
            errors.push("slot_count must be >= 1".to_string());
        }
        if !self.slot_duration.is_finite() || self.slot_duration <= 0.0 {
            errors.push("slot_duration must be positive and finite".to_string());
        } else if (self.slot_count as f64 * self.slot_duration - 24.0).abs() > CLOCK_TOLERANCE {
            errors.push(format!(
                "slot_count x slot_duration = {} h, expected 24 h",
                self.slot_count as f64 * self.slot_duration
            ));
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errors))
        }
    }

    /// Clock time of the start of `slot`, formatted `HH:MM`.
    pub fn time_of_day(&self, slot: usize) -> String {
        let minutes = (slot as f64 * self.slot_duration * 60.0).round() as u64;
        format!("{:02}:{:02}", minutes / 60, minutes % 60)
    }

    /// Slot index containing clock time `hours` (clamped into the day).
    pub fn slot_at(&self, hours: f64) -> usize {
        let slot = (hours / self.slot_duration).floor();
        (slot.max(0.0) as usize).min(self.slot_count - 1)
    }

    /// Number of whole slots in `hours`, if `hours` is a non-negative
    /// integer multiple of the slot length.
    pub fn whole_slots(&self, hours: f64) -> Option<usize> {
        if !hours.is_finite() || hours < 0.0 {
            return None;
        }
        let ratio = hours / self.slot_duration;
        let rounded = ratio.round();
        if (ratio - rounded).abs() <= CLOCK_TOLERANCE * ratio.max(1.0) {
            Some(rounded as usize)
        } else {
            None
        }
    }
}

impl Default for SimClock {
    fn default() -> Self {
        Self::five_minute()
    }
}

/// A demand-response contract: setpoint, tolerated excess temperature and
/// the longest time the AC may be held below rated power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrmPlan {
    /// Thermostat setpoint in °F.
    pub setpoint: f64,
    /// Largest allowed excess over the setpoint, °F.
    pub max_deviation: f64,
    /// Largest total time below rated power, hours.
    pub max_denied_duration: f64,
}

impl DrmPlan {
    pub fn new(setpoint: f64, max_deviation: f64, max_denied_duration: f64) -> Self {
        Self {
            setpoint,
            max_deviation,
            max_denied_duration,
        }
    }
}

/// Checks `plan` against `clock` and returns the denial budget in slots.
pub fn validate_plan(plan: &DrmPlan, clock: &SimClock) -> Result<usize> {
    let mut errors = Vec::new();
    if !plan.setpoint.is_finite() {
        errors.push("setpoint must be finite".to_string());
    }
    if !plan.max_deviation.is_finite() || plan.max_deviation < 0.0 {
        errors.push(format!(
            "max_deviation must be finite and >= 0 (got {})",
            plan.max_deviation
        ));
    }
    if !plan.max_denied_duration.is_finite() || plan.max_denied_duration < 0.0 {
        errors.push(format!(
            "max_denied_duration must be finite and >= 0 (got {})",
            plan.max_denied_duration
        ));
    }
    let slots = clock.whole_slots(plan.max_denied_duration);
    if slots.is_none() && plan.max_denied_duration.is_finite() && plan.max_denied_duration >= 0.0 {
        errors.push(format!(
            "max_denied_duration {} h is not a multiple of the {} h slot length",
            plan.max_denied_duration, clock.slot_duration
        ));
    }
    match slots {
        Some(slots) if errors.is_empty() => Ok(slots),
        _ => Err(Error::Validation(errors)),
    }
}

/// A throttleable air conditioner and its demand window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcUnit {
    /// Rated electrical power, kW.
    pub rated_power: f64,
    /// Energy efficiency ratio, BTU per watt-hour.
    pub eer: f64,
    /// Number of throttle states; state 1 is off, state `num_states` is rated power.
    pub num_states: u16,
    /// First demanded slot (inclusive).
    pub demand_start: usize,
    /// Last demanded slot (inclusive).
    pub demand_end: usize,
}

impl AcUnit {
    pub fn window(&self) -> RangeInclusive<usize> {
        self.demand_start..=self.demand_end
    }

    pub fn window_len(&self) -> usize {
        self.demand_end - self.demand_start + 1
    }

    pub fn is_demanded(&self, slot: usize) -> bool {
        self.window().contains(&slot)
    }

    /// Electrical draw in state `k`.
    pub fn power(&self, k: u16) -> Result<f64> {
        throttle_power(k, self.num_states, self.rated_power)
    }

    /// Cooling delivered in state `k`, BTU/hr.
    pub fn cooling_btu(&self, k: u16) -> Result<f64> {
        cooling_btu_per_hr(self.eer, self.power(k)?)
    }

    pub fn validate(&self, clock: &SimClock) -> Result<()> {
        let mut errors = Vec::new();
        if !self.rated_power.is_finite() || self.rated_power <= 0.0 {
            errors.push(format!(
                "rated_power must be > 0 (got {})",
                self.rated_power
            ));
        }
        if !self.eer.is_finite() || self.eer < MIN_EER {
            errors.push(format!("eer must be >= {MIN_EER} (got {})", self.eer));
        }
        if self.num_states < 2 {
            errors.push(format!("num_states must be >= 2 (got {})", self.num_states));
        }
        if self.demand_start > self.demand_end {
            errors.push(format!(
                "demand_start {} after demand_end {}",
                self.demand_start, self.demand_end
            ));
        }
        if self.demand_end >= clock.slot_count {
            errors.push(format!(
                "demand_end {} outside the {}-slot day",
                self.demand_end, clock.slot_count
            ));
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errors))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HomeId(pub u32);

impl std::fmt::Display for HomeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "home-{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Home {
    pub id: HomeId,
    /// Uncontrollable demand per slot, kW.
    pub essential_load: Vec<f64>,
    pub ac: AcUnit,
    /// Heat gain of the dwelling per slot, BTU/hr.
    pub heat_gain: Vec<f64>,
    /// Heat needed to raise room temperature by 1 °F, BTU/°F.
    pub thermal_capacity: f64,
    /// Room temperature at the start of the demand window, °F.
    pub initial_temp: f64,
}

impl Home {
    pub fn validate(&self, clock: &SimClock) -> Result<()> {
        let mut errors = Vec::new();
        let who = self.id;
        if let Err(Error::Validation(ac)) = self.ac.validate(clock) {
            errors.extend(ac.into_iter().map(|e| format!("{who}: {e}")));
        }
        if self.essential_load.len() != clock.slot_count {
            errors.push(format!(
                "{who}: essential_load has {} slots, expected {}",
                self.essential_load.len(),
                clock.slot_count
            ));
        }
        if self
            .essential_load
            .iter()
            .any(|v| !v.is_finite() || *v < 0.0)
        {
            errors.push(format!("{who}: essential_load must be finite and >= 0"));
        }
        if self.heat_gain.len() != clock.slot_count {
            errors.push(format!(
                "{who}: heat_gain has {} slots, expected {}",
                self.heat_gain.len(),
                clock.slot_count
            ));
        }
        if self.heat_gain.iter().any(|v| !v.is_finite() || *v < 0.0) {
            errors.push(format!("{who}: heat_gain must be finite and >= 0"));
        }
        if !self.thermal_capacity.is_finite() || self.thermal_capacity <= 0.0 {
            errors.push(format!("{who}: thermal_capacity must be > 0"));
        }
        if !self.initial_temp.is_finite() {
            errors.push(format!("{who}: initial_temp must be finite"));
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errors))
        }
    }
}

/// One throttle state per slot for a single AC.
///
/// Slots outside the demand window are stored as the rated state and ignored
/// by every consumer.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateSchedule(Vec<u16>);

impl StateSchedule {
    /// Every slot at rated power.
    pub fn rated(slot_count: usize, num_states: u16) -> Self {
        Self(vec![num_states; slot_count])
    }

    pub fn from_states(states: Vec<u16>) -> Self {
        Self(states)
    }

    pub fn states(&self) -> &[u16] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, slot: usize) -> u16 {
        self.0[slot]
    }

    pub fn set(&mut self, slot: usize, state: u16) {
        self.0[slot] = state;
    }

    /// Demanded slots in which the AC runs below rated power.
    pub fn denied_slots(&self, ac: &AcUnit) -> usize {
        ac.window()
            .filter(|&t| self.0.get(t).is_some_and(|&k| k < ac.num_states))
            .count()
    }
}

/// Aggregated community demand per slot, kW.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LoadProfile(Vec<f64>);

impl LoadProfile {
    pub fn new(load: Vec<f64>) -> Self {
        Self(load)
    }

    pub fn zeros(slot_count: usize) -> Self {
        Self(vec![0.0; slot_count])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest value and the earliest slot attaining it.
    pub fn peak(&self) -> Option<(f64, usize)> {
        let mut best: Option<(f64, usize)> = None;
        for (t, &v) in self.0.iter().enumerate() {
            match best {
                Some((b, _)) if v <= b => {}
                _ => best = Some((v, t)),
            }
        }
        best
    }
}

/// Electrical draw of a `num_states`-state AC in state `k`.
pub fn throttle_power(k: u16, num_states: u16, rated_power: f64) -> Result<f64> {
    if num_states < 2 {
        return Err(Error::domain(format!(
            "num_states must be >= 2 (got {num_states})"
        )));
    }
    if k < 1 || k > num_states {
        return Err(Error::domain(format!("state {k} outside 1..={num_states}")));
    }
    if !rated_power.is_finite() || rated_power <= 0.0 {
        return Err(Error::domain(format!(
            "rated_power must be > 0 (got {rated_power})"
        )));
    }
    if k == num_states {
        return Ok(rated_power);
    }
    Ok(f64::from(k - 1) / f64::from(num_states - 1) * rated_power)
}

/// Cooling output in BTU/hr for `electrical_power` kW at the given EER.
pub fn cooling_btu_per_hr(eer: f64, electrical_power: f64) -> Result<f64> {
    if !eer.is_finite() || eer < MIN_EER {
        return Err(Error::domain(format!(
            "eer must be >= {MIN_EER} (got {eer})"
        )));
    }
    if !electrical_power.is_finite() || electrical_power < 0.0 {
        return Err(Error::domain(format!(
            "electrical power must be >= 0 (got {electrical_power})"
        )));
    }
    Ok(eer * electrical_power * 1000.0)
}

/// Cooling output in kW-thermal for `electrical_power` kW at the given EER.
pub fn cooling_capacity(eer: f64, electrical_power: f64) -> Result<f64> {
    Ok(cooling_btu_per_hr(eer, electrical_power)? / BTU_PER_HR_PER_KW)
}

pub fn kw_thermal_to_tons(kw: f64) -> f64 {
    kw * BTU_PER_HR_PER_KW / BTU_PER_HR_PER_TON
}
