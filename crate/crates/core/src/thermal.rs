//! Discrete-time room temperature dynamics inside the demand window.
//!
//! Each slot the room gains `dt * G(t) / dc` degrees from the dwelling heat
//! gain and, while the AC is demanded, loses `dt * Z_k / dc` degrees to the
//! cooling delivered in the active throttle state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Home, SimClock, StateSchedule};

/// Slack allowed when comparing a temperature excess to a plan bound.
pub const SEVERITY_TOLERANCE: f64 = 1e-9;

/// Room temperature at the start of one slot, given the previous slot.
pub fn step_temperature(
    theta: f64,
    heat_gain: f64,
    cooling: f64,
    demanded: bool,
    dt: f64,
    dc: f64,
) -> Result<f64> {
    let inputs = [theta, heat_gain, cooling, dt, dc];
    if inputs.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("non-finite input to temperature step"));
    }
    if dt <= 0.0 || dc <= 0.0 {
        return Err(Error::domain(format!(
            "slot length and thermal capacity must be > 0 (dt={dt}, dc={dc})"
        )));
    }
    if heat_gain < 0.0 || cooling < 0.0 {
        return Err(Error::domain("heat gain and cooling must be >= 0"));
    }
    let active = if demanded { 1.0 } else { 0.0 };
    Ok(theta + dt * heat_gain / dc - dt * cooling / dc * active)
}

/// Temperatures at the start of every demanded slot plus the slot after the
/// window closes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemperatureTrajectory {
    /// Slot index of `temps[0]` (the first demanded slot).
    pub start_slot: usize,
    pub temps: Vec<f64>,
}

impl TemperatureTrajectory {
    pub fn len(&self) -> usize {
        self.temps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.temps.is_empty()
    }
}

/// Largest excess of the trajectory over `setpoint`; negative when the room
/// stays below it throughout.
pub fn max_deviation(traj: &TemperatureTrajectory, setpoint: f64) -> f64 {
    traj.temps
        .iter()
        .map(|t| t - setpoint)
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn simulate_trajectory(
    home: &Home,
    schedule: &StateSchedule,
    clock: &SimClock,
) -> Result<TemperatureTrajectory> {
    if schedule.len() != clock.slot_count {
        return Err(Error::domain(format!(
            "schedule has {} slots, clock has {}",
            schedule.len(),
            clock.slot_count
        )));
    }
    let ac = &home.ac;
    let mut temps = Vec::with_capacity(ac.window_len() + 1);
    let mut theta = home.initial_temp;
    temps.push(theta);
    for t in ac.window() {
        let cooling = ac.cooling_btu(schedule.get(t))?;
        theta = step_temperature(
            theta,
            home.heat_gain[t],
            cooling,
            ac.is_demanded(t),
            clock.slot_duration,
            home.thermal_capacity,
        )?;
        temps.push(theta);
    }
    Ok(TemperatureTrajectory {
        start_slot: ac.demand_start,
        temps,
    })
}

/// Precomputed per-state cooling for one home, for repeated trajectory
/// evaluation inside search loops.
#[derive(Debug, Clone)]
pub struct ThermalModel<'a> {
    home: &'a Home,
    /// `cooling[k]` in BTU/hr; index 0 unused.
    cooling: Vec<f64>,
    dt: f64,
}

impl<'a> ThermalModel<'a> {
    pub fn new(home: &'a Home, clock: &SimClock) -> Result<Self> {
        home.validate(clock)?;
        let mut cooling = vec![0.0];
        for k in 1..=home.ac.num_states {
            cooling.push(home.ac.cooling_btu(k)?);
        }
        Ok(Self {
            home,
            cooling,
            dt: clock.slot_duration,
        })
    }

    pub fn home(&self) -> &Home {
        self.home
    }

    /// Temperature at the start of slot `t + 1` from `theta` at slot `t`.
    #[inline]
    pub fn step(&self, theta: f64, t: usize, state: u16) -> f64 {
        let dc = self.home.thermal_capacity;
        theta + self.dt * self.home.heat_gain[t] / dc - self.dt * self.cooling[state as usize] / dc
    }

    /// Largest excess over `setpoint` along the full window trajectory.
    pub fn max_excess(&self, states: &[u16], setpoint: f64) -> f64 {
        let mut theta = self.home.initial_temp;
        let mut worst = theta - setpoint;
        for t in self.home.ac.window() {
            theta = self.step(theta, t, states[t]);
            worst = worst.max(theta - setpoint);
        }
        worst
    }
}
