//! Sequential grid/home controller for peak reduction.
//!
//! The grid controller visits homes one at a time, handing each the current
//! aggregate profile. A home repeatedly picks the highest remaining slot of
//! the profile inside its demand window and throttles it to the lowest state
//! that keeps the whole window trajectory within the plan's severity bound,
//! until its denial budget is spent or no candidate slot remains.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loadgen::{aggregate_load, Community};
use crate::model::{validate_plan, DrmPlan, Home, HomeId, LoadProfile, SimClock, StateSchedule};
use crate::thermal::{simulate_trajectory, ThermalModel, SEVERITY_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomeOutcome {
    pub home: HomeId,
    pub schedule: StateSchedule,
    /// Demanded slots run below rated power.
    pub denied_slots: usize,
    /// Largest excess over the setpoint along the final trajectory, °F.
    pub max_severity_observed: f64,
    /// The denial budget was positive and fully used.
    pub duration_saturated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrmOutcome {
    pub baseline: LoadProfile,
    pub final_profile: LoadProfile,
    /// One entry per home, in community order.
    pub per_home: Vec<HomeOutcome>,
    /// Order in which homes were visited.
    pub order: Vec<HomeId>,
}

impl DrmOutcome {
    pub fn schedules(&self) -> Vec<StateSchedule> {
        self.per_home.iter().map(|h| h.schedule.clone()).collect()
    }

    pub fn baseline_peak(&self) -> f64 {
        self.baseline.peak().map_or(0.0, |p| p.0)
    }

    pub fn final_peak(&self) -> f64 {
        self.final_profile.peak().map_or(0.0, |p| p.0)
    }

    pub fn saturated_count(&self) -> usize {
        self.per_home
            .iter()
            .filter(|h| h.duration_saturated)
            .count()
    }
}

/// Order in which the grid controller visits homes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderPolicy {
    /// Community index order.
    Index,
    /// Uniform shuffle from a seeded generator.
    SeededShuffle(u64),
    /// Explicit permutation of community indices.
    Given(Vec<usize>),
}

impl Default for OrderPolicy {
    fn default() -> Self {
        OrderPolicy::SeededShuffle(0)
    }
}

impl OrderPolicy {
    pub fn permutation(&self, n: usize) -> Result<Vec<usize>> {
        match self {
            OrderPolicy::Index => Ok((0..n).collect()),
            OrderPolicy::SeededShuffle(seed) => {
                let mut order: Vec<usize> = (0..n).collect();
                order.shuffle(&mut ChaCha8Rng::seed_from_u64(*seed));
                Ok(order)
            }
            OrderPolicy::Given(order) => {
                let mut seen = vec![false; n];
                if order.len() != n {
                    return Err(Error::Validation(vec![format!(
                        "given order has {} entries for {n} homes",
                        order.len()
                    )]));
                }
                for &i in order {
                    if i >= n || std::mem::replace(&mut seen[i], true) {
                        return Err(Error::Validation(vec![format!(
                            "given order is not a permutation of 0..{n}"
                        )]));
                    }
                }
                Ok(order.clone())
            }
        }
    }
}

/// Runs the home controller for one home against the current aggregate
/// `profile`, returning its outcome and the updated profile.
///
/// `profile` must already include this home's AC at rated power throughout
/// its demand window.
pub fn home_control(
    home: &Home,
    plan: &DrmPlan,
    profile: &LoadProfile,
    clock: &SimClock,
) -> Result<(HomeOutcome, LoadProfile)> {
    let budget = validate_plan(plan, clock)?;
    if profile.len() != clock.slot_count {
        return Err(Error::domain(format!(
            "profile has {} slots, clock has {}",
            profile.len(),
            clock.slot_count
        )));
    }
    let model = ThermalModel::new(home, clock)?;
    let ac = &home.ac;
    let rated_state = ac.num_states;
    let limit = plan.max_deviation + SEVERITY_TOLERANCE;

    let mut profile = profile.clone();
    let mut schedule = StateSchedule::rated(clock.slot_count, rated_state);
    let mut states = schedule.states().to_vec();
    let mut eligible = vec![true; ac.window_len()];
    let mut denied = 0;

    while denied < budget {
        let Some(slot) = highest_eligible(&profile, ac.demand_start, &eligible) else {
            break;
        };
        eligible[slot - ac.demand_start] = false;

        let mut accepted = rated_state;
        for k in 1..rated_state {
            states[slot] = k;
            if model.max_excess(&states, plan.setpoint) <= limit {
                accepted = k;
                break;
            }
        }
        states[slot] = accepted;
        if accepted < rated_state {
            profile.values_mut()[slot] -= ac.rated_power - ac.power(accepted)?;
            denied += 1;
        }
    }

    for t in ac.window() {
        schedule.set(t, states[t]);
    }
    let max_severity_observed = model.max_excess(&states, plan.setpoint);
    Ok((
        HomeOutcome {
            home: home.id,
            schedule,
            denied_slots: denied,
            max_severity_observed,
            duration_saturated: budget > 0 && denied == budget,
        },
        profile,
    ))
}

fn highest_eligible(profile: &LoadProfile, start: usize, eligible: &[bool]) -> Option<usize> {
    let values = profile.values();
    let mut best: Option<usize> = None;
    for (i, _) in eligible.iter().enumerate().filter(|(_, e)| **e) {
        let t = start + i;
        match best {
            Some(b) if values[t] <= values[b] => {}
            _ => best = Some(t),
        }
    }
    best
}

/// Visits every home in the order given by `policy`, threading the aggregate
/// profile from one home controller to the next.
///
/// The returned final profile is recomputed from the chosen schedules, so it
/// equals [`aggregate_load`] over them bit for bit.
pub fn sequential_drm(
    community: &Community,
    plan: &DrmPlan,
    policy: &OrderPolicy,
) -> Result<DrmOutcome> {
    let (outcome, _) = sequential_drm_threaded(community, plan, policy)?;
    Ok(outcome)
}

/// As [`sequential_drm`], also returning the profile as threaded through the
/// home controllers (equal to the final profile up to rounding).
pub fn sequential_drm_threaded(
    community: &Community,
    plan: &DrmPlan,
    policy: &OrderPolicy,
) -> Result<(DrmOutcome, LoadProfile)> {
    validate_plan(plan, &community.clock)?;
    let order = policy.permutation(community.len())?;
    let baseline = community.baseline();
    let mut profile = baseline.clone();
    let mut per_home: Vec<Option<HomeOutcome>> = vec![None; community.len()];
    for &j in &order {
        let (outcome, updated) =
            home_control(&community.homes[j], plan, &profile, &community.clock)?;
        per_home[j] = Some(outcome);
        profile = updated;
    }
    let per_home: Vec<HomeOutcome> = per_home.into_iter().map(|o| o.expect("visited")).collect();
    let schedules: Vec<StateSchedule> = per_home.iter().map(|h| h.schedule.clone()).collect();
    let final_profile = aggregate_load(community, &schedules)?;
    Ok((
        DrmOutcome {
            baseline,
            final_profile,
            per_home,
            order: order.iter().map(|&j| community.homes[j].id).collect(),
        },
        profile,
    ))
}

/// A broken constraint found by [`audit_constraints`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    /// Room temperature exceeded setpoint + max deviation.
    Severity {
        home: HomeId,
        slot: usize,
        temp: f64,
        limit: f64,
    },
    /// More demanded slots below rated power than the plan allows.
    Duration {
        home: HomeId,
        denied: usize,
        budget: usize,
    },
    /// Schedule has the wrong length or a state outside `1..=K`.
    MalformedSchedule { home: HomeId, detail: String },
    /// Outcome does not line up with the community.
    Structure { detail: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Severity {
                home,
                slot,
                temp,
                limit,
            } => write!(
                f,
                "{home}: {temp:.4} °F at slot {slot} exceeds {limit:.4} °F"
            ),
            Violation::Duration {
                home,
                denied,
                budget,
            } => write!(f, "{home}: {denied} denied slots exceed budget {budget}"),
            Violation::MalformedSchedule { home, detail } => write!(f, "{home}: {detail}"),
            Violation::Structure { detail } => f.write_str(detail),
        }
    }
}

/// Independently re-derives trajectories and counters from the schedules in
/// `schedules` and lists every constraint they break.
pub fn audit_schedules(
    community: &Community,
    plan: &DrmPlan,
    schedules: &[StateSchedule],
) -> Vec<Violation> {
    let mut out = Vec::new();
    let budget = match validate_plan(plan, &community.clock) {
        Ok(b) => b,
        Err(e) => {
            out.push(Violation::Structure {
                detail: e.to_string(),
            });
            return out;
        }
    };
    if schedules.len() != community.len() {
        out.push(Violation::Structure {
            detail: format!(
                "{} schedules for {} homes",
                schedules.len(),
                community.len()
            ),
        });
        return out;
    }
    let limit = plan.setpoint + plan.max_deviation + SEVERITY_TOLERANCE;
    for (home, schedule) in community.homes.iter().zip(schedules) {
        let k_max = home.ac.num_states;
        if schedule.len() != community.clock.slot_count {
            out.push(Violation::MalformedSchedule {
                home: home.id,
                detail: format!("schedule has {} slots", schedule.len()),
            });
            continue;
        }
        if let Some((t, k)) = schedule
            .states()
            .iter()
            .enumerate()
            .find(|(_, &k)| k < 1 || k > k_max)
        {
            out.push(Violation::MalformedSchedule {
                home: home.id,
                detail: format!("state {k} at slot {t} outside 1..={k_max}"),
            });
            continue;
        }
        let traj = match simulate_trajectory(home, schedule, &community.clock) {
            Ok(traj) => traj,
            Err(e) => {
                out.push(Violation::MalformedSchedule {
                    home: home.id,
                    detail: e.to_string(),
                });
                continue;
            }
        };
        for (i, &temp) in traj.temps.iter().enumerate() {
            if temp > limit {
                out.push(Violation::Severity {
                    home: home.id,
                    slot: traj.start_slot + i,
                    temp,
                    limit: plan.setpoint + plan.max_deviation,
                });
            }
        }
        let denied = schedule.denied_slots(&home.ac);
        if denied > budget {
            out.push(Violation::Duration {
                home: home.id,
                denied,
                budget,
            });
        }
    }
    out
}

/// Audits a full controller outcome, including its bookkeeping.
pub fn audit_constraints(
    community: &Community,
    plan: &DrmPlan,
    outcome: &DrmOutcome,
) -> Vec<Violation> {
    let schedules = outcome.schedules();
    let mut out = audit_schedules(community, plan, &schedules);
    for (home, h) in community.homes.iter().zip(&outcome.per_home) {
        if home.id != h.home {
            out.push(Violation::Structure {
                detail: format!("outcome entry {} does not match {}", h.home, home.id),
            });
        }
    }
    if let Ok(recomputed) = aggregate_load(community, &schedules) {
        if recomputed != outcome.final_profile {
            out.push(Violation::Structure {
                detail: "final profile differs from the aggregate of the schedules".into(),
            });
        }
    }
    if community.baseline() != outcome.baseline {
        out.push(Violation::Structure {
            detail: "baseline profile differs from the community at rated power".into(),
        });
    }
    out
}
