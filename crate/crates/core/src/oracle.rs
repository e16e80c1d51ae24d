//! Exhaustive minimum-peak solver for small instances.
//!
//! Each home's feasible window assignments (severity bound on the full
//! trajectory, denial budget) are enumerated independently with prefix
//! pruning, then combined by a depth-first search over homes in index order.
//! Per-slot sums are accumulated in the same order as
//! [`aggregate_load`](crate::loadgen::aggregate_load), so the reported peak is
//! bit-identical to re-aggregating the returned schedules.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{sequential_drm, OrderPolicy};
use crate::error::{Error, Result};
use crate::loadgen::Community;
use crate::model::{validate_plan, AcUnit, DrmPlan, Home, HomeId, SimClock, StateSchedule};
use crate::thermal::{ThermalModel, SEVERITY_TOLERANCE};

/// Largest raw search space (product of `K^window` over homes) accepted by default.
pub const DEFAULT_SEARCH_CAP: f64 = 1e7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub optimal_peak: f64,
    pub schedules: Vec<StateSchedule>,
    /// Complete assignments evaluated.
    pub explored: u64,
}

/// Raw number of joint window assignments before any pruning.
pub fn search_space_size(community: &Community) -> f64 {
    community
        .homes
        .iter()
        .map(|h| f64::from(h.ac.num_states).powi(h.ac.window_len() as i32))
        .product()
}

pub fn brute_force_min_peak(community: &Community, plan: &DrmPlan) -> Result<OracleResult> {
    brute_force_min_peak_capped(community, plan, DEFAULT_SEARCH_CAP)
}

pub fn brute_force_min_peak_capped(
    community: &Community,
    plan: &DrmPlan,
    cap: f64,
) -> Result<OracleResult> {
    let budget = validate_plan(plan, &community.clock)?;
    let size = search_space_size(community);
    if size > cap {
        return Err(Error::SearchSpace { size, cap });
    }
    let slots = community.clock.slot_count;

    // Slots touched by some window; every other slot is fixed.
    let mut in_union = vec![false; slots];
    for h in &community.homes {
        for t in h.ac.window() {
            in_union[t] = true;
        }
    }
    let union: Vec<usize> = (0..slots).filter(|&t| in_union[t]).collect();
    let mut fixed_peak = f64::NEG_INFINITY;
    for t in (0..slots).filter(|&t| !in_union[t]) {
        let mut v = 0.0;
        for h in &community.homes {
            v += h.essential_load[t] + 0.0;
        }
        fixed_peak = fixed_peak.max(v);
    }

    let mut options = Vec::with_capacity(community.len());
    for home in &community.homes {
        let feasible = feasible_assignments(community, home, plan, budget)?;
        if feasible.is_empty() {
            return Err(Error::Infeasible(format!(
                "{} has no assignment satisfying the plan",
                home.id
            )));
        }
        // Per-union-slot contribution `essential + ac` of each assignment.
        let contributions: Vec<Vec<f64>> = feasible
            .iter()
            .map(|states| {
                union
                    .iter()
                    .map(|&t| {
                        let ac = if home.ac.is_demanded(t) {
                            home.ac
                                .power(states[t - home.ac.demand_start])
                                .expect("enumerated states are in range")
                        } else {
                            0.0
                        };
                        home.essential_load[t] + ac
                    })
                    .collect()
            })
            .collect();
        options.push((feasible, contributions));
    }

    let mut search = Search {
        options: &options,
        best_peak: f64::INFINITY,
        best: vec![0; options.len()],
        choice: vec![0; options.len()],
        explored: 0,
    };
    let sums = vec![0.0; union.len()];
    search.descend(0, &sums, fixed_peak);

    let schedules: Vec<StateSchedule> = community
        .homes
        .iter()
        .zip(&options)
        .zip(&search.best)
        .map(|((home, (feasible, _)), &idx)| {
            let mut schedule = StateSchedule::rated(slots, home.ac.num_states);
            for (i, &k) in feasible[idx].iter().enumerate() {
                schedule.set(home.ac.demand_start + i, k);
            }
            schedule
        })
        .collect();

    Ok(OracleResult {
        optimal_peak: search.best_peak,
        schedules,
        explored: search.explored,
    })
}

/// Feasible window assignments of one home and their per-union-slot loads.
type HomeOptions = (Vec<Vec<u16>>, Vec<Vec<f64>>);

struct Search<'a> {
    options: &'a [HomeOptions],
    best_peak: f64,
    best: Vec<usize>,
    choice: Vec<usize>,
    explored: u64,
}

impl Search<'_> {
    fn descend(&mut self, home: usize, sums: &[f64], lower_bound: f64) {
        if home == self.options.len() {
            self.explored += 1;
            if lower_bound < self.best_peak {
                self.best_peak = lower_bound;
                self.best.clone_from(&self.choice);
            }
            return;
        }
        let contributions = &self.options[home].1;
        let mut next = vec![0.0; sums.len()];
        for (idx, contribution) in contributions.iter().enumerate() {
            let mut bound = lower_bound;
            for ((n, s), c) in next.iter_mut().zip(sums).zip(contribution) {
                *n = s + c;
                bound = bound.max(*n);
            }
            // Remaining homes only add non-negative load.
            if bound >= self.best_peak {
                continue;
            }
            self.choice[home] = idx;
            self.descend(home + 1, &next, bound);
        }
    }
}

/// All window assignments for one home meeting the severity bound at every
/// trajectory point and the denial budget, in lexicographic order.
fn feasible_assignments(
    community: &Community,
    home: &Home,
    plan: &DrmPlan,
    budget: usize,
) -> Result<Vec<Vec<u16>>> {
    let model = ThermalModel::new(home, &community.clock)?;
    let limit = plan.setpoint + plan.max_deviation + SEVERITY_TOLERANCE;
    let mut out = Vec::new();
    if home.initial_temp > limit {
        return Ok(out);
    }
    let mut states = Vec::with_capacity(home.ac.window_len());
    enumerate(
        &model,
        limit,
        budget,
        home.initial_temp,
        0,
        &mut states,
        &mut out,
    );
    Ok(out)
}

fn enumerate(
    model: &ThermalModel<'_>,
    limit: f64,
    budget: usize,
    theta: f64,
    denied: usize,
    states: &mut Vec<u16>,
    out: &mut Vec<Vec<u16>>,
) {
    let ac = &model.home().ac;
    if states.len() == ac.window_len() {
        out.push(states.clone());
        return;
    }
    let t = ac.demand_start + states.len();
    for k in 1..=ac.num_states {
        let throttled = k < ac.num_states;
        if throttled && denied == budget {
            continue;
        }
        let next = model.step(theta, t, k);
        if next > limit {
            continue;
        }
        states.push(k);
        enumerate(
            model,
            limit,
            budget,
            next,
            denied + throttled as usize,
            states,
            out,
        );
        states.pop();
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreedyGap {
    pub greedy_peak: f64,
    pub oracle_peak: f64,
    /// `greedy_peak - oracle_peak`.
    pub gap: f64,
}

/// Runs the sequential controller and the exhaustive solver on one instance.
pub fn compare_greedy(
    community: &Community,
    plan: &DrmPlan,
    policy: &OrderPolicy,
) -> Result<GreedyGap> {
    let oracle = brute_force_min_peak(community, plan)?;
    let greedy = sequential_drm(community, plan, policy)?;
    let greedy_peak = greedy.final_peak();
    Ok(GreedyGap {
        greedy_peak,
        oracle_peak: oracle.optimal_peak,
        gap: greedy_peak - oracle.optimal_peak,
    })
}

/// A random desk-scale instance: 1-3 homes on an hourly clock, windows of
/// 1-6 slots, K in {2, 3}, sized to fit [`DEFAULT_SEARCH_CAP`].
pub fn desk_instance(seed: u64) -> (Community, DrmPlan) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clock = SimClock::new(24).expect("24 slots");
    let num_homes = rng.gen_range(1..=3usize);
    let num_states: u16 = rng.gen_range(2..=3);
    let mut lengths: Vec<usize> = (0..num_homes).map(|_| rng.gen_range(1..=6)).collect();
    let space =
        |lengths: &[usize]| f64::from(num_states).powi(lengths.iter().sum::<usize>() as i32);
    while space(&lengths) > DEFAULT_SEARCH_CAP {
        let longest = (0..lengths.len())
            .max_by_key(|&i| lengths[i])
            .expect("non-empty");
        lengths[longest] -= 1;
    }

    let rated_power = 5.0;
    let eer = 10.0;
    let rated_cooling = eer * rated_power * 1000.0;
    let homes = lengths
        .iter()
        .enumerate()
        .map(|(j, &len)| {
            let start = rng.gen_range(10..=14);
            let gain = rated_cooling * rng.gen_range(0.5..0.98);
            Home {
                id: HomeId(j as u32),
                essential_load: (0..clock.slot_count)
                    .map(|_| rng.gen_range(0.2..2.0))
                    .collect(),
                ac: AcUnit {
                    rated_power,
                    eer,
                    num_states,
                    demand_start: start,
                    demand_end: start + len - 1,
                },
                heat_gain: vec![gain; clock.slot_count],
                thermal_capacity: rng.gen_range(15_000.0..60_000.0),
                initial_temp: 65.0,
            }
        })
        .collect();
    let max_deviation = [0.0, 0.5, 1.0, 2.0, 3.0][rng.gen_range(0..5)];
    let max_denied_duration = f64::from(rng.gen_range(0..=4u32));
    let community = Community::new(clock, homes).expect("desk instance is valid");
    (
        community,
        DrmPlan::new(65.0, max_deviation, max_denied_duration),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::audit_schedules;
    use crate::loadgen::aggregate_load;

    fn flat_home(window: (usize, usize), k: u16, gain: f64) -> Community {
        let clock = SimClock::new(24).unwrap();
        Community::new(
            clock,
            vec![Home {
                id: HomeId(0),
                essential_load: vec![1.0; 24],
                ac: AcUnit {
                    rated_power: 5.0,
                    eer: 10.0,
                    num_states: k,
                    demand_start: window.0,
                    demand_end: window.1,
                },
                heat_gain: vec![gain; 24],
                thermal_capacity: 10_000.0,
                initial_temp: 65.0,
            }],
        )
        .unwrap()
    }

    #[test]
    fn zero_budget_keeps_baseline() {
        let c = flat_home((4, 6), 3, 20_000.0);
        let r = brute_force_min_peak(&c, &DrmPlan::new(65.0, 5.0, 0.0)).unwrap();
        assert_eq!(r.optimal_peak, c.baseline().peak().unwrap().0);
        assert_eq!(r.schedules, c.rated_schedules());
        assert_eq!(r.explored, 1);
    }

    #[test]
    fn two_slot_window_both_off() {
        // 4 assignments; with an ample bound and budget 2 the all-off one
        // leaves only the flat essential load.
        let c = flat_home((4, 5), 2, 20_000.0);
        let r = brute_force_min_peak(&c, &DrmPlan::new(65.0, 100.0, 2.0)).unwrap();
        assert_eq!(r.optimal_peak, 1.0);
        assert_eq!(r.schedules[0].get(4), 1);
        assert_eq!(r.schedules[0].get(5), 1);
        assert!(audit_schedules(&c, &DrmPlan::new(65.0, 100.0, 2.0), &r.schedules).is_empty());
    }

    #[test]
    fn cap_is_enforced() {
        let c = flat_home((0, 23), 3, 20_000.0);
        match brute_force_min_peak(&c, &DrmPlan::new(65.0, 1.0, 1.0)) {
            Err(Error::SearchSpace { size, cap }) => {
                assert_eq!(cap, DEFAULT_SEARCH_CAP);
                assert!(size > 2.8e11);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn infeasible_start_reported() {
        let mut c = flat_home((4, 5), 2, 20_000.0);
        c.homes[0].initial_temp = 80.0;
        assert!(matches!(
            brute_force_min_peak(&c, &DrmPlan::new(65.0, 1.0, 1.0)),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn peak_matches_reaggregation() {
        let mut c = flat_home((3, 8), 3, 35_000.0);
        c.homes[0].essential_load = (0..24).map(|t| 0.3 + 0.1 * t as f64).collect();
        let plan = DrmPlan::new(65.0, 0.5, 3.0);
        let r = brute_force_min_peak(&c, &plan).unwrap();
        let again = aggregate_load(&c, &r.schedules).unwrap().peak().unwrap().0;
        assert_eq!(r.optimal_peak, again);
        assert!(audit_schedules(&c, &plan, &r.schedules).is_empty());
    }

    #[test]
    fn desk_instances_fit_the_cap() {
        for seed in 0..50 {
            let (c, plan) = desk_instance(seed);
            assert!((1..=3).contains(&c.len()));
            assert!(search_space_size(&c) <= DEFAULT_SEARCH_CAP);
            assert!(c.homes.iter().all(|h| h.ac.window_len() <= 6));
            validate_plan(&plan, &c.clock).unwrap();
        }
        assert_eq!(desk_instance(9), desk_instance(9));
    }
}
