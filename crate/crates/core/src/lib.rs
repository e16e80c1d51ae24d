//! # ac-drm
//!
//! Demand-response peak-load reduction for residential communities whose air
//! conditioners can be throttled among `K` discrete power states.
//!
//! A demand-response plan fixes a thermostat setpoint, the largest tolerated
//! excess temperature and the longest time an AC may be held below rated
//! power. Given a community and a plan, the crate
//!
//! * simulates room temperature in each home ([`thermal`]),
//! * runs the sequential grid/home controller that greedily shaves the
//!   aggregate peak ([`engine`]),
//! * solves tiny instances exactly for comparison ([`oracle`]),
//! * generates seeded synthetic communities ([`loadgen`]), and
//! * sweeps plans and state counts into CSV/JSON reports ([`scenario`],
//!   [`report`]).
//!
//! ```
//! use ac_drm::{generate_community, sequential_drm, CommunitySpec, DrmPlan, OrderPolicy};
//!
//! let spec = CommunitySpec { num_homes: 20, ..CommunitySpec::default() };
//! let community = generate_community(&spec).unwrap();
//! let plan = DrmPlan::new(65.0, 3.0, 1.0);
//! let outcome = sequential_drm(&community, &plan, &OrderPolicy::SeededShuffle(7)).unwrap();
//! assert!(outcome.final_peak() <= outcome.baseline_peak());
//! ```

pub mod engine;
pub mod error;
pub mod loadgen;
pub mod model;
pub mod oracle;
pub mod report;
pub mod scenario;
pub mod thermal;

pub use engine::{
    audit_constraints, audit_schedules, home_control, sequential_drm, DrmOutcome, HomeOutcome,
    OrderPolicy, Violation,
};
pub use error::{Error, Result};
pub use loadgen::{aggregate_load, generate_community, peak, Community, CommunitySpec};
pub use model::{
    cooling_capacity, throttle_power, validate_plan, AcUnit, DrmPlan, Home, HomeId, LoadProfile,
    SimClock, StateSchedule,
};
pub use oracle::{brute_force_min_peak, compare_greedy, OracleResult};
pub use report::{emit_profiles, emit_report, ReportFormat};
pub use scenario::{run_scenarios, ResultRow, ScenarioConfig};
pub use thermal::{max_deviation, simulate_trajectory, step_temperature, TemperatureTrajectory};
