//! One home responding to a plan against a fixed aggregate profile.

use ac_drm::{
    generate_community, home_control, max_deviation, simulate_trajectory, CommunitySpec, DrmPlan,
};

fn main() -> ac_drm::Result<()> {
    let spec = CommunitySpec {
        num_homes: 50,
        ac_num_states: 3,
        ..CommunitySpec::default()
    };
    let community = generate_community(&spec)?;
    let plan = DrmPlan::new(65.0, 3.0, 1.0);
    let home = &community.homes[0];

    let (outcome, after) = home_control(home, &plan, &community.baseline(), &community.clock)?;
    let clock = community.clock;
    for t in home.ac.window() {
        let k = outcome.schedule.get(t);
        if k < home.ac.num_states {
            println!("{} state {k}", clock.time_of_day(t));
        }
    }
    let traj = simulate_trajectory(home, &outcome.schedule, &clock)?;
    println!(
        "{}: {} slots throttled, max excess {:.2} F, peak {:.1} -> {:.1} kW",
        home.id,
        outcome.denied_slots,
        max_deviation(&traj, plan.setpoint),
        community.baseline().peak().unwrap().0,
        after.peak().unwrap().0
    );
    Ok(())
}
