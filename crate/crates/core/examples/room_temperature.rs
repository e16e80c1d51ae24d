//! Room temperature of one home through its demand window, at rated power
//! and with the AC switched off for the first hour.

use ac_drm::{max_deviation, simulate_trajectory, AcUnit, Home, HomeId, SimClock, StateSchedule};

fn main() -> ac_drm::Result<()> {
    let clock = SimClock::five_minute();
    let start = clock.slot_at(15.0);
    let home = Home {
        id: HomeId(0),
        essential_load: vec![1.0; clock.slot_count],
        ac: AcUnit {
            rated_power: 5.0,
            eer: 10.0,
            num_states: 2,
            demand_start: start,
            demand_end: start + 47,
        },
        heat_gain: vec![49_900.0; clock.slot_count],
        thermal_capacity: 6_400.0,
        initial_temp: 65.0,
    };

    let rated = StateSchedule::rated(clock.slot_count, 2);
    let mut off = rated.clone();
    for t in start..start + 12 {
        off.set(t, 1);
    }

    let a = simulate_trajectory(&home, &rated, &clock)?;
    let b = simulate_trajectory(&home, &off, &clock)?;
    println!("time   rated    1 h off");
    for (i, (x, y)) in a.temps.iter().zip(&b.temps).enumerate().step_by(6) {
        println!("{}  {x:6.2}  {y:6.2}", clock.time_of_day(start + i));
    }
    println!(
        "max excess over 65 F: rated {:.3}, off {:.3}",
        max_deviation(&a, 65.0),
        max_deviation(&b, 65.0)
    );
    Ok(())
}
