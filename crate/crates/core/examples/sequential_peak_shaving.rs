//! The grid controller over a full community, with a coarse before/after plot.

use ac_drm::{generate_community, sequential_drm, CommunitySpec, DrmPlan, OrderPolicy};

fn main() -> ac_drm::Result<()> {
    let community = generate_community(&CommunitySpec::default())?;
    let plan = DrmPlan::new(65.0, 3.0, 1.5);
    let outcome = sequential_drm(&community, &plan, &OrderPolicy::SeededShuffle(7))?;

    let base = outcome.baseline.values();
    let drm = outcome.final_profile.values();
    let scale = outcome.baseline_peak() / 60.0;
    for t in (community.clock.slot_at(10.0)..community.clock.slot_at(22.0)).step_by(6) {
        let b = (base[t] / scale) as usize;
        let d = (drm[t] / scale) as usize;
        println!(
            "{} {}{}",
            community.clock.time_of_day(t),
            "#".repeat(d),
            ".".repeat(b - d)
        );
    }
    let cut = 100.0 * (1.0 - outcome.final_peak() / outcome.baseline_peak());
    println!(
        "peak {:.1} -> {:.1} kW ({cut:.1}%), {} homes saturated",
        outcome.baseline_peak(),
        outcome.final_peak(),
        outcome.saturated_count()
    );
    Ok(())
}
