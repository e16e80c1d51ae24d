//! Audit a controller outcome, then tamper with one schedule and audit again.

use ac_drm::sequential_drm;
use ac_drm::{audit_constraints, generate_community, CommunitySpec, DrmPlan, OrderPolicy};

fn main() -> ac_drm::Result<()> {
    let community = generate_community(&CommunitySpec {
        num_homes: 100,
        ..CommunitySpec::default()
    })?;
    let plan = DrmPlan::new(65.0, 3.0, 1.0);
    let mut outcome = sequential_drm(&community, &plan, &OrderPolicy::Index)?;
    println!(
        "clean run: {} violations",
        audit_constraints(&community, &plan, &outcome).len()
    );

    let home = &mut outcome.per_home[0];
    let ac = &community.homes[0].ac;
    for t in ac.window() {
        home.schedule.set(t, 1);
    }
    let violations = audit_constraints(&community, &plan, &outcome);
    println!(
        "home-0 held off all window: {} violations",
        violations.len()
    );
    for v in violations.iter().take(3).chain(violations.last()) {
        println!("  {v}");
    }
    Ok(())
}
