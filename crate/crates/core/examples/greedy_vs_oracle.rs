//! Controller peak against the exhaustive optimum on small random instances.

use ac_drm::oracle::desk_instance;
use ac_drm::{compare_greedy, OrderPolicy};

fn main() -> ac_drm::Result<()> {
    let mut total = 0.0;
    let mut worst = (0.0, 0);
    for seed in 0..40 {
        let (community, plan) = desk_instance(seed);
        let g = compare_greedy(&community, &plan, &OrderPolicy::Index)?;
        assert!(g.gap >= -1e-9);
        total += g.gap;
        if g.gap > worst.0 {
            worst = (g.gap, seed);
        }
        if seed < 8 {
            println!(
                "seed {seed:2}: {} homes K={} greedy {:.3} optimum {:.3}",
                community.len(),
                community.homes[0].ac.num_states,
                g.greedy_peak,
                g.oracle_peak
            );
        }
    }
    println!(
        "mean gap {:.3} kW, worst {:.3} kW (seed {})",
        total / 40.0,
        worst.0,
        worst.1
    );
    Ok(())
}
