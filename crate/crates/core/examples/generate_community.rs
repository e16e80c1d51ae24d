//! Synthesise a seeded community, summarise it and save a snapshot.

use ac_drm::loadgen::{load_community, save_community};
use ac_drm::{generate_community, peak, CommunitySpec};

fn main() -> ac_drm::Result<()> {
    let spec = CommunitySpec {
        num_homes: 200,
        seed: 11,
        ..CommunitySpec::default()
    };
    let community = generate_community(&spec)?;
    let clock = community.clock;

    let baseline = community.baseline();
    let (kw, slot) = peak(&baseline).expect("non-empty profile");
    println!(
        "{} homes, baseline peak {kw:.1} kW at {}",
        community.len(),
        clock.time_of_day(slot)
    );

    let mut starts = [0usize; 24];
    for h in &community.homes {
        starts[h.ac.demand_start / 12] += 1;
    }
    for (hour, n) in starts.iter().enumerate().filter(|(_, n)| **n > 0) {
        println!("{hour:02}:00 {}", "#".repeat(*n / 2));
    }

    let dir = std::env::temp_dir().join("ac-drm-example");
    std::fs::create_dir_all(&dir).map_err(|e| ac_drm::Error::Io {
        path: dir.clone(),
        source: e,
    })?;
    let path = dir.join("community.json");
    save_community(&community, Some(&spec), &path)?;
    let (back, _) = load_community(&path)?;
    assert_eq!(back, community);
    println!("snapshot: {}", path.display());
    Ok(())
}
