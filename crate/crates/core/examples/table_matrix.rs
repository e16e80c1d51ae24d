//! The reference plan/K matrix, written as a CSV report with profiles.

use ac_drm::report::write_run;
use ac_drm::scenario::run_config;
use ac_drm::{ReportFormat, ScenarioConfig};

fn main() -> ac_drm::Result<()> {
    let config = ScenarioConfig::reference();
    let run = run_config(&config, "reference".as_ref())?;

    println!("dev dur |   K=2   K=3   K=5");
    for chunk in run.rows().chunks(config.state_counts.len()) {
        let cuts: Vec<String> = chunk
            .iter()
            .map(|r| format!("{:5.1}", r.reduction_pct))
            .collect();
        println!(
            "{:3} {:3} | {}",
            chunk[0].max_deviation,
            chunk[0].max_duration,
            cuts.join(" ")
        );
    }

    let dir = std::env::temp_dir().join("ac-drm-matrix");
    let written = write_run(&dir, &run.cells, ReportFormat::Csv, None, false)?;
    println!("report: {}", written.report.display());
    Ok(())
}
