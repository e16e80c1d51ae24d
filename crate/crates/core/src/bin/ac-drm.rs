//! Command-line front end: generate communities, run scenario matrices,
//! compare the controller against the exhaustive solver and re-audit outcomes.
//!
//! Exit codes: 0 success, 1 invalid input or failed audit, 2 I/O failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ac_drm::engine::audit_constraints;
use ac_drm::loadgen::{load_community, save_community};
use ac_drm::oracle::{compare_greedy, desk_instance};
use ac_drm::report::{load_outcome, write_run};
use ac_drm::scenario::{run_config, CommunitySource};
use ac_drm::{
    generate_community, CommunitySpec, Error, OrderPolicy, ReportFormat, Result, ScenarioConfig,
};

#[derive(Parser)]
#[command(
    name = "ac-drm",
    version,
    about = "Residential AC demand response simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesise a community and write its snapshot.
    Generate {
        /// Generator settings (JSON); defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "community.json")]
        out: PathBuf,
    },
    /// Run every (plan, K) cell of a scenario config.
    Run {
        /// Scenario config (JSON); the reference matrix when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the generator seed of a generated community.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; overrides `output_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: ReportFormat,
        /// Also write one outcome file per cell for `audit`.
        #[arg(long)]
        save_outcomes: bool,
    },
    /// Compare the controller with the exhaustive optimum on random small instances.
    Oracle {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        instances: u64,
        /// Gap table (CSV); printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a saved outcome against its community.
    Audit {
        #[arg(long)]
        community: PathBuf,
        #[arg(long)]
        outcome: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate { config, seed, out } => generate(config.as_deref(), seed, &out),
        Command::Run {
            config,
            seed,
            out,
            format,
            save_outcomes,
        } => run(config.as_deref(), seed, out, format, save_outcomes),
        Command::Oracle {
            seed,
            instances,
            out,
        } => oracle(seed, instances, out.as_deref()),
        Command::Audit { community, outcome } => audit(&community, &outcome),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 2 } else { 1 })
        }
    }
}

fn read_spec(path: &Path) -> Result<CommunitySpec> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
        path: path.to_path_buf(),
        field: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

fn generate(config: Option<&Path>, seed: Option<u64>, out: &Path) -> Result<ExitCode> {
    let mut spec = match config {
        Some(path) => read_spec(path)?,
        None => CommunitySpec::default(),
    };
    if let Some(seed) = seed {
        spec.seed = seed;
    }
    let community = generate_community(&spec)?;
    save_community(&community, Some(&spec), out)?;
    println!("wrote {} homes to {}", community.len(), out.display());
    Ok(ExitCode::SUCCESS)
}

fn run(
    config: Option<&Path>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: ReportFormat,
    save_outcomes: bool,
) -> Result<ExitCode> {
    let (mut cfg, cfg_path) = match config {
        Some(path) => (ScenarioConfig::load(path)?, path.to_path_buf()),
        None => (ScenarioConfig::reference(), PathBuf::from("<reference>")),
    };
    if let Some(seed) = seed {
        match &mut cfg.community {
            CommunitySource::Generate(spec) => spec.seed = seed,
            CommunitySource::Path(_) => {
                return Err(Error::Validation(vec![
                    "--seed applies only to generated communities".into(),
                ]))
            }
        }
    }
    let dir = out.unwrap_or_else(|| cfg.output_dir.clone());
    let run = run_config(&cfg, &cfg_path)?;
    let spec = match &cfg.community {
        CommunitySource::Generate(spec) => Some(spec),
        CommunitySource::Path(_) => None,
    };
    let written = write_run(
        &dir,
        &run.cells,
        format,
        Some((&run.community, spec)),
        save_outcomes,
    )?;
    for row in run.rows().iter().map(|r| r.reported()) {
        println!(
            "sp {:>4} dev {:>3} dur {:>3} K {}: {:>8.1} -> {:>8.1} kW ({:>4.1}%), {} saturated",
            row.setpoint,
            row.max_deviation,
            row.max_duration,
            row.num_states,
            row.baseline_peak_kw,
            row.final_peak_kw,
            row.reduction_pct,
            row.homes_saturated_count
        );
    }
    println!("report: {}", written.report.display());
    Ok(ExitCode::SUCCESS)
}

fn oracle(seed: u64, instances: u64, out: Option<&Path>) -> Result<ExitCode> {
    let mut csv = String::from(
        "instance,homes,k_states,max_dev_f,max_dur_h,order,greedy_peak_kw,oracle_peak_kw,gap_kw\n",
    );
    let mut worst = 0.0f64;
    for i in 0..instances {
        let instance = seed.wrapping_add(i);
        let (community, plan) = desk_instance(instance);
        let k = community.homes[0].ac.num_states;
        for (name, policy) in [
            ("index", OrderPolicy::Index),
            ("shuffle", OrderPolicy::SeededShuffle(instance)),
        ] {
            let gap = compare_greedy(&community, &plan, &policy)?;
            if gap.gap < 0.0 {
                return Err(Error::Validation(vec![format!(
                    "instance {instance}: controller beat the exhaustive optimum"
                )]));
            }
            worst = worst.max(gap.gap);
            csv.push_str(&format!(
                "{instance},{},{k},{},{},{name},{},{},{}\n",
                community.len(),
                plan.max_deviation,
                plan.max_denied_duration,
                gap.greedy_peak,
                gap.oracle_peak,
                gap.gap
            ));
        }
    }
    match out {
        Some(path) => {
            fs::write(path, &csv).map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
            println!(
                "{instances} instances, largest gap {worst:.4} kW; table: {}",
                path.display()
            );
        }
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn audit(community: &Path, outcome: &Path) -> Result<ExitCode> {
    let (community, _) = load_community(community)?;
    let file = load_outcome(outcome)?;
    let community = community.with_num_states(file.num_states);
    let violations = audit_constraints(&community, &file.plan, &file.outcome);
    if violations.is_empty() {
        println!("ok: {} homes, no violations", community.len());
        return Ok(ExitCode::SUCCESS);
    }
    for v in &violations {
        println!("{v}");
    }
    eprintln!("{} violation(s)", violations.len());
    Ok(ExitCode::from(1))
}
