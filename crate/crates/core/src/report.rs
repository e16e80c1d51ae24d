//! Report, profile and outcome files.
//!
//! Result reports are CSV with the fixed header
//! `setpoint_f,max_dev_f,max_dur_h,k_states,baseline_peak_kw,final_peak_kw,reduction_pct,homes_saturated`
//! or a JSON array of the same records. Profile files hold
//! `slot_index,time_of_day,baseline_kw,drm_kw`. Output is byte-stable for
//! identical input.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::DrmOutcome;
use crate::error::{Error, Result};
use crate::loadgen::{save_community, Community, CommunitySpec};
use crate::model::{DrmPlan, SimClock};
use crate::scenario::{CellOutcome, ResultRow};

pub const REPORT_HEADER: &str = "setpoint_f,max_dev_f,max_dur_h,k_states,baseline_peak_kw,final_peak_kw,reduction_pct,homes_saturated";
pub const PROFILE_HEADER: &str = "slot_index,time_of_day,baseline_kw,drm_kw";
pub const OUTCOME_SCHEMA: &str = "ac-drm/outcome/v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::Validation(vec![format!(
                "unknown report format `{other}` (expected csv or json)"
            )])),
        }
    }
}

fn parse_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Renders rows in the given format. Percentages are rounded to one decimal.
pub fn render_report(rows: &[ResultRow], format: ReportFormat) -> Result<Vec<u8>> {
    if rows.is_empty() {
        return Err(Error::Validation(vec!["no result rows to report".into()]));
    }
    let reported: Vec<ResultRow> = rows.iter().map(ResultRow::reported).collect();
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &reported {
                w.serialize(row).map_err(|e| Error::domain(e.to_string()))?;
            }
            w.into_inner().map_err(|e| Error::domain(e.to_string()))
        }
        ReportFormat::Json => {
            let mut out =
                serde_json::to_vec_pretty(&reported).map_err(|e| Error::domain(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

pub fn emit_report(rows: &[ResultRow], format: ReportFormat, path: &Path) -> Result<()> {
    write_file(path, &render_report(rows, format)?)
}

pub fn read_report(path: &Path) -> Result<Vec<ResultRow>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if path.extension().is_some_and(|e| e == "json") {
        return serde_json::from_slice(&bytes).map_err(|e| parse_err(path, e));
    }
    let mut reader = csv::Reader::from_reader(bytes.as_slice());
    let header = reader
        .headers()
        .map_err(|e| parse_err(path, e))?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if header != REPORT_HEADER {
        return Err(parse_err(path, format!("unexpected header `{header}`")));
    }
    reader
        .deserialize()
        .collect::<std::result::Result<Vec<ResultRow>, _>>()
        .map_err(|e| parse_err(path, e))
}

/// One line of a profile file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub slot_index: usize,
    pub time_of_day: String,
    pub baseline_kw: f64,
    pub drm_kw: f64,
}

pub fn profile_rows(outcome: &DrmOutcome) -> Result<Vec<ProfileRow>> {
    let base = outcome.baseline.values();
    let drm = outcome.final_profile.values();
    if base.len() != drm.len() {
        return Err(Error::domain(
            "baseline and final profiles differ in length",
        ));
    }
    let clock = SimClock::new(base.len())?;
    Ok(base
        .iter()
        .zip(drm)
        .enumerate()
        .map(|(t, (&b, &d))| ProfileRow {
            slot_index: t,
            time_of_day: clock.time_of_day(t),
            baseline_kw: b,
            drm_kw: d,
        })
        .collect())
}

/// Writes the baseline and controlled aggregate profiles side by side.
pub fn emit_profiles(outcome: &DrmOutcome, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in profile_rows(outcome)? {
        w.serialize(row).map_err(|e| Error::domain(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::domain(e.to_string()))?;
    write_file(path, &bytes)
}

pub fn read_profiles(path: &Path) -> Result<Vec<ProfileRow>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    csv::Reader::from_reader(bytes.as_slice())
        .deserialize()
        .collect::<std::result::Result<Vec<ProfileRow>, _>>()
        .map_err(|e| parse_err(path, e))
}

/// A controller outcome saved for later re-auditing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeFile {
    pub schema: String,
    pub plan: DrmPlan,
    pub num_states: u16,
    pub outcome: DrmOutcome,
}

pub fn save_outcome(
    plan: &DrmPlan,
    num_states: u16,
    outcome: &DrmOutcome,
    path: &Path,
) -> Result<()> {
    let file = OutcomeFile {
        schema: OUTCOME_SCHEMA.into(),
        plan: *plan,
        num_states,
        outcome: outcome.clone(),
    };
    let bytes = serde_json::to_vec(&file).map_err(|e| Error::domain(e.to_string()))?;
    write_file(path, &bytes)
}

pub fn load_outcome(path: &Path) -> Result<OutcomeFile> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let file: OutcomeFile = serde_json::from_slice(&bytes).map_err(|e| parse_err(path, e))?;
    if file.schema != OUTCOME_SCHEMA {
        return Err(parse_err(
            path,
            format!("schema `{}`, expected `{OUTCOME_SCHEMA}`", file.schema),
        ));
    }
    Ok(file)
}

/// Files produced by [`write_run`].
#[derive(Debug, Clone, Default)]
pub struct WrittenFiles {
    pub report: PathBuf,
    pub profiles: Vec<PathBuf>,
    pub outcomes: Vec<PathBuf>,
    pub community: Option<PathBuf>,
}

/// Writes the report, one profile file per cell and, optionally, the
/// community snapshot and per-cell outcomes into `dir`.
pub fn write_run(
    dir: &Path,
    cells: &[CellOutcome],
    format: ReportFormat,
    community: Option<(&Community, Option<&CommunitySpec>)>,
    save_outcomes: bool,
) -> Result<WrittenFiles> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let rows: Vec<ResultRow> = cells.iter().map(|c| c.row.clone()).collect();
    let mut written = WrittenFiles {
        report: dir.join(format!("report.{}", format.extension())),
        ..WrittenFiles::default()
    };
    emit_report(&rows, format, &written.report)?;
    for cell in cells {
        let path = dir.join(format!("profile_{}.csv", cell.stem()));
        emit_profiles(&cell.outcome, &path)?;
        written.profiles.push(path);
        if save_outcomes {
            let path = dir.join(format!("outcome_{}.json", cell.stem()));
            save_outcome(&cell.plan, cell.num_states, &cell.outcome, &path)?;
            written.outcomes.push(path);
        }
    }
    if let Some((community, spec)) = community {
        let path = dir.join("community.json");
        save_community(community, spec, &path)?;
        written.community = Some(path);
    }
    Ok(written)
}
