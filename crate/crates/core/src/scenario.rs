//! Scenario matrix: one controller run per (plan, state count) cell over a
//! shared community.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{sequential_drm, DrmOutcome, OrderPolicy};
use crate::error::{Error, Result};
use crate::loadgen::{generate_community, load_community, Community, CommunitySpec};
use crate::model::{validate_plan, DrmPlan};

/// Current scenario config schema version.
pub const CONFIG_SCHEMA_VERSION: u32 = 1;

/// Where the community for a scenario comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommunitySource {
    Generate(CommunitySpec),
    /// A community snapshot written by `save_community`.
    Path(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderKind {
    #[default]
    SeededShuffle,
    Index,
    Given,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub community: CommunitySource,
    pub plans: Vec<DrmPlan>,
    pub state_counts: Vec<u16>,
    #[serde(default)]
    pub order_policy: OrderKind,
    #[serde(default)]
    pub order_seed: u64,
    /// Permutation of home indices, required when `order_policy` is `given`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub given_order: Option<Vec<usize>>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// The six setpoint/severity/duration plans of the reference case study.
pub fn reference_plans() -> Vec<DrmPlan> {
    let mut plans = Vec::new();
    for dev in [3.0, 5.0] {
        for dur in [1.0, 1.5, 2.0] {
            plans.push(DrmPlan::new(65.0, dev, dur));
        }
    }
    plans
}

impl ScenarioConfig {
    /// 1000-home reference community, six plans, K in {2, 3, 5}.
    pub fn reference() -> Self {
        Self {
            schema_version: CONFIG_SCHEMA_VERSION,
            community: CommunitySource::Generate(CommunitySpec::default()),
            plans: reference_plans(),
            state_counts: vec![2, 3, 5],
            order_policy: OrderKind::SeededShuffle,
            order_seed: 7,
            given_order: None,
            output_dir: default_output_dir(),
        }
    }

    /// Reads a config file, reporting the offending field on failure.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, path)
    }

    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: Self = serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
            path: path.to_path_buf(),
            field: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        if config.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(Error::Config {
                path: path.to_path_buf(),
                field: "schema_version".into(),
                message: format!(
                    "unsupported version {}, expected {CONFIG_SCHEMA_VERSION}",
                    config.schema_version
                ),
            });
        }
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn order(&self) -> Result<OrderPolicy> {
        Ok(match self.order_policy {
            OrderKind::SeededShuffle => OrderPolicy::SeededShuffle(self.order_seed),
            OrderKind::Index => OrderPolicy::Index,
            OrderKind::Given => OrderPolicy::Given(self.given_order.clone().ok_or_else(|| {
                Error::Validation(vec!["given_order required for order_policy `given`".into()])
            })?),
        })
    }

    /// Builds or loads the community. Relative snapshot paths resolve
    /// against `base_dir` when given.
    pub fn resolve_community(&self, base_dir: Option<&Path>) -> Result<Community> {
        match &self.community {
            CommunitySource::Generate(spec) => generate_community(spec),
            CommunitySource::Path(p) => {
                let path = match base_dir {
                    Some(base) if p.is_relative() => base.join(p),
                    _ => p.clone(),
                };
                Ok(load_community(&path)?.0)
            }
        }
    }

    /// Checks the matrix definition against `community`.
    pub fn validate(&self, community: &Community, path: &Path) -> Result<()> {
        let config_err = |field: String, message: String| Error::Config {
            path: path.to_path_buf(),
            field,
            message,
        };
        if self.plans.is_empty() {
            return Err(config_err("plans".into(), "must not be empty".into()));
        }
        if self.state_counts.is_empty() {
            return Err(config_err(
                "state_counts".into(),
                "must not be empty".into(),
            ));
        }
        for (i, &k) in self.state_counts.iter().enumerate() {
            if k < 2 {
                return Err(config_err(format!("state_counts[{i}]"), format!("{k} < 2")));
            }
        }
        for (i, plan) in self.plans.iter().enumerate() {
            if let Err(e) = validate_plan(plan, &community.clock) {
                return Err(config_err(format!("plans[{i}]"), e.to_string()));
            }
        }
        self.order()
            .and_then(|o| o.permutation(community.len()))
            .map_err(|e| config_err("order_policy".into(), e.to_string()))?;
        Ok(())
    }
}

/// One line of the results matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    #[serde(rename = "setpoint_f")]
    pub setpoint: f64,
    #[serde(rename = "max_dev_f")]
    pub max_deviation: f64,
    #[serde(rename = "max_dur_h")]
    pub max_duration: f64,
    #[serde(rename = "k_states")]
    pub num_states: u16,
    pub baseline_peak_kw: f64,
    pub final_peak_kw: f64,
    pub reduction_pct: f64,
    #[serde(rename = "homes_saturated")]
    pub homes_saturated_count: usize,
}

impl ResultRow {
    pub fn from_outcome(plan: &DrmPlan, num_states: u16, outcome: &DrmOutcome) -> Self {
        let baseline = outcome.baseline_peak();
        let final_peak = outcome.final_peak();
        let reduction_pct = if baseline > 0.0 {
            100.0 * (baseline - final_peak) / baseline
        } else {
            0.0
        };
        Self {
            setpoint: plan.setpoint,
            max_deviation: plan.max_deviation,
            max_duration: plan.max_denied_duration,
            num_states,
            baseline_peak_kw: baseline,
            final_peak_kw: final_peak,
            reduction_pct,
            homes_saturated_count: outcome.saturated_count(),
        }
    }

    /// The row as written to reports: percentage rounded to one decimal.
    pub fn reported(&self) -> Self {
        Self {
            reduction_pct: (self.reduction_pct * 10.0).round() / 10.0,
            ..self.clone()
        }
    }

    pub fn plan(&self) -> DrmPlan {
        DrmPlan::new(self.setpoint, self.max_deviation, self.max_duration)
    }
}

/// Controller result for one (plan, K) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellOutcome {
    pub plan: DrmPlan,
    pub num_states: u16,
    pub outcome: DrmOutcome,
    pub row: ResultRow,
}

impl CellOutcome {
    /// Stable file stem naming this cell.
    pub fn stem(&self) -> String {
        format!(
            "sp{}_dev{}_dur{}_k{}",
            self.plan.setpoint,
            self.plan.max_deviation,
            self.plan.max_denied_duration,
            self.num_states
        )
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub community: Community,
    pub cells: Vec<CellOutcome>,
}

impl ScenarioRun {
    pub fn rows(&self) -> Vec<ResultRow> {
        self.cells.iter().map(|c| c.row.clone()).collect()
    }
}

/// Runs every (plan, K) cell against one community, rows ordered plan-major.
pub fn run_matrix(
    community: &Community,
    plans: &[DrmPlan],
    state_counts: &[u16],
    order: &OrderPolicy,
) -> Result<Vec<CellOutcome>> {
    let variants: Vec<(u16, Community)> = state_counts
        .iter()
        .map(|&k| (k, community.with_num_states(k)))
        .collect();
    let cells: Vec<(DrmPlan, usize)> = plans
        .iter()
        .flat_map(|p| (0..variants.len()).map(move |v| (*p, v)))
        .collect();
    cells
        .par_iter()
        .map(|(plan, v)| {
            let (k, community) = &variants[*v];
            let outcome = sequential_drm(community, plan, order)?;
            let row = ResultRow::from_outcome(plan, *k, &outcome);
            Ok(CellOutcome {
                plan: *plan,
                num_states: *k,
                outcome,
                row,
            })
        })
        .collect()
}

/// Resolves the community and runs the full matrix described by `config`.
pub fn run_config(config: &ScenarioConfig, config_path: &Path) -> Result<ScenarioRun> {
    let community = config.resolve_community(config_path.parent())?;
    config.validate(&community, config_path)?;
    let cells = run_matrix(
        &community,
        &config.plans,
        &config.state_counts,
        &config.order()?,
    )?;
    Ok(ScenarioRun { community, cells })
}

/// Result rows for every (plan, K) pair in `config`.
pub fn run_scenarios(config: &ScenarioConfig) -> Result<Vec<ResultRow>> {
    Ok(run_config(config, Path::new("<memory>"))?.rows())
}
