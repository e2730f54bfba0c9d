use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{ExperimentConfig, OutputFormat, SamplingMode, Scenario};
use super::oracle::OracleCheck;
use crate::chains::Trajectory;
use crate::diagnostics::{stability_probe, summarize, ObservableSummary, ProbeResult};
use crate::Result;

/// Largest window of the per-run stability probe.
pub const PROBE_WINDOW: usize = 1000;

/// One replica of one setting.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub replica: usize,
    pub stream: u64,
    pub step_count: u64,
    /// Headline observable averaged over every recorded sample.
    pub uniform_time_mean: f64,
    /// Headline observable at the final state.
    pub end_state: f64,
    /// Post-burn-in statistics of every recorded observable.
    pub summaries: Vec<ObservableSummary>,
    /// One-step drift of the headline observable over the last samples.
    pub probe: Option<ProbeResult>,
    /// Per-trajectory output file, relative to the output directory.
    pub trajectory_file: Option<String>,
}

/// Replicas sharing one chain.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupReport {
    pub label: String,
    pub lambda: f64,
    pub beta: Option<f64>,
    pub observable: String,
    /// Replica mean of the statistic selected by the sampling mode.
    pub statistic: f64,
    pub uniform_time_mean: f64,
    pub end_state_mean: f64,
    pub post_burn_in_mean: f64,
    /// Standard error of `statistic` across replicas (`None` for one replica).
    pub replica_std_error: Option<f64>,
    pub runs: Vec<RunReport>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "<=")]
    AtMost,
}

/// A named threshold comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Check {
            name: name.to_string(),
            value,
            relation: Relation::AtLeast,
            threshold,
            pass: value >= threshold,
        }
    }

    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Check {
            name: name.to_string(),
            value,
            relation: Relation::AtMost,
            threshold,
            pass: value <= threshold,
        }
    }
}

/// Summary report of one scenario run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub scenario: Scenario,
    /// Resolved configuration (file-supplied instances update `n` and the
    /// model parameters to their actual values).
    pub config: ExperimentConfig,
    pub instance: serde_json::Value,
    pub groups: Vec<GroupReport>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub oracle: Vec<OracleCheck>,
    pub pass: bool,
}

impl Report {
    pub fn group(&self, label: &str) -> Option<&GroupReport> {
        self.groups.iter().find(|g| g.label == label)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// A group's trajectories, kept for per-trajectory output.
#[derive(Clone, Debug)]
pub struct GroupRuns {
    pub label: String,
    pub trajectories: Vec<Trajectory>,
}

/// Report plus the raw trajectories behind it.
#[derive(Clone, Debug)]
pub struct ScenarioOutput {
    pub report: Report,
    pub runs: Vec<GroupRuns>,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn std_error(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    Some((var / xs.len() as f64).sqrt())
}

/// File name of replica `replica` of group `label`.
pub fn trajectory_file_name(label: &str, replica: usize) -> String {
    format!("{label}_r{replica}.csv")
}

/// Aggregates the replicas of one group around `observable`.
pub fn group_report(
    config: &ExperimentConfig,
    label: &str,
    lambda: f64,
    beta: Option<f64>,
    observable: &str,
    trajectories: &[Trajectory],
) -> Result<GroupReport> {
    let mut runs = Vec::with_capacity(trajectories.len());
    for (replica, t) in trajectories.iter().enumerate() {
        let series = t.series(observable)?;
        let window = series.len().min(PROBE_WINDOW);
        let probe = if window >= 2 {
            Some(stability_probe(t, observable, window)?)
        } else {
            None
        };
        runs.push(RunReport {
            replica,
            stream: t.stream,
            step_count: t.step_count,
            uniform_time_mean: mean(series),
            end_state: t.final_value(observable)?,
            summaries: summarize(t, config.burn_in)?,
            probe,
            trajectory_file: (config.out.is_some() && config.format == OutputFormat::Csv)
                .then(|| trajectory_file_name(label, replica)),
        });
    }
    let uniform: Vec<f64> = runs.iter().map(|r| r.uniform_time_mean).collect();
    let end: Vec<f64> = runs.iter().map(|r| r.end_state).collect();
    let post: Vec<f64> = runs
        .iter()
        .map(|r| {
            r.summaries
                .iter()
                .find(|s| s.observable == observable)
                .map_or(f64::NAN, |s| s.mean)
        })
        .collect();
    let headline = match config.mode {
        SamplingMode::UniformTime => &uniform,
        SamplingMode::EndState => &end,
    };
    Ok(GroupReport {
        label: label.to_string(),
        lambda,
        beta,
        observable: observable.to_string(),
        statistic: mean(headline),
        uniform_time_mean: mean(&uniform),
        end_state_mean: mean(&end),
        post_burn_in_mean: mean(&post),
        replica_std_error: std_error(headline),
        runs,
    })
}

#[derive(Serialize)]
struct TrajectoryRecord<'a> {
    label: &'a str,
    replica: usize,
    seed: u64,
    stream: u64,
    stride: u64,
    step_count: u64,
    steps: &'a [u64],
    series: BTreeMap<&'a str, &'a [f64]>,
}

/// Writes `report.json` and the per-trajectory files into `dir`.
/// Returns the paths written.
pub fn write_outputs(output: &ScenarioOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let report_path = dir.join("report.json");
    std::fs::write(&report_path, serde_json::to_string_pretty(&output.report)? + "\n")?;
    written.push(report_path);
    match output.report.config.format {
        OutputFormat::Csv => {
            for group in &output.runs {
                for (r, t) in group.trajectories.iter().enumerate() {
                    let path = dir.join(trajectory_file_name(&group.label, r));
                    t.write_csv(&path)?;
                    written.push(path);
                }
            }
        }
        OutputFormat::Json => {
            let records: Vec<TrajectoryRecord> = output
                .runs
                .iter()
                .flat_map(|g| {
                    g.trajectories.iter().enumerate().map(move |(r, t)| TrajectoryRecord {
                        label: &g.label,
                        replica: r,
                        seed: t.seed,
                        stream: t.stream,
                        stride: t.stride,
                        step_count: t.step_count,
                        steps: &t.recorded_steps,
                        series: t
                            .names
                            .iter()
                            .map(|s| s.as_str())
                            .zip(t.series.iter().map(|s| s.as_slice()))
                            .collect(),
                    })
                })
                .collect();
            if !records.is_empty() {
                let path = dir.join("trajectories.json");
                std::fs::write(&path, serde_json::to_string(&records)? + "\n")?;
                written.push(path);
            }
        }
    }
    Ok(written)
}
