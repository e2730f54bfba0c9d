use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Indepset,
    Spiked,
    Sbm,
    Oracle,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Indepset => "indepset",
            Scenario::Spiked => "spiked",
            Scenario::Sbm => "sbm",
            Scenario::Oracle => "oracle",
        }
    }
}

/// Per-trajectory output format. The summary report is always JSON.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Which statistic a report leads with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMode {
    /// Equal-weight average over every recorded sample of `[0, T]`.
    UniformTime,
    /// Observable at the final state.
    EndState,
}

/// Fully resolved experiment configuration. Every report embeds one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub n: usize,
    /// Degree (indepset, sbm).
    pub d: f64,
    /// Signal strength (spiked, sbm).
    pub lambda: f64,
    /// Inverse temperatures (sbm).
    pub beta: Vec<f64>,
    /// Spectral margin of `W` (spiked).
    pub kappa: f64,
    /// Updates per run, used unless `time` is set.
    pub steps: u64,
    /// Continuous time `T`, realised as `Poisson(T)` updates.
    pub time: Option<f64>,
    pub replicas: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    /// Edge-list input (indepset).
    pub graph: Option<PathBuf>,
    /// Instance JSON input (spiked).
    pub instance: Option<PathBuf>,
    pub mode: SamplingMode,
    /// Updates between recorded samples.
    pub stride: u64,
    /// Fraction of samples discarded for the post-burn-in statistics.
    pub burn_in: f64,
    /// Random instances per oracle check.
    pub instances: usize,
    /// Whether to run the `λ = 0` control.
    pub control: bool,
}

/// Partial configuration: one optional field per key. Used both for the
/// JSON config file and the command-line flags, so the two stay in sync.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    /// Present in echoed report configs; must match the subcommand.
    #[arg(skip)]
    pub scenario: Option<Scenario>,
    /// Number of vertices or spins.
    #[arg(long)]
    pub n: Option<usize>,
    /// Degree (indepset: regular degree; sbm: average degree).
    #[arg(long)]
    pub d: Option<f64>,
    /// Signal strength.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Comma-separated inverse temperatures (sbm).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub beta: Option<Vec<f64>>,
    /// Spectral margin of W (spiked).
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Updates per run.
    #[arg(long)]
    pub steps: Option<u64>,
    /// Continuous time T (Poisson number of updates); overrides --steps.
    #[arg(long)]
    pub time: Option<f64>,
    /// Independent replicas per setting.
    #[arg(long)]
    pub replicas: Option<usize>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (report printed to stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-trajectory output format.
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Edge-list file for the input graph.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Instance JSON file (spiked).
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Headline statistic.
    #[arg(long, value_enum)]
    pub mode: Option<SamplingMode>,
    /// Updates between recorded samples (default max(1, n/10)).
    #[arg(long)]
    pub stride: Option<u64>,
    /// Burn-in fraction for post-burn-in statistics.
    #[arg(long)]
    pub burn_in: Option<f64>,
    /// Random instances per oracle check.
    #[arg(long)]
    pub instances: Option<usize>,
    /// Run the lambda = 0 control (true/false).
    #[arg(long)]
    pub control: Option<bool>,
}

impl ConfigOverrides {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Fields set in `other` replace those in `self`.
    pub fn merge(mut self, other: ConfigOverrides) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            scenario, n, d, lambda, beta, kappa, steps, time, replicas, seed, out, format, graph, instance, mode,
            stride, burn_in, instances, control
        );
        self
    }
}

/// Default SBM inverse-temperature grid `0.1, 0.2, …, 1.0`.
pub fn default_beta_grid() -> Vec<f64> {
    (1..=10).map(|k| k as f64 / 10.0).collect()
}

impl ExperimentConfig {
    /// Built-in defaults for `scenario`.
    pub fn defaults(scenario: Scenario) -> Self {
        let base = ExperimentConfig {
            scenario,
            n: 0,
            d: 0.0,
            lambda: 0.0,
            beta: Vec::new(),
            kappa: 0.0,
            steps: 0,
            time: None,
            replicas: 1,
            seed: 1,
            out: None,
            format: OutputFormat::Csv,
            graph: None,
            instance: None,
            mode: SamplingMode::UniformTime,
            stride: 0,
            burn_in: 0.5,
            instances: 100,
            control: true,
        };
        match scenario {
            Scenario::Indepset => ExperimentConfig {
                n: 2000,
                d: 32.0,
                steps: 50_000_000,
                replicas: 8,
                control: false,
                ..base
            },
            Scenario::Spiked => ExperimentConfig {
                n: 1000,
                lambda: 10.0,
                kappa: 0.25,
                steps: 20_000_000,
                replicas: 2,
                ..base
            },
            Scenario::Sbm => ExperimentConfig {
                n: 2000,
                d: 40.0,
                lambda: 6.0,
                beta: default_beta_grid(),
                steps: 20_000_000,
                replicas: 2,
                ..base
            },
            Scenario::Oracle => ExperimentConfig {
                n: 10,
                control: false,
                ..base
            },
        }
    }

    /// Defaults, then `file`, then `flags`; a zero or missing stride becomes
    /// `max(1, n/10)`.
    pub fn resolve(scenario: Scenario, file: Option<ConfigOverrides>, flags: ConfigOverrides) -> Result<Self> {
        let over = file.unwrap_or_default().merge(flags);
        if let Some(s) = over.scenario {
            if s != scenario {
                return Err(Error::InvalidParameter(format!(
                    "config is for scenario `{}`, not `{}`",
                    s.name(),
                    scenario.name()
                )));
            }
        }
        let mut c = Self::defaults(scenario);
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = over.$f { c.$f = v; } )* };
        }
        set!(n, d, lambda, beta, kappa, steps, replicas, seed, format, mode, burn_in, instances, control);
        if over.time.is_some() {
            c.time = over.time;
        }
        if over.out.is_some() {
            c.out = over.out;
        }
        if over.graph.is_some() {
            c.graph = over.graph;
        }
        if over.instance.is_some() {
            c.instance = over.instance;
        }
        c.stride = over.stride.filter(|&s| s > 0).unwrap_or((c.n as u64 / 10).max(1));
        c.validate()?;
        Ok(c)
    }

    /// Scenario-specific parameter constraints.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.replicas == 0 {
            return bad("replicas must be at least 1".into());
        }
        if self.stride == 0 {
            return bad("stride must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.burn_in) {
            return bad(format!("burn_in must lie in [0, 1), got {}", self.burn_in));
        }
        if let Some(t) = self.time {
            if !(t >= 0.0 && t.is_finite()) {
                return bad(format!("time must be finite and nonnegative, got {t}"));
            }
        }
        match self.scenario {
            Scenario::Indepset => {
                if self.graph.is_none() {
                    if self.d < 1.0 || self.d.fract() != 0.0 {
                        return bad(format!("indepset needs an integer degree d >= 1, got {}", self.d));
                    }
                    if self.n < 2 || self.n % 2 == 1 || self.d > (self.n / 2) as f64 {
                        return bad(format!(
                            "bipartite regular graph needs even n and d <= n/2 (n = {}, d = {})",
                            self.n, self.d
                        ));
                    }
                }
            }
            Scenario::Spiked => {
                if self.instance.is_none() {
                    if !(self.kappa > 0.0 && self.kappa < 0.5) {
                        return bad(format!("kappa must lie in (0, 1/2), got {}", self.kappa));
                    }
                    if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
                        return bad(format!("lambda must be finite and nonnegative, got {}", self.lambda));
                    }
                    if self.n == 0 {
                        return bad("n must be at least 1".into());
                    }
                }
            }
            Scenario::Sbm => {
                if !(self.d > 0.0) || self.d >= self.n as f64 {
                    return bad(format!("need 0 < d < n, got d = {}, n = {}", self.d, self.n));
                }
                if !(self.lambda >= 0.0) || self.lambda * self.lambda > self.d {
                    return bad(format!(
                        "need 0 <= lambda and lambda^2 <= d, got lambda = {}, d = {}",
                        self.lambda, self.d
                    ));
                }
                if self.beta.is_empty() || self.beta.iter().any(|b| !(*b > 0.0 && b.is_finite())) {
                    return bad("beta grid must be nonempty and positive".into());
                }
            }
            Scenario::Oracle => {
                if self.instances == 0 {
                    return bad("instances must be at least 1".into());
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_is_defaults_file_flags() {
        let file = ConfigOverrides {
            n: Some(100),
            d: Some(4.0),
            seed: Some(3),
            ..Default::default()
        };
        let flags = ConfigOverrides {
            seed: Some(9),
            ..Default::default()
        };
        let c = ExperimentConfig::resolve(Scenario::Indepset, Some(file), flags).unwrap();
        assert_eq!((c.n, c.d, c.seed), (100, 4.0, 9));
        assert_eq!(c.steps, 50_000_000);
        assert_eq!(c.stride, 10);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = serde_json::from_str::<ConfigOverrides>(r#"{"n": 10, "temperature": 1}"#);
        assert!(err.is_err());
    }

    #[test]
    fn echoed_config_is_accepted_as_input() {
        let c = ExperimentConfig::resolve(Scenario::Spiked, None, ConfigOverrides::default()).unwrap();
        let over: ConfigOverrides = serde_json::from_value(serde_json::to_value(&c).unwrap()).unwrap();
        let again = ExperimentConfig::resolve(Scenario::Spiked, Some(over.clone()), ConfigOverrides::default());
        assert_eq!(again.unwrap(), c);
        assert!(ExperimentConfig::resolve(Scenario::Sbm, Some(over), ConfigOverrides::default()).is_err());
    }

    #[test]
    fn scenario_constraints() {
        let flags = |lambda: f64| ConfigOverrides {
            lambda: Some(lambda),
            ..Default::default()
        };
        assert!(ExperimentConfig::resolve(Scenario::Sbm, None, flags(7.0)).is_err());
        assert!(ExperimentConfig::resolve(Scenario::Sbm, None, flags(6.0)).is_ok());
        let k = ConfigOverrides {
            kappa: Some(0.5),
            ..Default::default()
        };
        assert!(ExperimentConfig::resolve(Scenario::Spiked, None, k).is_err());
    }

    #[test]
    fn resolved_config_round_trips() {
        let c = ExperimentConfig::resolve(Scenario::Sbm, None, ConfigOverrides::default()).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(c.beta.len(), 10);
    }
}
