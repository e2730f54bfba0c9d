use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rand_distr::Poisson;
use serde::{Deserialize, Serialize};

use super::{Configuration, SiteChain};
use crate::diagnostics::{summarize_series, ObservableRegistry, ObservableSummary};
use crate::rng::stream_rng;
use crate::{Error, Result};

/// Run length: a fixed number of updates, or continuous time `T` realised
/// as `Poisson(T)` updates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunLength {
    Steps(u64),
    Continuous(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub length: RunLength,
    /// Updates between recorded samples.
    pub stride: u64,
    pub seed: u64,
    pub stream: u64,
}

/// Seeded run record.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub seed: u64,
    pub stream: u64,
    pub step_count: u64,
    pub stride: u64,
    /// Update counts at which samples were taken (`0, stride, 2·stride, …`).
    #[serde(skip)]
    pub recorded_steps: Vec<u64>,
    #[serde(skip)]
    pub names: Vec<String>,
    #[serde(skip)]
    pub series: Vec<Vec<f64>>,
    /// Observable values at the final state.
    pub final_values: Vec<f64>,
    /// Full-series statistics (no burn-in).
    pub summary: Vec<ObservableSummary>,
}

impl Trajectory {
    pub fn series(&self, name: &str) -> Result<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|k| self.series[k].as_slice())
            .ok_or_else(|| Error::UnknownObservable(name.to_string()))
    }

    pub fn final_value(&self, name: &str) -> Result<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|k| self.final_values[k])
            .ok_or_else(|| Error::UnknownObservable(name.to_string()))
    }

    /// CSV with header `step,<observable>...`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step");
        for name in &self.names {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (row, step) in self.recorded_steps.iter().enumerate() {
            let _ = write!(out, "{step}");
            for s in &self.series {
                let _ = write!(out, ",{}", s[row]);
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Runs `chain` from `state`, recording the named observables every
/// `stride` updates (and at update 0). `state` is left at the final state.
pub fn run_chain<C: SiteChain>(
    chain: &C,
    state: &mut C::State,
    config: &RunConfig,
    registry: &ObservableRegistry,
    names: &[&str],
) -> Result<Trajectory> {
    let specs = registry.resolve(names)?;
    if config.stride == 0 {
        return Err(Error::InvalidParameter("stride must be at least 1".into()));
    }
    if state.dim() != chain.dim() {
        return Err(Error::Mismatch("state and chain dimensions differ".into()));
    }
    let mut rng = stream_rng(config.seed, config.stream);
    let steps = match config.length {
        RunLength::Steps(s) => s,
        RunLength::Continuous(0.0) => 0,
        RunLength::Continuous(t) if t > 0.0 && t.is_finite() => {
            let dist = Poisson::new(t).map_err(|e| Error::InvalidParameter(format!("continuous time {t}: {e}")))?;
            rng.sample(dist) as u64
        }
        RunLength::Continuous(t) => return Err(Error::InvalidParameter(format!("invalid continuous time {t}"))),
    };

    let samples = (steps / config.stride + 1) as usize;
    let mut recorded_steps = Vec::with_capacity(samples);
    let mut series: Vec<Vec<f64>> = vec![Vec::with_capacity(samples); specs.len()];
    let record = |state: &C::State, series: &mut Vec<Vec<f64>>| {
        for (s, spec) in series.iter_mut().zip(&specs) {
            s.push(spec.eval(state));
        }
    };

    recorded_steps.push(0);
    record(state, &mut series);
    let mut done = 0u64;
    while done < steps {
        let chunk = config.stride.min(steps - done);
        for _ in 0..chunk {
            chain.step(state, &mut rng);
        }
        done += chunk;
        if chunk == config.stride {
            recorded_steps.push(done);
            record(state, &mut series);
        }
    }

    let final_values = specs.iter().map(|s| s.eval(state)).collect();
    let summary = specs
        .iter()
        .zip(&series)
        .map(|(spec, s)| summarize_series(spec.name(), s, 0.0))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        seed: config.seed,
        stream: config.stream,
        step_count: steps,
        stride: config.stride,
        recorded_steps,
        names: specs.iter().map(|s| s.name().to_string()).collect(),
        series,
        final_values,
        summary,
    })
}
