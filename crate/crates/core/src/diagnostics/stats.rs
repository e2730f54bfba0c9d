use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::chains::Trajectory;
use crate::{Error, Result};

/// Number of batches used for batch-means error bars.
pub const DEFAULT_BATCHES: usize = 20;
/// Two-sided confidence level of the reported half-widths.
const CONFIDENCE: f64 = 0.95;

/// Post-burn-in statistics of one observable.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObservableSummary {
    pub observable: String,
    pub mean: f64,
    pub var: f64,
    /// `None` when fewer than two batches fit in the window.
    pub ci_half_width: Option<f64>,
    pub n_samples: usize,
    /// Samples discarded at the start.
    pub burn_in: usize,
    /// Equal-weight average over every sample, burn-in included.
    pub uniform_time_mean: f64,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_var(xs: &[f64], m: f64) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Batch-means confidence half-width for the mean of `xs`.
///
/// The series is cut into `batches` equal batches (the leading remainder is
/// dropped, or fewer batches are used if the series is short).
pub fn batch_means_half_width(xs: &[f64], batches: usize) -> Option<f64> {
    let b = batches.min(xs.len());
    if b < 2 {
        return None;
    }
    let size = xs.len() / b;
    let tail = &xs[xs.len() - b * size..];
    let means: Vec<f64> = tail.chunks(size).map(mean).collect();
    let m = mean(&means);
    let se = (sample_var(&means, m) / b as f64).sqrt();
    let t = StudentsT::new(0.0, 1.0, (b - 1) as f64)
        .ok()?
        .inverse_cdf(0.5 + CONFIDENCE / 2.0);
    Some(t * se)
}

/// Statistics of `series` after dropping the first `burn_in_fraction` of it.
pub fn summarize_series(name: &str, series: &[f64], burn_in_fraction: f64) -> Result<ObservableSummary> {
    if !(0.0..1.0).contains(&burn_in_fraction) {
        return Err(Error::InvalidParameter(format!(
            "burn-in fraction {burn_in_fraction} not in [0, 1)"
        )));
    }
    let burn_in = (burn_in_fraction * series.len() as f64).floor() as usize;
    let window = &series[burn_in..];
    if window.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let m = mean(window);
    Ok(ObservableSummary {
        observable: name.to_string(),
        mean: m,
        var: sample_var(window, m),
        ci_half_width: batch_means_half_width(window, DEFAULT_BATCHES),
        n_samples: window.len(),
        burn_in,
        uniform_time_mean: mean(series),
    })
}

/// Summaries of every observable of `trajectory`.
pub fn summarize(trajectory: &Trajectory, burn_in_fraction: f64) -> Result<Vec<ObservableSummary>> {
    trajectory
        .names
        .iter()
        .zip(&trajectory.series)
        .map(|(name, s)| summarize_series(name, s, burn_in_fraction))
        .collect()
}

/// One-step drift estimate from a recorded series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProbeResult {
    /// `|mean lag-1 difference| / stride`.
    pub estimate: f64,
    pub ci_half_width: Option<f64>,
}

/// Estimates `|E_ν φ − E_{Pν} φ|` per update from the last `window` recorded
/// points of `observable`.
pub fn stability_probe(trajectory: &Trajectory, observable: &str, window: usize) -> Result<ProbeResult> {
    let series = trajectory.series(observable)?;
    probe_series(series, window, trajectory.stride)
}

pub(crate) fn probe_series(series: &[f64], window: usize, stride: u64) -> Result<ProbeResult> {
    if window < 2 {
        return Err(Error::InvalidParameter("window needs at least 2 points".into()));
    }
    if window > series.len() {
        return Err(Error::WindowTooLarge {
            window,
            len: series.len(),
        });
    }
    let tail = &series[series.len() - window..];
    let diffs: Vec<f64> = tail.windows(2).map(|w| (w[1] - w[0]) / stride as f64).collect();
    Ok(ProbeResult {
        estimate: mean(&diffs).abs(),
        ci_half_width: batch_means_half_width(&diffs, DEFAULT_BATCHES),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand::Rng;

    #[test]
    fn constant_series_has_zero_variance() {
        let s = summarize_series("c", &[3.0; 50], 0.2).unwrap();
        assert_eq!(s.var, 0.0);
        assert_eq!(s.mean, 3.0);
        assert_eq!(s.burn_in, 10);
        assert_eq!(s.n_samples, 40);
        assert_eq!(s.ci_half_width, Some(0.0));
    }

    #[test]
    fn iid_signs_mean_near_zero() {
        let mut rng = stream_rng(9, 0);
        let xs: Vec<f64> = (0..10_000)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let s = summarize_series("pm", &xs, 0.0).unwrap();
        assert!(s.mean.abs() < 3.0 / 100.0);
        let hw = s.ci_half_width.unwrap();
        // 95% half-width for sd 1, n = 1e4 is about 0.02
        assert!(hw > 0.005 && hw < 0.05, "{hw}");
    }

    #[test]
    fn zero_burn_in_uses_full_series() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let s = summarize_series("x", &xs, 0.0).unwrap();
        assert_eq!(s.mean, s.uniform_time_mean);
        assert_eq!(s.n_samples, 4);
        assert!(summarize_series("x", &xs, 1.0).is_err());
        assert!(matches!(summarize_series("x", &[], 0.0), Err(Error::EmptyWindow)));
    }

    #[test]
    fn probe_on_linear_drift() {
        // series increasing by 0.3 per recorded point at stride 3
        let xs: Vec<f64> = (0..100).map(|k| 0.3 * k as f64).collect();
        let p = probe_series(&xs, 50, 3).unwrap();
        assert!((p.estimate - 0.1).abs() < 1e-12);
        assert!(matches!(probe_series(&xs, 101, 1), Err(Error::WindowTooLarge { .. })));
    }
}
