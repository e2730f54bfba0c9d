use serde::Serialize;
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use super::table::{enumerate_ising, ExactTable};
use crate::models::{InteractionOperator, IsingModel};
use crate::{Error, Result};

/// Largest `n` accepted by [`tilted_mean_curve`].
pub const MAX_CURVE_SITES: usize = 14;

/// `𝒯_w π` (density `∝ e^{⟨w,x⟩}`) together with its mean vector.
pub fn tilt(pi: &ExactTable, w: &[f64]) -> Result<(ExactTable, Vec<f64>)> {
    if w.len() != pi.n() {
        return Err(Error::Mismatch("tilt vector has the wrong length".into()));
    }
    let logw: Vec<f64> = (0..pi.len())
        .map(|k| {
            let p = pi.probs()[k];
            if p > 0.0 {
                p.ln() + pi.linear(k, w)
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    let table = ExactTable::from_log_weights(pi.n(), pi.kind(), pi.states().to_vec(), &logw)?;
    let mean = table.mean();
    Ok((table, mean))
}

/// Constants of a measure decomposition: variance conservation `c_var`,
/// entropic stability `alpha_ent` and the non-isolated fraction `gamma`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecompositionConstants {
    pub c_var: f64,
    pub alpha_ent: f64,
    pub gamma: f64,
}

impl DecompositionConstants {
    pub fn new(c_var: f64, alpha_ent: f64, gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c_var) || !(alpha_ent > 0.0) || !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidParameter(format!(
                "invalid decomposition constants ({c_var}, {alpha_ent}, {gamma})"
            )));
        }
        Ok(DecompositionConstants {
            c_var,
            alpha_ent,
            gamma,
        })
    }

    /// Constants for `κ ⪯ W ⪯ 1 − κ`: `C_var = e^{−1/κ}`, `α = 1/κ`, `γ = 0`.
    pub fn from_kappa(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "kappa must lie in (0, 1/2), got {kappa}"
            )));
        }
        Self::new((-1.0 / kappa).exp(), 1.0 / kappa, 0.0)
    }

    /// Saturation level `2√(n / (C_var α))`.
    pub fn cap(&self, n: usize) -> f64 {
        2.0 * (n as f64 / (self.c_var * self.alpha_ent)).sqrt()
    }

    /// Lower bound on `E_{μ_{W,sv}} |⟨x, v⟩|`:
    /// `(1 − γ)(C_var/2) · min{s, 2√(n/(C_var α))}`.
    pub fn tilted_correlation_bound(&self, s: f64, n: usize) -> f64 {
        (1.0 - self.gamma) * 0.5 * self.c_var * s.abs().min(self.cap(n))
    }

    /// Lower bound on `E|⟨y, v⟩|` after one RGD step from `|⟨x, v⟩| = r`:
    /// `(1 − γ)(C_var/2) · E min{|λr + √λ g|, 2√(n/(C_var α))}`.
    pub fn rgd_step_bound(&self, lambda: f64, r: f64, n: usize) -> f64 {
        (1.0 - self.gamma) * 0.5 * self.c_var * expected_min_abs_normal(lambda * r, lambda.sqrt(), self.cap(n))
    }
}

/// `E min(|Y|, c)` for `Y ~ N(m, σ²)`.
pub fn expected_min_abs_normal(m: f64, sigma: f64, c: f64) -> f64 {
    if c <= 0.0 {
        return 0.0;
    }
    if sigma == 0.0 {
        return m.abs().min(c);
    }
    let std = Normal::standard();
    // ∫ (1 − Φ(u)) du = u(1 − Φ(u)) − φ(u)
    let h = |u: f64| u * std.sf(u) - std.pdf(u);
    let upper = h((c - m) / sigma) - h(-m / sigma);
    let lower = h((c + m) / sigma) - h(m / sigma);
    sigma * (upper + lower)
}

/// `s ↦ E_{μ_{W,sv}} ⟨x, v⟩` on a grid, with variance, absolute mean,
/// derivative and the correlation lower bound at every point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TiltedCurve {
    pub s: Vec<f64>,
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
    pub abs_mean: Vec<f64>,
    /// Central difference of the mean with step [`DERIVATIVE_STEP`].
    pub derivative: Vec<f64>,
    pub bound: Vec<f64>,
}

/// Step of the central differences in [`TiltedCurve::derivative`].
pub const DERIVATIVE_STEP: f64 = 1e-4;

impl TiltedCurve {
    /// `max |derivative − var|`.
    pub fn derivative_error(&self) -> f64 {
        self.derivative
            .iter()
            .zip(&self.var)
            .map(|(d, v)| (d - v).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_non_decreasing(&self, tol: f64) -> bool {
        self.mean.windows(2).all(|w| w[1] >= w[0] - tol)
    }

    /// Smallest `abs_mean − bound` over the grid.
    pub fn bound_slack(&self) -> f64 {
        self.abs_mean
            .iter()
            .zip(&self.bound)
            .map(|(a, b)| a - b)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Tilted-mean curve of `μ_{W,sv}` for `s` on `grid + 1` equispaced points of
/// `[0, s_max]`.
pub fn tilted_mean_curve(
    w: &InteractionOperator,
    v: &[f64],
    s_max: f64,
    grid: usize,
    consts: &DecompositionConstants,
) -> Result<TiltedCurve> {
    let n = w.n();
    if n > MAX_CURVE_SITES {
        return Err(Error::TooLarge {
            what: "n",
            value: n,
            limit: MAX_CURVE_SITES,
        });
    }
    if v.len() != n || grid == 0 || !(s_max >= 0.0) {
        return Err(Error::InvalidParameter("invalid curve parameters".into()));
    }
    let base = enumerate_ising(&IsingModel::without_field(w.clone()))?;
    let logp: Vec<f64> = base.probs().iter().map(|p| p.ln()).collect();
    let proj: Vec<f64> = (0..base.len()).map(|k| base.linear(k, v)).collect();
    let moments = |s: f64| {
        let p = super::rgd::tilted_probs(&logp, &proj, s);
        let m: f64 = p.iter().zip(&proj).map(|(a, b)| a * b).sum();
        let m2: f64 = p.iter().zip(&proj).map(|(a, b)| a * b * b).sum();
        let am: f64 = p.iter().zip(&proj).map(|(a, b)| a * b.abs()).sum();
        (m, (m2 - m * m).max(0.0), am)
    };
    let mut curve = TiltedCurve {
        s: Vec::new(),
        mean: Vec::new(),
        var: Vec::new(),
        abs_mean: Vec::new(),
        derivative: Vec::new(),
        bound: Vec::new(),
    };
    for k in 0..=grid {
        let s = s_max * k as f64 / grid as f64;
        let (m, var, am) = moments(s);
        let (mp, _, _) = moments(s + DERIVATIVE_STEP);
        let (mm, _, _) = moments(s - DERIVATIVE_STEP);
        curve.s.push(s);
        curve.mean.push(m);
        curve.var.push(var);
        curve.abs_mean.push(am);
        curve.derivative.push((mp - mm) / (2.0 * DERIVATIVE_STEP));
        curve.bound.push(consts.tilted_correlation_bound(s, n));
    }
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::StateKind;
    use crate::models::gen_spiked_wigner;

    #[test]
    fn zero_tilt_is_identity() {
        let pi = ExactTable::uniform(2, StateKind::Spins, vec![0, 1, 2, 3]).unwrap();
        let (t, m) = tilt(&pi, &[0.0, 0.0]).unwrap();
        assert_eq!(t, pi);
        assert!(m.iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn single_spin_tilt_mean() {
        let pi = ExactTable::uniform(1, StateKind::Spins, vec![0, 1]).unwrap();
        let (_, m) = tilt(&pi, &[0.8]).unwrap();
        assert!((m[0] - 0.8f64.tanh()).abs() < 1e-15);
    }

    #[test]
    fn constants_from_kappa() {
        let c = DecompositionConstants::from_kappa(0.25).unwrap();
        assert!((c.c_var - (-4.0f64).exp()).abs() < 1e-18);
        assert_eq!(c.alpha_ent, 4.0);
        assert_eq!(c.gamma, 0.0);
        assert!(DecompositionConstants::from_kappa(0.5).is_err());
    }

    #[test]
    fn curve_properties() {
        let inst = gen_spiked_wigner(8, 1.0, 0.25, 4).unwrap();
        let c = DecompositionConstants::from_kappa(0.25).unwrap();
        let curve = tilted_mean_curve(&inst.w, &inst.v, 6.0, 60, &c).unwrap();
        assert!(curve.mean[0].abs() < 1e-12);
        assert!(curve.is_non_decreasing(1e-12));
        assert!(curve.derivative_error() < 1e-6);
        assert!(curve.bound_slack() >= 0.0);
    }

    #[test]
    fn degenerate_normal_and_zero_cap() {
        assert_eq!(expected_min_abs_normal(-3.0, 0.0, 2.0), 2.0);
        assert_eq!(expected_min_abs_normal(1.0, 1.0, 0.0), 0.0);
        // huge cap: E|Y| for standard normal
        let e = expected_min_abs_normal(0.0, 1.0, 1e6);
        assert!((e - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-12);
    }
}
