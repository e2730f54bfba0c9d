use serde::Serialize;

use super::divergence::{dissipation_of, kl_vec};
use super::kernel::KernelMatrix;
use super::table::ExactTable;
use crate::{Error, Result};

/// Jump rate of the continuous-time semigroup `exp(−RATE·t·(I − P))`.
///
/// With the ordered-pair Dirichlet form, this rate gives
/// `d/dt KL(ν_t‖π) = −𝓔(f_t, log f_t)` exactly for reversible `P`.
pub const CONTINUOUS_RATE: f64 = 2.0;
/// Largest Poisson mean handled in one uniformisation chunk.
const CHUNK_MEAN: f64 = 50.0;
/// Per-chunk bound on the neglected Poisson tail.
const TAIL_TOL: f64 = 1e-15;
/// Minimum number of grid points for [`ls_fraction`].
pub const MIN_GRID: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolveMode {
    /// `ν P^t` for integer `t`.
    Discrete,
    /// `ν exp(−RATE·t·(I − P))` by uniformisation.
    Continuous,
}

/// Continuous evolution of a probability vector.
pub fn evolve_continuous(kernel: &KernelMatrix, nu: &[f64], t: f64) -> Vec<f64> {
    let total = CONTINUOUS_RATE * t;
    if total <= 0.0 {
        return nu.to_vec();
    }
    let chunks = (total / CHUNK_MEAN).ceil().max(1.0) as usize;
    let a = total / chunks as f64;
    let mut cur = nu.to_vec();
    for _ in 0..chunks {
        let mut term = cur.clone();
        let mut w = (-a).exp();
        let mut acc: Vec<f64> = term.iter().map(|x| w * x).collect();
        let mut k = 0usize;
        loop {
            k += 1;
            term = kernel.apply_left(&term);
            w *= a / k as f64;
            for (s, x) in acc.iter_mut().zip(&term) {
                *s += w * x;
            }
            let kf = k as f64;
            if kf + 2.0 > a {
                let ratio = a / (kf + 2.0);
                let tail = w * (a / (kf + 1.0)) / (1.0 - ratio);
                if tail < TAIL_TOL {
                    break;
                }
            }
        }
        cur = acc;
    }
    cur
}

/// `ν_t` from `ν_0`.
pub fn evolve(kernel: &KernelMatrix, nu0: &ExactTable, t: f64, mode: EvolveMode) -> Result<ExactTable> {
    kernel.stationary().check_same_support(nu0)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("invalid time {t}")));
    }
    let out = match mode {
        EvolveMode::Discrete => {
            if t.fract() != 0.0 {
                return Err(Error::InvalidParameter(format!("discrete time {t} is not an integer")));
            }
            let mut cur = nu0.probs().to_vec();
            for _ in 0..t as u64 {
                cur = kernel.apply_left(&cur);
            }
            cur
        }
        EvolveMode::Continuous => evolve_continuous(kernel, nu0.probs(), t),
    };
    let z: f64 = out.iter().sum();
    nu0.with_probs(out.into_iter().map(|x| (x / z).max(0.0)).collect())
}

/// Fraction of the midpoint grid `t_k = (k + ½) T / grid` at which the
/// continuous evolution of `ν_0` satisfies `𝓔(f_t, log f_t) ≤ ε`.
pub fn ls_fraction(kernel: &KernelMatrix, nu0: &ExactTable, horizon: f64, eps: f64, grid: usize) -> Result<f64> {
    kernel.stationary().check_same_support(nu0)?;
    if grid < MIN_GRID {
        return Err(Error::InvalidParameter(format!(
            "grid needs at least {MIN_GRID} points"
        )));
    }
    if !(horizon > 0.0) {
        return Err(Error::InvalidParameter(format!("invalid horizon {horizon}")));
    }
    let dt = horizon / grid as f64;
    let mut cur = evolve_continuous(kernel, nu0.probs(), 0.5 * dt);
    let mut good = 0usize;
    for k in 0..grid {
        if k > 0 {
            cur = evolve_continuous(kernel, &cur, dt);
        }
        if dissipation_of(kernel, &cur) <= eps {
            good += 1;
        }
    }
    Ok(good as f64 / grid as f64)
}

/// `(1/T) ∫_0^T 𝓔(f_t, log f_t) dt` by composite Simpson over `intervals`
/// (rounded up to even) subintervals.
pub fn time_averaged_dissipation(
    kernel: &KernelMatrix,
    nu0: &ExactTable,
    horizon: f64,
    intervals: usize,
) -> Result<f64> {
    kernel.stationary().check_same_support(nu0)?;
    if !(horizon > 0.0) {
        return Err(Error::InvalidParameter(format!("invalid horizon {horizon}")));
    }
    let m = intervals.max(2).div_ceil(2) * 2;
    let h = horizon / m as f64;
    let mut cur = nu0.probs().to_vec();
    let mut sum = 0.0;
    for k in 0..=m {
        if k > 0 {
            cur = evolve_continuous(kernel, &cur, h);
        }
        let e = dissipation_of(kernel, &cur);
        let c = if k == 0 || k == m {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        sum += c * e;
    }
    Ok(sum * h / 3.0 / horizon)
}

/// `KL(ν_t‖π)` along a grid of times.
pub fn kl_path(kernel: &KernelMatrix, nu0: &ExactTable, times: &[f64]) -> Result<Vec<f64>> {
    kernel.stationary().check_same_support(nu0)?;
    let pi = kernel.stationary().probs();
    let mut cur = nu0.probs().to_vec();
    let mut last = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if t < last {
            return Err(Error::InvalidParameter("times must be non-decreasing".into()));
        }
        cur = evolve_continuous(kernel, &cur, t - last);
        last = t;
        out.push(kl_vec(&cur, pi));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{glauber_kernel, StateKind};

    fn two_state() -> KernelMatrix {
        let pi = ExactTable::uniform(1, StateKind::Spins, vec![0, 1]).unwrap();
        glauber_kernel(&pi).unwrap()
    }

    #[test]
    fn two_state_closed_form() {
        // P = ½·11ᵀ ⇒ exp(−2t(I−P)) moves the bias by e^{−2t}
        let k = two_state();
        let nu0 = k.stationary().with_probs(vec![0.9, 0.1]).unwrap();
        for &t in &[0.0, 0.3, 1.0, 7.5, 60.0] {
            let nu = evolve(&k, &nu0, t, EvolveMode::Continuous).unwrap();
            let want = 0.5 + 0.4 * (-2.0 * t).exp();
            assert!((nu.probs()[0] - want).abs() < 1e-13, "t = {t}");
        }
    }

    #[test]
    fn discrete_mode() {
        let k = two_state();
        let nu0 = k.stationary().with_probs(vec![1.0, 0.0]).unwrap();
        let nu = evolve(&k, &nu0, 1.0, EvolveMode::Discrete).unwrap();
        assert_eq!(nu.probs(), &[0.5, 0.5]);
        assert!(evolve(&k, &nu0, 0.5, EvolveMode::Discrete).is_err());
        assert_eq!(evolve(&k, &nu0, 0.0, EvolveMode::Continuous).unwrap(), nu0);
    }

    #[test]
    fn stationary_start_fraction_one() {
        let k = two_state();
        let pi = k.stationary().clone();
        assert_eq!(ls_fraction(&k, &pi, 5.0, 1e-9, 100).unwrap(), 1.0);
        assert!(ls_fraction(&k, &pi, 5.0, 1e-9, 99).is_err());
    }
}
