use serde::Serialize;

use super::kernel::KernelMatrix;
use super::table::ExactTable;
use crate::{Error, Result};

/// Relative density `f = dν/dπ` on the common support.
pub fn density(nu: &ExactTable, pi: &ExactTable) -> Result<Vec<f64>> {
    pi.check_same_support(nu)?;
    nu.probs()
        .iter()
        .zip(pi.probs())
        .enumerate()
        .map(|(k, (&a, &b))| {
            if b > 0.0 {
                Ok(a / b)
            } else if a == 0.0 {
                Ok(1.0)
            } else {
                Err(Error::Mismatch(format!(
                    "nu not absolutely continuous at state index {k}"
                )))
            }
        })
        .collect()
}

/// `Σ p log(p/q)`, `+∞` when `p` charges a zero of `q`.
pub fn kl_vec(p: &[f64], q: &[f64]) -> f64 {
    let mut kl = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            if b <= 0.0 {
                return f64::INFINITY;
            }
            kl += a * (a / b).ln();
        }
    }
    kl.max(0.0)
}

/// Total variation `½ Σ |p − q|`.
pub fn tv_vec(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// `Ent_π[f] = E_π f log f − E_π f · log E_π f` (natural log, `0 log 0 = 0`).
pub fn entropy_functional(pi: &[f64], f: &[f64]) -> f64 {
    let xlogx = |x: f64| if x > 0.0 { x * x.ln() } else { 0.0 };
    let ef: f64 = pi.iter().zip(f).map(|(p, x)| p * x).sum();
    let efl: f64 = pi.iter().zip(f).map(|(p, &x)| p * xlogx(x)).sum();
    (efl - xlogx(ef)).max(0.0)
}

/// Divergences between `ν` and `π`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Divergences {
    /// `KL(ν‖π)`, possibly `+∞`.
    pub kl: f64,
    /// Set when `ν` is not absolutely continuous with respect to `π`.
    pub kl_infinite: bool,
    /// `KL(ν‖π) + KL(π‖ν)`.
    pub skl: f64,
    pub tv: f64,
    /// `½ E_{x,y∼π} (√f(y) − √f(x))²`, which equals `1 − (Σ √(νπ))²`.
    pub hellinger: f64,
    /// `Ent_π[dν/dπ]` restricted to the support of `π`.
    pub ent: f64,
}

pub fn divergences(nu: &ExactTable, pi: &ExactTable) -> Result<Divergences> {
    pi.check_same_support(nu)?;
    let (p, q) = (nu.probs(), pi.probs());
    let kl = kl_vec(p, q);
    let bc: f64 = p.iter().zip(q).map(|(a, b)| (a * b).sqrt()).sum();
    let f: Vec<f64> = p
        .iter()
        .zip(q)
        .map(|(&a, &b)| if b > 0.0 { a / b } else { 0.0 })
        .collect();
    Ok(Divergences {
        kl,
        kl_infinite: kl.is_infinite(),
        skl: kl + kl_vec(q, p),
        tv: tv_vec(p, q),
        hellinger: (1.0 - bc * bc).max(0.0),
        ent: entropy_functional(q, &f),
    })
}

/// `𝓔(f, g) = Σ_x π(x) Σ_y P(x,y) (f(x) − f(y))(g(x) − g(y))` over ordered
/// pairs, with `π` the kernel's stationary table.
pub fn dirichlet_form(kernel: &KernelMatrix, f: &[f64], g: &[f64]) -> f64 {
    let pi = kernel.stationary().probs();
    let mut total = 0.0;
    for x in 0..kernel.size() {
        let mut inner = 0.0;
        for &(y, p) in kernel.row(x) {
            let y = y as usize;
            inner += p * (f[x] - f[y]) * (g[x] - g[y]);
        }
        total += pi[x] * inner;
    }
    total
}

/// `𝓔(f, log f)`; `f` must be strictly positive.
pub fn dirichlet_form_log(kernel: &KernelMatrix, f: &[f64]) -> Result<f64> {
    if let Some(k) = f.iter().position(|&x| !(x > 0.0)) {
        return Err(Error::NonPositiveDensity(k));
    }
    let logf: Vec<f64> = f.iter().map(|x| x.ln()).collect();
    Ok(dirichlet_form(kernel, f, &logf))
}

/// `𝓔(f, log f)` for `f ≥ 0`: pairs with one zero endpoint and positive
/// transition mass contribute `+∞`, pairs with both zero contribute 0.
pub fn entropy_dissipation(kernel: &KernelMatrix, f: &[f64]) -> f64 {
    let pi = kernel.stationary().probs();
    let mut total = 0.0;
    for x in 0..kernel.size() {
        for &(y, p) in kernel.row(x) {
            let y = y as usize;
            let (a, b) = (f[x], f[y]);
            if a == b || p == 0.0 || pi[x] == 0.0 {
                continue;
            }
            if a <= 0.0 || b <= 0.0 {
                return f64::INFINITY;
            }
            total += pi[x] * p * (a - b) * (a / b).ln();
        }
    }
    total
}

/// Entropy dissipation of `ν` (given as a probability vector on the kernel's
/// support).
pub fn dissipation_of(kernel: &KernelMatrix, nu: &[f64]) -> f64 {
    let pi = kernel.stationary().probs();
    let f: Vec<f64> = nu.iter().zip(pi).map(|(a, b)| a / b).collect();
    entropy_dissipation(kernel, &f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{glauber_kernel, StateKind};

    fn two_state() -> (ExactTable, KernelMatrix) {
        let pi = ExactTable::uniform(1, StateKind::Spins, vec![0, 1]).unwrap();
        let k = glauber_kernel(&pi).unwrap();
        (pi, k)
    }

    #[test]
    fn identical_measures() {
        let (pi, k) = two_state();
        let d = divergences(&pi, &pi).unwrap();
        assert_eq!((d.kl, d.skl, d.tv, d.ent), (0.0, 0.0, 0.0, 0.0));
        assert!(d.hellinger.abs() < 1e-15);
        assert_eq!(dirichlet_form_log(&k, &[1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(dirichlet_form(&k, &[3.0, 3.0], &[1.0, -2.0]), 0.0);
    }

    #[test]
    fn disjoint_support() {
        let (pi, _) = two_state();
        let a = pi.with_probs(vec![1.0, 0.0]).unwrap();
        let b = pi.with_probs(vec![0.0, 1.0]).unwrap();
        let d = divergences(&a, &b).unwrap();
        assert!(d.kl_infinite);
        assert_eq!(d.tv, 1.0);
        assert_eq!(d.hellinger, 1.0);
    }

    #[test]
    fn two_state_dirichlet_closed_form() {
        let (_, k) = two_state();
        let e: f64 = 0.15;
        let f: [f64; 2] = [2.0 - 2.0 * e, 2.0 * e];
        // π = ½ each, P(a,b) = P(b,a) = ½: both ordered pairs give ¼(f_a − f_b) log(f_a/f_b)
        let want = 0.5 * (f[0] - f[1]) * (f[0] / f[1]).ln();
        assert!((dirichlet_form_log(&k, &f).unwrap() - want).abs() < 1e-15);
        assert!(matches!(
            dirichlet_form_log(&k, &[1.0, 0.0]),
            Err(Error::NonPositiveDensity(1))
        ));
        assert_eq!(entropy_dissipation(&k, &[2.0, 0.0]), f64::INFINITY);
    }

    #[test]
    fn entropy_matches_kl() {
        let (pi, _) = two_state();
        let nu = pi.with_probs(vec![0.8, 0.2]).unwrap();
        let d = divergences(&nu, &pi).unwrap();
        assert!((d.ent - d.kl).abs() < 1e-15);
        let want = 0.8 * (1.6f64).ln() + 0.2 * (0.4f64).ln();
        assert!((d.kl - want).abs() < 1e-15);
    }
}
