//! Randomised exact-identity suite.
//!
//! Every check draws its own instances from a dedicated seed stream, so the
//! report is identical for a given seed regardless of thread scheduling.
//! Residuals are signed: a check passes when its worst residual is at most
//! the tolerance.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Normal, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::exact::{
    block_resampling_kernel, conditional_restriction, density, dirichlet_form_log, dissipation_of, divergences,
    entropy_functional, enumerate_hardcore, enumerate_ising, evolve_continuous, glauber_kernel,
    glauber_kernel_with_selection, kl_path, kl_vec, ls_fraction, mlsi_lower_bound, rgd_kernel_for, tilted_mean_curve,
    time_averaged_dissipation, tv_vec, DecompositionConstants, ExactTable, KernelMatrix, StateKind,
};
use crate::models::{gen_spiked_wigner, Graph, InteractionOperator, IsingModel, SpikedInstance};
use crate::rng::{stream_rng, ChainRng};
use crate::{Error, Result};

/// Tolerance for identities that hold exactly up to rounding.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Tolerance for the time-averaged dissipation bound (quadrature error).
pub const TIME_AVERAGE_TOL: f64 = 1e-10;
/// Reversibility tolerance of quadrature-based RGD kernels.
pub const RGD_TOL: f64 = 1e-6;
/// Finite-difference step and tolerance of the KL derivative check.
pub const KL_DERIVATIVE_STEP: f64 = 1e-4;
pub const KL_DERIVATIVE_TOL: f64 = 10.0 * KL_DERIVATIVE_STEP;
/// Tolerance on `|d/ds E⟨x,v⟩ − Var⟨x,v⟩|` for tilted curves.
pub const CURVE_DERIVATIVE_TOL: f64 = 1e-6;
/// Quadrature order of the exact RGD kernels.
pub const RGD_ORDER: usize = 64;
/// Simpson intervals of the time-averaged dissipation.
pub const TIME_AVERAGE_INTERVALS: usize = 1000;
/// Grid points of the local-stationarity fraction.
pub const LS_GRID: usize = 200;
/// `(ε, δ)` pairs of the local-stationarity fraction check.
pub const LS_PAIRS: [(f64, f64); 2] = [(0.1, 0.2), (0.01, 0.5)];
/// Base of the per-check seed streams.
const ORACLE_STREAM_BASE: u64 = 1 << 40;

/// One line of the oracle report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleCheck {
    pub check: String,
    /// Instances that produced a residual.
    pub instances: usize,
    pub worst_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Range of an auxiliary quantity, where a check reports one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observed_range: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Residual of one instance and an optional auxiliary value.
#[derive(Clone, Copy, Debug)]
pub struct Outcome {
    pub residual: f64,
    pub extra: Option<f64>,
}

impl Outcome {
    fn plain(residual: f64) -> Option<Self> {
        Some(Outcome { residual, extra: None })
    }
}

/// Seeded batch of random instances per check.
#[derive(Clone, Copy, Debug)]
pub struct OracleSuite {
    pub seed: u64,
    pub instances: usize,
    /// Largest number of sites of a random instance.
    pub max_sites: usize,
}

/// Names of every check in [`OracleSuite::run_all`], in report order.
pub const CHECK_NAMES: [&str; 18] = [
    "kernel_identities",
    "rgd_reversibility",
    "time_averaged_dissipation",
    "dissipation_chain",
    "symmetric_kl_bound",
    "hellinger_below_kl",
    "kl_derivative",
    "kl_monotone",
    "mixture_dominance",
    "bounded_function_stability",
    "density_ratio_concentration",
    "local_patch_tv",
    "mlsi_certificate",
    "product_mlsi",
    "locally_stationary_fraction",
    "rgd_step_correlation",
    "tilted_curve_bound",
    "tilted_curve_derivative",
];

/// Worst of the three kernel identity residuals.
pub fn kernel_identity_residual(kernel: &KernelMatrix) -> f64 {
    let r = kernel.residuals();
    r.row_sum.max(r.detailed_balance).max(r.stationarity)
}

/// Ising model with Gaussian couplings of scale `0.8/√n` and fields of
/// scale `0.5`.
pub fn random_ising<R: Rng + ?Sized>(n: usize, rng: &mut R) -> IsingModel {
    let scale = 0.8 / (n as f64).sqrt();
    let mut triplets = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let g: f64 = rng.sample(StandardNormal);
            triplets.push((i, j, scale * g));
        }
    }
    let j = InteractionOperator::zeros(n)
        .with_sparse(&triplets)
        .expect("indices in range");
    let h = (0..n).map(|_| 0.5 * rng.sample::<f64, _>(StandardNormal)).collect();
    IsingModel::new(j, h).expect("dimensions agree")
}

/// Triangle-free graph: edges of `G(n, p)` in random order, each kept only
/// if its endpoints share no neighbour.
pub fn random_triangle_free<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    pairs.shuffle(rng);
    let mut adj = vec![0u64; n];
    let mut edges = Vec::new();
    for (u, v) in pairs {
        if rng.random::<f64>() < p && adj[u] & adj[v] == 0 {
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
            edges.push((u, v));
        }
    }
    Graph::from_edges(n, edges).expect("edges in range")
}

/// `ν ∝ π·e^{σg}` with i.i.d. standard Gaussian `g`; full support of `π`.
pub fn random_perturbation<R: Rng + ?Sized>(pi: &ExactTable, sigma: f64, rng: &mut R) -> ExactTable {
    let w: Vec<f64> = pi
        .probs()
        .iter()
        .map(|&p| p * (sigma * rng.sample::<f64, _>(StandardNormal)).exp())
        .collect();
    pi.with_weights(&w).expect("positive weights")
}

/// Random stationary table: an Ising model or a hardcore model on a
/// triangle-free graph, with `2..=max_sites` sites.
pub fn random_table<R: Rng + ?Sized>(max_sites: usize, rng: &mut R) -> ExactTable {
    let n = rng.random_range(2..=max_sites.max(2));
    if rng.random::<bool>() {
        enumerate_ising(&random_ising(n, rng)).expect("small model")
    } else {
        let p = rng.random_range(0.2..0.7);
        enumerate_hardcore(&random_triangle_free(n, p, rng)).expect("small graph")
    }
}

/// Random spiked instance with `λ ∈ [1, 20]` and `κ ∈ [0.05, 0.45]`.
pub fn random_spiked<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<SpikedInstance> {
    let lambda = rng.random_range(1.0..20.0);
    let kappa = rng.random_range(0.05..0.45);
    gen_spiked_wigner(n, lambda, kappa, rng.random())
}

fn projections(table: &ExactTable, v: &[f64]) -> Vec<f64> {
    (0..table.len()).map(|k| table.linear(k, v)).collect()
}

impl OracleSuite {
    pub fn new(seed: u64, instances: usize, max_sites: usize) -> Self {
        OracleSuite {
            seed,
            instances,
            max_sites,
        }
    }

    fn stream(check: usize, k: usize) -> u64 {
        ORACLE_STREAM_BASE + ((check as u64) << 24) + k as u64
    }

    fn index(name: &str) -> usize {
        CHECK_NAMES.iter().position(|&c| c == name).expect("registered check")
    }

    /// Runs `trial` on every instance of check `name` and aggregates.
    pub fn run_check<F>(&self, name: &str, tolerance: f64, trial: F) -> OracleCheck
    where
        F: Fn(&mut ChainRng) -> Result<Option<Outcome>> + Sync,
    {
        let id = Self::index(name);
        let results: Vec<Result<Option<Outcome>>> = (0..self.instances)
            .into_par_iter()
            .map(|k| trial(&mut stream_rng(self.seed, Self::stream(id, k))))
            .collect();
        let mut worst = f64::NEG_INFINITY;
        let mut count = 0;
        let mut range: Option<(f64, f64)> = None;
        let mut error = None;
        for r in results {
            match r {
                Ok(Some(o)) => {
                    count += 1;
                    worst = if o.residual.is_nan() {
                        f64::NAN
                    } else {
                        worst.max(o.residual)
                    };
                    if let Some(x) = o.extra {
                        range = Some(range.map_or((x, x), |(a, b)| (a.min(x), b.max(x))));
                    }
                }
                Ok(None) => {}
                Err(e) => {
                    if error.is_none() {
                        error = Some(e.to_string());
                    }
                }
            }
        }
        OracleCheck {
            check: name.to_string(),
            instances: count,
            worst_residual: worst,
            tolerance,
            pass: error.is_none() && count > 0 && worst <= tolerance,
            observed_range: range,
            error,
        }
    }

    /// All checks, in the order of [`CHECK_NAMES`].
    pub fn run_all(&self) -> Vec<OracleCheck> {
        vec![
            self.kernel_identities(),
            self.rgd_reversibility(),
            self.time_averaged_dissipation(),
            self.dissipation_chain(),
            self.symmetric_kl_bound(),
            self.hellinger_below_kl(),
            self.kl_derivative(),
            self.kl_monotone(),
            self.mixture_dominance(),
            self.bounded_function_stability(),
            self.density_ratio_concentration(),
            self.local_patch_tv(),
            self.mlsi_certificate(),
            self.product_mlsi(),
            self.locally_stationary_fraction(),
            self.rgd_step_correlation(),
            self.tilted_curve_bound(),
            self.tilted_curve_derivative(),
        ]
    }

    /// Row sums, detailed balance and stationarity of Glauber and block
    /// resampling kernels.
    pub fn kernel_identities(&self) -> OracleCheck {
        let m = self.max_sites;
        self.run_check("kernel_identities", IDENTITY_TOL, |rng| {
            let pi = random_table(m, rng);
            let glauber = glauber_kernel(&pi)?;
            let mask = rng.random_range(0..1u32 << pi.n());
            let block = block_resampling_kernel(&pi, mask)?;
            Ok(Outcome::plain(
                kernel_identity_residual(&glauber).max(kernel_identity_residual(&block)),
            ))
        })
    }

    /// Reversibility of exact RGD kernels (order-64 quadrature).
    pub fn rgd_reversibility(&self) -> OracleCheck {
        let m = self.max_sites.clamp(2, 12);
        self.run_check("rgd_reversibility", RGD_TOL, |rng| {
            let inst = random_spiked(rng.random_range(2..=m), rng)?;
            Ok(Outcome::plain(kernel_identity_residual(&rgd_kernel_for(
                &inst, RGD_ORDER,
            )?)))
        })
    }

    /// `(1/T)∫𝓔(f_t, log f_t) dt ≤ KL(ν₀‖π)/T`.
    pub fn time_averaged_dissipation(&self) -> OracleCheck {
        let m = self.max_sites;
        self.run_check("time_averaged_dissipation", TIME_AVERAGE_TOL, |rng| {
            let pi = random_table(m, rng);
            let nu = random_perturbation(&pi, rng.random_range(0.2..2.0), rng);
            let k = glauber_kernel(&pi)?;
            let horizon = rng.random_range(0.5..3.0);
            let avg = time_averaged_dissipation(&k, &nu, horizon, TIME_AVERAGE_INTERVALS)?;
            let kl0 = kl_vec(nu.probs(), pi.probs());
            Ok(Outcome::plain(avg - kl0 / horizon))
        })
    }

    /// `𝓔(f, log f) ≥ 2 KL(Pν‖ν) ≥ 4 dTV(ν, Pν)²`.
    pub fn dissipation_chain(&self) -> OracleCheck {
        let m = self.max_sites;
        self.run_check("dissipation_chain", IDENTITY_TOL, |rng| {
            let pi = random_table(m, rng);
            let nu = random_perturbation(&pi, rng.random_range(0.05..2.0), rng);
            let k = glauber_kernel(&pi)?;
            let e = dissipation_of(&k, nu.probs());
            let moved = k.apply_left(nu.probs());
            let kl = kl_vec(&moved, nu.probs());
            let tv = tv_vec(nu.probs(), &moved);
            Ok(Outcome::plain((2.0 * kl - e).max(4.0 * tv * tv - 2.0 * kl)))
        })
    }

    /// `SKL ≤ (6 + 12τ) KL` with `τ = max |log f|`, ten pairs per instance.
    pub fn symmetric_kl_bound(&self) -> OracleCheck {
        let m = self.max_sites;
        self.run_check("symmetric_kl_bound", IDENTITY_TOL, |rng| {
            let pi = random_table(m, rng);
            let mut worst = f64::NEG_INFINITY;
            for _ in 0..10 {
                let nu = random_perturbation(&pi, rng.random_range(0.01..3.0), rng);
                let div = divergences(&nu, &pi)?;
                let tau = density(&nu, &pi)?.iter().map(|f| f.ln().abs()).fold(0.0, f64::max);
                worst = worst.max(div.skl - (6.0 + 12.0 * tau) * div.kl);
            }
            Ok(Outcome::plain(worst))
        })
    }

    /// `Hel(ν, π) ≤ KL(ν‖π)`, ten pairs per instance.
    pub fn hellinger_below_kl(&self) -> OracleCheck {
        let m = self.max_sites;
        self.run_check("hellinger_below_kl", IDENTITY_TOL, |rng| {
            let pi = random_table(m, rng);
            let mut worst = f64::NEG_INFINITY;
            for _ in 0..10 {
                let nu = random_perturbation(&pi, rng.random_range(0.01..3.0), rng);
                let div = divergences(&nu, &pi)?;
                worst = worst.max(div.hellinger - div.kl);
            }
            Ok(Outcome::plain(worst))
        })
    }

    /// `|ΔKL/Δt + 𝓔(f_t, log f_t)|` at `Δt = 10⁻⁴` and random `t ∈ [0, 1]`.
    pub fn kl_derivative(&self) -> OracleCheck {
        let m = self.max_sites;
        self.run_check("kl_derivative", KL_DERIVATIVE_TOL, |rng| {
            let pi = random_table(m, rng);
            let nu = random_perturbation(&pi, rng.random_range(0.2..2.0), rng);
            let k = glauber_kernel(&pi)?;
            let t = rng.random_range(0.0..1.0);
            let cur = evolve_continuous(&k, nu.probs(), t);
            let next = evolve_continuous(&k, &cur, KL_DERIVATIVE_STEP);
            let slope = (kl_vec(&next, pi.probs()) - kl_vec(&cur, pi.probs())) / KL_DERIVATIVE_STEP;
            Ok(Outcome::plain((slope + dissipation_of(&k, &cur)).abs()))
        })
    }

    /// `KL(ν_t‖π)` non-increasing on `t ∈ {0, 0.1, …, 10}`.
    pub fn kl_monotone(&self) -> OracleCheck {
        let m = self.max_sites;
        self.run_check("kl_monotone", IDENTITY_TOL, |rng| {
            let pi = random_table(m, rng);
            let nu = random_perturbation(&pi, rng.random_range(0.2..3.0), rng);
            let k = glauber_kernel(&pi)?;
            let times: Vec<f64> = (0..=100).map(|i| i as f64 / 10.0).collect();
            let path = kl_path(&k, &nu, &times)?;
            Ok(Outcome::plain(
                path.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max),
            ))
        })
    }

    /// `𝓔_π(f, log f) ≥ E_z 𝓔_{π_z}(f, log f)` for the decomposition by the
    /// values of a random coordinate subset. Also reports the ratio
    /// `𝓔_P/𝓔_π` for the associated block-resampling chain `P`.
    pub fn mixture_dominance(&self) -> OracleCheck {
        let m = self.max_sites;
        self.run_check("mixture_dominance", IDENTITY_TOL, |rng| {
            let pi = random_table(m, rng);
            let n = pi.n();
            let nu = random_perturbation(&pi, rng.random_range(0.1..2.0), rng);
            let f = density(&nu, &pi)?;
            let full = dirichlet_form_log(&glauber_kernel(&pi)?, &f)?;
            let mask = rng.random_range(1..(1u32 << n) - 1);
            let pinned: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let mut mixed = 0.0;
            for a in 0..1u32 << pinned.len() {
                let bits: Vec<bool> = (0..pinned.len()).map(|k| a >> k & 1 == 1).collect();
                let (nu_c, pi_c) = match conditional_restriction(&nu, &pi, &pinned, &bits) {
                    Ok(pair) => pair,
                    Err(Error::ZeroMassPinning(_)) => continue,
                    Err(e) => return Err(e),
                };
                let weight = pinned_mass(&nu, &pinned, &bits);
                let fc = density(&nu_c, &pi_c)?;
                mixed += weight * dirichlet_form_log(&glauber_kernel_with_selection(&pi_c, n)?, &fc)?;
            }
            let block = dirichlet_form_log(&block_resampling_kernel(&pi, mask)?, &f)?;
            Ok(Some(Outcome {
                residual: mixed - full,
                extra: (full > 0.0).then(|| block / full),
            }))
        })
    }

    /// `|E_ν φ − E_{Pν} φ| ≤ ‖φ‖_∞ √ε` with `ε = 𝓔(f, log f)`.
    pub fn bounded_function_stability(&self) -> OracleCheck {
        let m = self.max_sites;
        self.run_check("bounded_function_stability", IDENTITY_TOL, |rng| {
            let pi = random_table(m, rng);
            let nu = random_perturbation(&pi, rng.random_range(0.05..2.0), rng);
            let k = glauber_kernel(&pi)?;
            let eps = dissipation_of(&k, nu.probs());
            let phi: Vec<f64> = (0..pi.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let sup = phi.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            let moved = k.apply_left(nu.probs());
            let diff: f64 = nu
                .probs()
                .iter()
                .zip(&moved)
                .zip(&phi)
                .map(|((a, b), p)| (a - b) * p)
                .sum();
            Ok(Outcome::plain(diff.abs() - sup * eps.sqrt()))
        })
    }

    /// `P_{x∼ν, y∼P(x,·)}[|f(x)/f(y) − 1| > 2√(ε/δ)] ≤ δ` for every
    /// `δ ∈ {0.05, 0.1, 0.2, 0.5}` with `δ > 2ε`.
    pub fn density_ratio_concentration(&self) -> OracleCheck {
        let m = self.max_sites;
        self.run_check("density_ratio_concentration", IDENTITY_TOL, |rng| {
            let pi = random_table(m, rng);
            let nu = random_perturbation(&pi, rng.random_range(0.01..0.5), rng);
            let k = glauber_kernel(&pi)?;
            let f = density(&nu, &pi)?;
            let eps = dirichlet_form_log(&k, &f)?;
            let mut worst: Option<f64> = None;
            for delta in [0.05, 0.1, 0.2, 0.5] {
                if delta <= 2.0 * eps {
                    continue;
                }
                let thr = 2.0 * (eps / delta).sqrt();
                let mut bad = 0.0;
                for x in 0..k.size() {
                    for &(y, p) in k.row(x) {
                        if (f[x] / f[y as usize] - 1.0).abs() > thr {
                            bad += nu.probs()[x] * p;
                        }
                    }
                }
                worst = Some(worst.map_or(bad - delta, |w: f64| w.max(bad - delta)));
            }
            Ok(worst.and_then(Outcome::plain))
        })
    }

    /// `E_{x_S∼ν} dTV(ν|x_S, π|x_S) ≤ √ε / C` on hardcore stars, for every
    /// pinned set `S`, where `C` is the smallest certified MLSI constant over
    /// all conditional chains.
    pub fn local_patch_tv(&self) -> OracleCheck {
        let max_leaves = self.max_sites.clamp(2, 8) - 1;
        let stars: Vec<(ExactTable, f64)> = (1..=max_leaves)
            .map(|leaves| {
                let pi = enumerate_hardcore(&Graph::star(leaves)).expect("small star");
                let c = min_conditional_mlsi(&pi).expect("star conditionals");
                (pi, c)
            })
            .collect();
        self.run_check("local_patch_tv", IDENTITY_TOL, |rng| {
            let (pi, c) = &stars[rng.random_range(0..stars.len())];
            let nu = random_perturbation(pi, rng.random_range(0.05..1.5), rng);
            let eps = dissipation_of(&glauber_kernel(pi)?, nu.probs());
            let bound = eps.sqrt() / c;
            let n = pi.n();
            let mut worst = f64::NEG_INFINITY;
            for mask in 0..1u32 << n {
                let pinned: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                let mut lhs = 0.0;
                for a in 0..1u32 << pinned.len() {
                    let bits: Vec<bool> = (0..pinned.len()).map(|k| a >> k & 1 == 1).collect();
                    let (nu_c, pi_c) = match conditional_restriction(&nu, pi, &pinned, &bits) {
                        Ok(pair) => pair,
                        Err(Error::ZeroMassPinning(_)) => continue,
                        Err(e) => return Err(e),
                    };
                    let weight = pinned_mass(&nu, &pinned, &bits);
                    lhs += weight * tv_vec(nu_c.probs(), pi_c.probs());
                }
                worst = worst.max(lhs - bound);
            }
            Ok(Outcome::plain(worst))
        })
    }

    /// `𝓔(f, log f) ≥ C·Ent_π[f]` for the certified constant `C` of random
    /// Glauber chains and random positive `f`.
    pub fn mlsi_certificate(&self) -> OracleCheck {
        let m = self.max_sites;
        self.run_check("mlsi_certificate", IDENTITY_TOL, |rng| {
            let pi = random_table(m, rng);
            let k = glauber_kernel(&pi)?;
            let c = mlsi_lower_bound(&k)?;
            let mut worst = f64::NEG_INFINITY;
            for _ in 0..10 {
                let f: Vec<f64> = (0..pi.len())
                    .map(|_| (rng.random_range(0.05..3.0) * rng.sample::<f64, _>(StandardNormal)).exp())
                    .collect();
                let e = dirichlet_form_log(&k, &f)?;
                worst = worst.max(c * entropy_functional(pi.probs(), &f) - e);
            }
            Ok(Outcome::plain(worst))
        })
    }

    /// `𝓔(f, log f) ≥ (1/n)·Ent[f]` for Glauber on the uniform product
    /// measure, and the certificate is positive.
    pub fn product_mlsi(&self) -> OracleCheck {
        let m = self.max_sites.min(10);
        self.run_check("product_mlsi", IDENTITY_TOL, |rng| {
            let n = rng.random_range(1..=m);
            let pi = ExactTable::uniform(n, StateKind::Spins, (0..1u32 << n).collect())?;
            let k = glauber_kernel(&pi)?;
            let dist: Normal<f64> = Normal::new(0.0, rng.random_range(0.05..3.0)).expect("positive scale");
            let f: Vec<f64> = (0..pi.len()).map(|_| rng.sample(dist).exp()).collect();
            let e = dirichlet_form_log(&k, &f)?;
            let gap = entropy_functional(pi.probs(), &f) / n as f64 - e;
            let cert = mlsi_lower_bound(&k)?;
            Ok(Outcome::plain(if cert > 0.0 { gap } else { f64::INFINITY }))
        })
    }

    /// With `T = (1/(δε)) log(1/π_min)`, the fraction of grid times at which
    /// `ν_t` is `ε`-locally stationary is at least `1 − δ` (n = 6 chains).
    pub fn locally_stationary_fraction(&self) -> OracleCheck {
        self.run_check("locally_stationary_fraction", 0.0, |rng| {
            let model = random_ising(6, rng);
            let pi = enumerate_ising(&model)?;
            let k = glauber_kernel(&pi)?;
            let nu = random_perturbation(&pi, rng.random_range(0.5..4.0), rng);
            let log_inv = (1.0 / pi.min_positive()).ln();
            let mut worst = f64::NEG_INFINITY;
            for (eps, delta) in LS_PAIRS {
                let frac = ls_fraction(&k, &nu, log_inv / (delta * eps), eps, LS_GRID)?;
                worst = worst.max((1.0 - delta) - frac);
            }
            Ok(Outcome::plain(worst))
        })
    }

    /// One exact RGD step from `x` with `|⟨x,v⟩| = r` gives
    /// `E|⟨y,v⟩| ≥ (C_var/2)·E min{|λr + √λ g|, 2√(n/(C_var α))}`.
    pub fn rgd_step_correlation(&self) -> OracleCheck {
        let m = self.max_sites.clamp(2, 12);
        self.run_check("rgd_step_correlation", IDENTITY_TOL, |rng| {
            let inst = random_spiked(rng.random_range(2..=m), rng)?;
            let consts = DecompositionConstants::from_kappa(inst.kappa)?;
            let k = rgd_kernel_for(&inst, RGD_ORDER)?;
            let proj = projections(k.stationary(), &inst.v);
            let mut worst = f64::NEG_INFINITY;
            for x in 0..k.size() {
                let after: f64 = k.row(x).iter().map(|&(y, p)| p * proj[y as usize].abs()).sum();
                let bound = consts.rgd_step_bound(inst.lambda, proj[x].abs(), inst.n());
                worst = worst.max(bound - after);
            }
            Ok(Outcome::plain(worst))
        })
    }

    /// `E_{μ_{W,sv}}|⟨x,v⟩| ≥ (C_var/2)·min{s, 2√(n/(C_var α))}` on a grid
    /// of `s`, and the curve is non-decreasing.
    pub fn tilted_curve_bound(&self) -> OracleCheck {
        let m = self.max_sites.clamp(2, 12);
        self.run_check("tilted_curve_bound", IDENTITY_TOL, |rng| {
            let inst = random_spiked(rng.random_range(2..=m), rng)?;
            let consts = DecompositionConstants::from_kappa(inst.kappa)?;
            let s_max = 1.5 * consts.cap(inst.n());
            let curve = tilted_mean_curve(&inst.w, &inst.v, s_max, 60, &consts)?;
            let drop = curve
                .mean
                .windows(2)
                .map(|w| w[0] - w[1])
                .fold(f64::NEG_INFINITY, f64::max);
            Ok(Outcome::plain((-curve.bound_slack()).max(drop)))
        })
    }

    /// `d/ds E⟨x,v⟩ = Var⟨x,v⟩` along the tilted curve.
    pub fn tilted_curve_derivative(&self) -> OracleCheck {
        let m = self.max_sites.clamp(2, 12);
        self.run_check("tilted_curve_derivative", CURVE_DERIVATIVE_TOL, |rng| {
            let inst = random_spiked(rng.random_range(2..=m), rng)?;
            let consts = DecompositionConstants::from_kappa(inst.kappa)?;
            let curve = tilted_mean_curve(&inst.w, &inst.v, 3.0 * (inst.n() as f64).sqrt(), 30, &consts)?;
            Ok(Outcome::plain(curve.derivative_error()))
        })
    }
}

/// `ν(x_S = a)`.
fn pinned_mass(nu: &ExactTable, pinned: &[usize], bits: &[bool]) -> f64 {
    nu.states()
        .iter()
        .zip(nu.probs())
        .filter(|(&s, _)| pinned.iter().zip(bits).all(|(&i, &b)| (s >> i & 1 == 1) == b))
        .map(|(_, p)| p)
        .sum()
}

/// Smallest certified MLSI constant over the conditional Glauber chains of
/// `pi` (all pinnings with at least two states; pinned coordinates hold).
pub fn min_conditional_mlsi(pi: &ExactTable) -> Result<f64> {
    let n = pi.n();
    let mut best = f64::INFINITY;
    for mask in 0..1u32 << n {
        let pinned: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        for a in 0..1u32 << pinned.len() {
            let bits: Vec<bool> = (0..pinned.len()).map(|k| a >> k & 1 == 1).collect();
            let (_, pi_c) = match conditional_restriction(pi, pi, &pinned, &bits) {
                Ok(pair) => pair,
                Err(Error::ZeroMassPinning(_)) => continue,
                Err(e) => return Err(e),
            };
            if pi_c.len() < 2 {
                continue;
            }
            best = best.min(mlsi_lower_bound(&glauber_kernel_with_selection(&pi_c, n)?)?);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corrupted_kernel_fails_identities() {
        let mut rng = stream_rng(3, 0);
        let pi = enumerate_ising(&random_ising(4, &mut rng)).unwrap();
        let mut k = glauber_kernel(&pi).unwrap();
        assert!(kernel_identity_residual(&k) <= IDENTITY_TOL);
        k.scale_row(2, 1.01);
        assert!(kernel_identity_residual(&k) > 1e-3);
    }

    #[test]
    fn random_graphs_are_triangle_free() {
        let mut rng = stream_rng(5, 0);
        for _ in 0..50 {
            assert!(random_triangle_free(12, 0.5, &mut rng).is_triangle_free());
        }
    }

    #[test]
    fn small_suite_passes_and_is_deterministic() {
        let suite = OracleSuite::new(11, 4, 5);
        let a = suite.run_all();
        let b = suite.run_all();
        assert_eq!(a, b);
        for c in &a {
            assert!(c.pass, "{c:?}");
        }
    }

    #[test]
    fn check_names_match_run_order() {
        let names: Vec<String> = OracleSuite::new(1, 1, 3)
            .run_all()
            .into_iter()
            .map(|c| c.check)
            .collect();
        assert_eq!(names, CHECK_NAMES);
    }
}
