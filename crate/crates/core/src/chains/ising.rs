use rand::Rng;

use super::{Configuration, SiteChain};
use crate::models::{dense_column, InteractionOperator, IsingModel};

/// Updates between full cache recomputations.
pub const REFRESH_INTERVAL: u64 = 100_000;

/// Spin configuration with cached interaction fields.
///
/// `pair_field[i]` holds the sparse and dense contributions to
/// `Σ_{j≠i} J_ij x_j`; `rank_one_cache[k]` holds `⟨u_k, x⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct IsingState {
    x: Vec<f64>,
    pair_field: Vec<f64>,
    rank_one_cache: Vec<f64>,
    since_refresh: u64,
}

impl IsingState {
    /// State at `x` (entries must be `±1`) with caches computed for `j`.
    pub fn new(j: &InteractionOperator, x: Vec<f64>) -> Self {
        assert_eq!(x.len(), j.n(), "dimension mismatch");
        assert!(x.iter().all(|&s| s == 1.0 || s == -1.0), "spins must be +-1");
        let mut state = IsingState {
            pair_field: vec![0.0; x.len()],
            rank_one_cache: vec![0.0; j.rank_one_terms().len()],
            x,
            since_refresh: 0,
        };
        state.refresh(j);
        state
    }

    /// Uniformly random configuration.
    pub fn random<R: Rng + ?Sized>(j: &InteractionOperator, rng: &mut R) -> Self {
        let x = (0..j.n())
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        Self::new(j, x)
    }

    /// Configuration decoded from a bitmask (bit set means `+1`).
    pub fn from_mask(j: &InteractionOperator, mask: u64) -> Self {
        let x = (0..j.n())
            .map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 })
            .collect();
        Self::new(j, x)
    }

    pub fn spins(&self) -> &[f64] {
        &self.x
    }

    /// Bitmask of the `+1` coordinates (first 64 only).
    pub fn mask(&self) -> u64 {
        self.x
            .iter()
            .take(64)
            .enumerate()
            .filter(|(_, &s)| s > 0.0)
            .fold(0, |m, (i, _)| m | 1 << i)
    }

    /// Cached `⟨u_k, x⟩` for each rank-one term.
    pub fn rank_one_cache(&self) -> &[f64] {
        &self.rank_one_cache
    }

    /// Cached `m_i = Σ_{j≠i} J_ij x_j`.
    #[inline]
    pub fn local_field(&self, j: &InteractionOperator, i: usize) -> f64 {
        let xi = self.x[i];
        let mut m = self.pair_field[i];
        for (term, &c) in j.rank_one_terms().iter().zip(&self.rank_one_cache) {
            let ui = term.u[i];
            m += term.coef * ui * (c - ui * xi);
        }
        m
    }

    /// Recomputes every cache from `x`.
    pub fn refresh(&mut self, j: &InteractionOperator) {
        let sparse = j.sparse();
        for i in 0..self.x.len() {
            let (cols, vals) = sparse.row(i);
            self.pair_field[i] = cols.iter().zip(vals).map(|(&c, &w)| w * self.x[c as usize]).sum();
        }
        if let Some(d) = j.dense() {
            for i in 0..self.x.len() {
                let col = dense_column(d, i);
                let s: f64 = col.iter().zip(&self.x).map(|(a, b)| a * b).sum();
                self.pair_field[i] += s - col[i] * self.x[i];
            }
        }
        for (cache, term) in self.rank_one_cache.iter_mut().zip(j.rank_one_terms()) {
            *cache = term.u.iter().zip(&self.x).map(|(a, b)| a * b).sum();
        }
        self.since_refresh = 0;
    }

    /// Largest deviation between cached and recomputed local fields.
    pub fn cache_drift(&self, j: &InteractionOperator) -> f64 {
        (0..self.x.len())
            .map(|i| (self.local_field(j, i) - j.offdiag_field(i, &self.x)).abs())
            .fold(0.0, f64::max)
    }

    /// Flips spin `i` and updates the caches incrementally.
    pub fn flip(&mut self, j: &InteractionOperator, i: usize) {
        let delta = -2.0 * self.x[i];
        self.x[i] = -self.x[i];
        let (cols, vals) = j.sparse().row(i);
        for (&c, &w) in cols.iter().zip(vals) {
            self.pair_field[c as usize] += w * delta;
        }
        if let Some(d) = j.dense() {
            let col = dense_column(d, i);
            for (f, &dij) in self.pair_field.iter_mut().zip(col) {
                *f += dij * delta;
            }
            self.pair_field[i] -= col[i] * delta;
        }
        for (cache, term) in self.rank_one_cache.iter_mut().zip(j.rank_one_terms()) {
            *cache += term.u[i] * delta;
        }
    }

    fn tick(&mut self, j: &InteractionOperator) {
        self.since_refresh += 1;
        if self.since_refresh >= REFRESH_INTERVAL {
            self.refresh(j);
        }
    }
}

/// `1 / (1 + exp(a))` without overflow.
#[inline]
pub fn logistic_complement(a: f64) -> f64 {
    if a > 0.0 {
        let e = (-a).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + a.exp())
    }
}

/// Heat-bath update of a uniform coordinate under `μ_{J,h}` where the field
/// at site `i` is `field(i)`. Returns whether a spin flipped.
#[inline]
pub fn glauber_update<R, F>(j: &InteractionOperator, field: F, state: &mut IsingState, rng: &mut R) -> bool
where
    R: Rng + ?Sized,
    F: Fn(usize) -> f64,
{
    let i = rng.random_range(0..state.x.len());
    let a = 2.0 * state.x[i] * (state.local_field(j, i) + field(i));
    let p = logistic_complement(a);
    let u: f64 = rng.random();
    let flipped = u < p;
    if flipped {
        state.flip(j, i);
    }
    state.tick(j);
    flipped
}

/// One Glauber update of `model`: pick `i` uniformly, flip with probability
/// `1 / (1 + exp(2 x_i (m_i + h_i)))`.
#[inline]
pub fn glauber_step_ising<R: Rng + ?Sized>(model: &IsingModel, state: &mut IsingState, rng: &mut R) -> bool {
    glauber_update(&model.j, |i| model.h[i], state, rng)
}

/// Ising Glauber dynamics.
#[derive(Clone, Copy, Debug)]
pub struct IsingGlauber<'a> {
    pub model: &'a IsingModel,
}

impl SiteChain for IsingGlauber<'_> {
    type State = IsingState;

    fn dim(&self) -> usize {
        self.model.n()
    }

    #[inline]
    fn step<R: Rng + ?Sized>(&self, state: &mut IsingState, rng: &mut R) {
        glauber_step_ising(self.model, state, rng);
    }
}

impl Configuration for IsingState {
    fn dim(&self) -> usize {
        self.x.len()
    }

    fn occupied(&self) -> usize {
        self.x.iter().filter(|&&s| s > 0.0).count()
    }

    fn dot(&self, w: &[f64]) -> f64 {
        self.x.iter().zip(w).map(|(a, b)| a * b).sum()
    }

    fn value(&self, i: usize) -> f64 {
        self.x[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use nalgebra::DMatrix;

    fn mixed_operator(n: usize) -> InteractionOperator {
        let mut rng = stream_rng(42, 0);
        let trip: Vec<_> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|_| rng.random::<f64>() < 0.3)
            .map(|(i, j)| (i, j, 0.4))
            .chain([(0, 0, 0.7)])
            .collect();
        let dense = DMatrix::from_fn(n, n, |i, j| 0.05 * ((i + j) as f64).cos());
        InteractionOperator::zeros(n)
            .with_sparse(&trip)
            .unwrap()
            .with_rank_one(0.3, (0..n).map(|i| (i as f64).sin()).collect())
            .unwrap()
            .with_dense(dense)
            .unwrap()
    }

    #[test]
    fn zero_interaction_flips_half() {
        let model = IsingModel::without_field(InteractionOperator::zeros(3));
        let mut rng = stream_rng(0, 0);
        let mut s = IsingState::new(&model.j, vec![1.0; 3]);
        let trials = 100_000;
        let flips = (0..trials)
            .filter(|_| glauber_step_ising(&model, &mut s, &mut rng))
            .count();
        let p = flips as f64 / trials as f64;
        assert!((p - 0.5).abs() < 4.0 * (0.25 / trials as f64).sqrt());
    }

    #[test]
    fn strong_field_forces_up() {
        let model = IsingModel::new(InteractionOperator::zeros(1), vec![800.0]).unwrap();
        let mut rng = stream_rng(0, 1);
        let mut s = IsingState::new(&model.j, vec![-1.0]);
        assert!(glauber_step_ising(&model, &mut s, &mut rng));
        assert_eq!(s.spins(), &[1.0]);
        assert!(!glauber_step_ising(&model, &mut s, &mut rng));
    }

    #[test]
    fn logistic_is_stable() {
        assert_eq!(logistic_complement(1e6), 0.0);
        assert_eq!(logistic_complement(-1e6), 1.0);
        assert!((logistic_complement(0.0) - 0.5).abs() < 1e-16);
    }

    #[test]
    fn caches_track_flips() {
        let j = mixed_operator(30);
        let model = IsingModel::new(j, vec![0.1; 30]).unwrap();
        let mut rng = stream_rng(5, 0);
        let mut s = IsingState::random(&model.j, &mut rng);
        for _ in 0..50_000 {
            glauber_step_ising(&model, &mut s, &mut rng);
        }
        assert!(s.cache_drift(&model.j) < 1e-9);
        let fresh = IsingState::new(&model.j, s.spins().to_vec());
        for i in 0..30 {
            assert!((fresh.local_field(&model.j, i) - s.local_field(&model.j, i)).abs() < 1e-9);
        }
    }

    #[test]
    fn mask_round_trip() {
        let j = InteractionOperator::zeros(5);
        let s = IsingState::from_mask(&j, 0b10110);
        assert_eq!(s.spins(), &[-1.0, 1.0, 1.0, -1.0, 1.0]);
        assert_eq!(s.mask(), 0b10110);
    }
}
