use serde::Serialize;

use crate::models::{Graph, IsingModel};
use crate::{Error, Result};

/// Largest `n` accepted for enumeration.
pub const MAX_ENUM_SITES: usize = 20;
/// Mass tolerance for normalised tables.
pub const MASS_TOL: f64 = 1e-12;

/// Meaning of a set bit in a state code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    /// Bit `i` set means `x_i = +1`, clear means `x_i = −1`.
    Spins,
    /// Bit `i` set means vertex `i` is occupied.
    Occupancy,
}

impl StateKind {
    #[inline]
    pub fn coord(self, state: u32, i: usize) -> f64 {
        let bit = state >> i & 1 == 1;
        match (self, bit) {
            (StateKind::Spins, true) => 1.0,
            (StateKind::Spins, false) => -1.0,
            (StateKind::Occupancy, true) => 1.0,
            (StateKind::Occupancy, false) => 0.0,
        }
    }
}

/// Probability vector over an enumerated, sorted set of bit-encoded states.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactTable {
    n: usize,
    kind: StateKind,
    states: Vec<u32>,
    probs: Vec<f64>,
}

impl ExactTable {
    /// Builds a table; `states` must be strictly increasing codes below `2ⁿ`
    /// and `probs` a probability vector of the same length.
    pub fn new(n: usize, kind: StateKind, states: Vec<u32>, probs: Vec<f64>) -> Result<Self> {
        if n > MAX_ENUM_SITES {
            return Err(Error::TooLarge {
                what: "n",
                value: n,
                limit: MAX_ENUM_SITES,
            });
        }
        if states.len() != probs.len() || states.is_empty() {
            return Err(Error::Mismatch(format!(
                "{} states but {} probabilities",
                states.len(),
                probs.len()
            )));
        }
        if states.windows(2).any(|w| w[0] >= w[1]) || *states.last().unwrap() >> n != 0 {
            return Err(Error::InvalidParameter("states must be sorted codes below 2^n".into()));
        }
        if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidParameter("negative or non-finite probability".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidParameter(format!("probabilities sum to {total}")));
        }
        Ok(ExactTable { n, kind, states, probs })
    }

    /// Normalises `log_weights` by log-sum-exp.
    pub fn from_log_weights(n: usize, kind: StateKind, states: Vec<u32>, log_weights: &[f64]) -> Result<Self> {
        let m = log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = log_weights.iter().map(|l| (l - m).exp()).collect();
        let z: f64 = w.iter().sum();
        Self::new(n, kind, states, w.into_iter().map(|x| x / z).collect())
    }

    /// Uniform distribution over the given states.
    pub fn uniform(n: usize, kind: StateKind, states: Vec<u32>) -> Result<Self> {
        let p = 1.0 / states.len() as f64;
        let probs = vec![p; states.len()];
        Self::new(n, kind, states, probs)
    }

    /// Same support, new probabilities.
    pub fn with_probs(&self, probs: Vec<f64>) -> Result<Self> {
        Self::new(self.n, self.kind, self.states.clone(), probs)
    }

    /// Same support, probabilities proportional to `weights`.
    pub fn with_weights(&self, weights: &[f64]) -> Result<Self> {
        let z: f64 = weights.iter().sum();
        if !(z > 0.0) {
            return Err(Error::InvalidParameter("weights have no mass".into()));
        }
        self.with_probs(weights.iter().map(|w| w / z).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[u32] {
        &self.states
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn is_full_cube(&self) -> bool {
        self.states.len() == 1usize << self.n
    }

    /// Position of `state` in the support.
    #[inline]
    pub fn index_of(&self, state: u32) -> Option<usize> {
        if self.is_full_cube() {
            ((state as usize) < self.states.len()).then_some(state as usize)
        } else {
            self.states.binary_search(&state).ok()
        }
    }

    pub fn prob_of(&self, state: u32) -> f64 {
        self.index_of(state).map_or(0.0, |k| self.probs[k])
    }

    /// Coordinate `i` of the state at position `idx`.
    #[inline]
    pub fn coord(&self, idx: usize, i: usize) -> f64 {
        self.kind.coord(self.states[idx], i)
    }

    /// `⟨w, x⟩` for the state at position `idx`.
    pub fn linear(&self, idx: usize, w: &[f64]) -> f64 {
        (0..self.n).map(|i| w[i] * self.coord(idx, i)).sum()
    }

    pub fn expectation<F: Fn(usize) -> f64>(&self, f: F) -> f64 {
        self.probs.iter().enumerate().map(|(k, p)| p * f(k)).sum()
    }

    /// Mean vector `E x`.
    pub fn mean(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.expectation(|k| self.coord(k, i))).collect()
    }

    /// Smallest positive probability.
    pub fn min_positive(&self) -> f64 {
        self.probs
            .iter()
            .cloned()
            .filter(|&p| p > 0.0)
            .fold(f64::INFINITY, f64::min)
    }

    /// Errors unless `other` has the same support.
    pub fn check_same_support(&self, other: &ExactTable) -> Result<()> {
        if self.n != other.n || self.kind != other.kind || self.states != other.states {
            return Err(Error::Mismatch("tables have different supports".into()));
        }
        Ok(())
    }
}

fn check_sites(n: usize) -> Result<()> {
    if n > MAX_ENUM_SITES {
        return Err(Error::TooLarge {
            what: "n",
            value: n,
            limit: MAX_ENUM_SITES,
        });
    }
    Ok(())
}

/// `μ_{J,h}` on all `2ⁿ` spin configurations.
pub fn enumerate_ising(model: &IsingModel) -> Result<ExactTable> {
    let n = model.n();
    check_sites(n)?;
    let j = model.j.to_dense();
    let states: Vec<u32> = (0..1u32 << n).collect();
    let mut x = vec![0.0; n];
    let logw: Vec<f64> = states
        .iter()
        .map(|&s| {
            for (i, xi) in x.iter_mut().enumerate() {
                *xi = StateKind::Spins.coord(s, i);
            }
            let mut q = 0.0;
            for a in 0..n {
                let row: f64 = (0..n).map(|b| j[(a, b)] * x[b]).sum();
                q += x[a] * row;
            }
            0.5 * q + model.h.iter().zip(&x).map(|(h, xi)| h * xi).sum::<f64>()
        })
        .collect();
    ExactTable::from_log_weights(n, StateKind::Spins, states, &logw)
}

/// Independent sets of `graph` as sorted bitmasks.
pub fn independent_sets(graph: &Graph) -> Result<Vec<u32>> {
    let n = graph.n();
    check_sites(n)?;
    let nbr: Vec<u32> = (0..n)
        .map(|v| graph.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u))
        .collect();
    Ok((0..1u32 << n)
        .filter(|&s| (0..n).all(|v| s >> v & 1 == 0 || s & nbr[v] == 0))
        .collect())
}

/// Uniform measure over the independent sets of `graph`.
pub fn enumerate_hardcore(graph: &Graph) -> Result<ExactTable> {
    ExactTable::uniform(graph.n(), StateKind::Occupancy, independent_sets(graph)?)
}

/// Expected size of a uniformly random independent set.
pub fn uniform_indepset_expected_size(graph: &Graph) -> Result<f64> {
    let sets = independent_sets(graph)?;
    let total: u64 = sets.iter().map(|s| s.count_ones() as u64).sum();
    Ok(total as f64 / sets.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{curie_weiss, InteractionOperator};

    #[test]
    fn zero_model_is_uniform() {
        let t = enumerate_ising(&IsingModel::without_field(InteractionOperator::zeros(4))).unwrap();
        assert!(t.probs().iter().all(|&p| (p - 1.0 / 16.0).abs() < 1e-15));
        assert!(t.is_full_cube());
    }

    #[test]
    fn single_spin_field() {
        let h = 0.7f64;
        let t = enumerate_ising(&IsingModel::new(InteractionOperator::zeros(1), vec![h]).unwrap()).unwrap();
        let want = h.exp() / (h.exp() + (-h).exp());
        assert!((t.prob_of(1) - want).abs() < 1e-15);
    }

    #[test]
    fn star_support_size() {
        for leaves in 1..8 {
            let t = enumerate_hardcore(&Graph::star(leaves)).unwrap();
            assert_eq!(t.len(), (1 << leaves) + 1);
        }
    }

    #[test]
    fn expected_sizes() {
        assert_eq!(uniform_indepset_expected_size(&Graph::empty(1)).unwrap(), 0.5);
        assert!((uniform_indepset_expected_size(&Graph::complete(2)).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn curie_weiss_magnetisation() {
        let t = enumerate_ising(&curie_weiss(10, 3.0).unwrap()).unwrap();
        let m = t.expectation(|k| (0..10).map(|i| t.coord(k, i)).sum::<f64>());
        let abs_m = t.expectation(|k| (0..10).map(|i| t.coord(k, i)).sum::<f64>().abs());
        assert!(m.abs() < 1e-12);
        assert!(abs_m / 10.0 > 0.8);
    }

    #[test]
    fn table_validation() {
        assert!(ExactTable::new(2, StateKind::Spins, vec![1, 0], vec![0.5, 0.5]).is_err());
        assert!(ExactTable::new(2, StateKind::Spins, vec![0, 4], vec![0.5, 0.5]).is_err());
        assert!(ExactTable::new(2, StateKind::Spins, vec![0, 1], vec![0.5, 0.6]).is_err());
        assert!(ExactTable::new(21, StateKind::Spins, vec![0], vec![1.0]).is_err());
        let t = ExactTable::new(2, StateKind::Occupancy, vec![0, 2], vec![0.25, 0.75]).unwrap();
        assert_eq!(t.index_of(2), Some(1));
        assert_eq!(t.index_of(1), None);
        assert_eq!(t.mean(), vec![0.0, 0.75]);
    }
}
