use rand::Rng;
use serde::{Deserialize, Serialize};

use super::graph::Graph;
use super::operator::InteractionOperator;
use crate::rng::{stream_rng, INSTANCE_STREAM};
use crate::{Error, Result};

/// Two-community sparse stochastic block model sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SbmInstance {
    pub sigma: Vec<i8>,
    pub graph: Graph,
    pub d: f64,
    pub lambda: f64,
}

impl SbmInstance {
    pub fn n(&self) -> usize {
        self.sigma.len()
    }

    /// Hidden labels as `±1.0`.
    pub fn sigma_f64(&self) -> Vec<f64> {
        self.sigma.iter().map(|&s| s as f64).collect()
    }

    /// Unit spike `σ/√n`.
    pub fn spike(&self) -> Vec<f64> {
        let s = 1.0 / (self.n() as f64).sqrt();
        self.sigma.iter().map(|&x| x as f64 * s).collect()
    }

    /// Within- and across-community edge probabilities.
    pub fn edge_probabilities(&self) -> (f64, f64) {
        edge_probabilities(self.n(), self.d, self.lambda)
    }
}

fn edge_probabilities(n: usize, d: f64, lambda: f64) -> (f64, f64) {
    let r = lambda * d.sqrt();
    ((d + r) / n as f64, ((d - r) / n as f64).max(0.0))
}

/// Samples labels uniformly and each pair independently, with probability
/// `(d + λ√d)/n` within a community and `(d − λ√d)/n` across.
pub fn sample_sbm(n: usize, d: f64, lambda: f64, seed: u64) -> Result<SbmInstance> {
    if !(d > 0.0) || d >= n as f64 {
        return Err(Error::InvalidParameter(format!("need 0 < d < n, got d = {d}, n = {n}")));
    }
    if !(lambda >= 0.0) || lambda * lambda > d * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= lambda and lambda^2 <= d, got lambda = {lambda}, d = {d}"
        )));
    }
    let (p_in, p_out) = edge_probabilities(n, d, lambda);
    if p_in > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "within-community probability {p_in} exceeds 1"
        )));
    }
    let mut rng = stream_rng(seed, INSTANCE_STREAM);
    let sigma: Vec<i8> = (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if sigma[u] == sigma[v] { p_in } else { p_out };
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Ok(SbmInstance {
        graph: Graph::from_edges(n, edges)?,
        sigma,
        d,
        lambda,
    })
}

/// `A_G − (d/n) 11ᵀ`, unscaled.
pub fn centered_adjacency(instance: &SbmInstance) -> InteractionOperator {
    adjacency_minus_mean(&instance.graph, instance.d)
}

/// `A_G − (d/n) 11ᵀ` for an arbitrary graph.
pub fn adjacency_minus_mean(graph: &Graph, d: f64) -> InteractionOperator {
    let n = graph.n();
    let triplets: Vec<_> = graph.edges().map(|(u, v)| (u, v, 1.0)).collect();
    InteractionOperator::zeros(n)
        .with_sparse(&triplets)
        .and_then(|op| op.with_rank_one(-d / n as f64, vec![1.0; n]))
        .expect("graph edges are in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_cross_edges_at_threshold() {
        let inst = sample_sbm(300, 9.0, 3.0, 4).unwrap();
        assert!(inst.graph.edges().all(|(u, v)| inst.sigma[u] == inst.sigma[v]));
        assert!(inst.graph.edge_count() > 0);
    }

    #[test]
    fn centered_rows_on_regular_graph() {
        let g = Graph::cycle(8);
        let op = adjacency_minus_mean(&g, 2.0);
        let y = op.apply(&[1.0; 8]);
        assert!(y.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn apply_ones_gives_degree_excess() {
        let inst = sample_sbm(100, 5.0, 1.0, 3).unwrap();
        let y = centered_adjacency(&inst).apply(&[1.0; 100]);
        for (v, yv) in y.iter().enumerate() {
            assert!((yv - (inst.graph.degree(v) as f64 - 5.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn parameter_violations() {
        assert!(sample_sbm(100, 4.0, 2.5, 0).is_err());
        assert!(sample_sbm(10, 10.0, 1.0, 0).is_err());
        assert!(sample_sbm(10, 0.0, 0.0, 0).is_err());
    }
}
