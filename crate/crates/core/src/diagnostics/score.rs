use crate::chains::Configuration;
use crate::models::Graph;

/// `φ_v(x) = d·x_v + Σ_{u∈N(v)} x_u` with `d` the maximum degree.
pub fn score_phi<C: Configuration + ?Sized>(graph: &Graph, v: usize, x: &C) -> f64 {
    let d = graph.max_degree() as f64;
    d * x.value(v) + graph.neighbors(v).iter().map(|&u| x.value(u as usize)).sum::<f64>()
}

/// `(1/n) Σ_v φ_v(x)`.
pub fn score_average<C: Configuration + ?Sized>(graph: &Graph, x: &C) -> f64 {
    let n = graph.n();
    (0..n).map(|v| score_phi(graph, v, x)).sum::<f64>() / n as f64
}

/// Expected score of a star centre with `k` unblocked leaves under the
/// uniform measure: `d/(2ᵏ+1) + (k/2)·2ᵏ/(2ᵏ+1)`.
pub fn conditional_score_expectation(k: u32, d: f64) -> f64 {
    // divide through by 2^k so large k stays finite
    let r = 0.5f64.powi(k as i32);
    d * r / (1.0 + r) + 0.5 * k as f64 / (1.0 + r)
}
