use nalgebra::{DMatrix, SymmetricEigen};

use crate::{Error, Result};

/// Smallest accepted Gauss–Hermite order.
pub const MIN_QUADRATURE_ORDER: usize = 8;

/// Orthonormal Hermite values `p_{n-1}(x), p_n(x)` for the standard normal.
fn hermite_pair(n: usize, x: f64) -> (f64, f64, f64) {
    // returns (p_{n-1}, p_n, Σ_{k<n} p_k²)
    let (mut prev, mut cur) = (0.0, 1.0);
    let mut sumsq = 0.0;
    for k in 0..n {
        sumsq += cur * cur;
        let next = (x * cur - (k as f64).sqrt() * prev) / ((k + 1) as f64).sqrt();
        prev = cur;
        cur = next;
    }
    (prev, cur, sumsq)
}

/// Nodes and weights with `Σ w_i f(g_i) ≈ E f(g)` for `g ~ N(0, 1)`, exact
/// for polynomials of degree below `2·order`.
pub fn gauss_hermite(order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if order < MIN_QUADRATURE_ORDER {
        return Err(Error::InvalidParameter(format!(
            "quadrature order {order} below {MIN_QUADRATURE_ORDER}"
        )));
    }
    let mut jacobi = DMatrix::<f64>::zeros(order, order);
    for k in 1..order {
        let b = (k as f64).sqrt();
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }
    let eig = SymmetricEigen::try_new(jacobi, 1e-15, 10_000)
        .ok_or_else(|| Error::Eigen("Jacobi matrix eigensolve failed".into()))?;
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    nodes.sort_by(f64::total_cmp);
    let mut weights = Vec::with_capacity(order);
    for x in nodes.iter_mut() {
        // Newton polish on p_n, using p_n' = √n p_{n-1}
        for _ in 0..3 {
            let (pm1, pn, _) = hermite_pair(order, *x);
            let step = pn / ((order as f64).sqrt() * pm1);
            if !step.is_finite() {
                break;
            }
            *x -= step;
        }
        let (_, _, sumsq) = hermite_pair(order, *x);
        weights.push(1.0 / sumsq);
    }
    // symmetrise
    for i in 0..order / 2 {
        let j = order - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -x;
        nodes[j] = x;
        let w = 0.5 * (weights[i] + weights[j]);
        weights[i] = w;
        weights[j] = w;
    }
    if order % 2 == 1 {
        nodes[order / 2] = 0.0;
    }
    Ok((nodes, weights))
}
