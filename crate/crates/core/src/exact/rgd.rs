use super::kernel::{KernelMatrix, Row};
use super::quadrature::gauss_hermite;
use super::table::{enumerate_ising, ExactTable};
use crate::models::{InteractionOperator, IsingModel, SpikedInstance};
use crate::{Error, Result};

/// Largest `n` accepted for exact RGD kernels.
pub const MAX_RGD_SITES: usize = 12;
/// Correlations closer than this share a kernel row.
const CLASS_TOL: f64 = 1e-12;

/// Softmax of `logp + s·proj`.
pub(crate) fn tilted_probs(logp: &[f64], proj: &[f64], s: f64) -> Vec<f64> {
    let m = logp
        .iter()
        .zip(proj)
        .map(|(l, p)| l + s * p)
        .fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logp.iter().zip(proj).map(|(l, p)| (l + s * p - m).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

/// Exact restricted Gaussian dynamics kernel for `M = W + λvvᵀ`:
/// `K(x, y) = E_g μ_{W, (λ⟨v,x⟩ + √λ g) v}(y)` with the Gaussian expectation
/// taken by Gauss–Hermite quadrature of the given order.
pub fn rgd_kernel(w: &InteractionOperator, v: &[f64], lambda: f64, order: usize) -> Result<KernelMatrix> {
    let n = w.n();
    if n > MAX_RGD_SITES {
        return Err(Error::TooLarge {
            what: "n",
            value: n,
            limit: MAX_RGD_SITES,
        });
    }
    if v.len() != n {
        return Err(Error::Mismatch("spike and W dimensions differ".into()));
    }
    if !(lambda >= 0.0) {
        return Err(Error::InvalidParameter(format!("invalid lambda {lambda}")));
    }
    let (nodes, weights) = gauss_hermite(order)?;
    let base = enumerate_ising(&IsingModel::without_field(w.clone()))?;
    let m_op = w.clone().with_rank_one(lambda, v.to_vec())?;
    let stationary = enumerate_ising(&IsingModel::without_field(m_op))?;

    let logp: Vec<f64> = base.probs().iter().map(|p| p.ln()).collect();
    let proj: Vec<f64> = (0..base.len()).map(|k| base.linear(k, v)).collect();

    let mut sorted: Vec<f64> = proj.clone();
    sorted.sort_by(f64::total_cmp);
    let mut classes: Vec<f64> = Vec::new();
    for c in sorted {
        if classes.last().is_none_or(|&l| c - l > CLASS_TOL) {
            classes.push(c);
        }
    }
    let class_of = |c: f64| -> u32 {
        let k = classes.partition_point(|&l| l < c - CLASS_TOL);
        k as u32
    };

    let sq = lambda.sqrt();
    let rows: Vec<Row> = classes
        .iter()
        .map(|&c| {
            let mut row = vec![0.0; base.len()];
            for (g, wq) in nodes.iter().zip(&weights) {
                let s = lambda * c + sq * g;
                for (r, p) in row.iter_mut().zip(tilted_probs(&logp, &proj, s)) {
                    *r += wq * p;
                }
            }
            row.into_iter().enumerate().map(|(y, p)| (y as u32, p)).collect()
        })
        .collect();
    let row_of = proj.iter().map(|&c| class_of(c)).collect();
    KernelMatrix::from_rows(rows, row_of, stationary)
}

/// [`rgd_kernel`] for a spiked instance.
pub fn rgd_kernel_for(inst: &SpikedInstance, order: usize) -> Result<KernelMatrix> {
    rgd_kernel(&inst.w, &inst.v, inst.lambda, order)
}

/// `μ_{W,0}` for the instance, as an exact table.
pub fn background_table(w: &InteractionOperator) -> Result<ExactTable> {
    enumerate_ising(&IsingModel::without_field(w.clone()))
}
