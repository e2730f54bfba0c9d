use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::ising::IsingModel;
use super::operator::InteractionOperator;
use crate::rng::{stream_rng, INSTANCE_STREAM};
use crate::{Error, Result};

/// Spectral containment tolerance for supplied or generated `W`.
pub const SPECTRUM_TOL: f64 = 1e-9;

/// Planted spike `M = W + λ v vᵀ` with `κ ⪯ W ⪯ 1 − κ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpikedInstance {
    pub v: Vec<f64>,
    pub lambda: f64,
    pub kappa: f64,
    pub w: InteractionOperator,
    pub m: InteractionOperator,
}

impl SpikedInstance {
    /// Assembles an instance from an explicit `W` (e.g. loaded from a file),
    /// checking the unit norm of `v` and the spectral window of `W`.
    pub fn from_parts(w: DMatrix<f64>, v: Vec<f64>, lambda: f64, kappa: f64) -> Result<Self> {
        check_params(lambda, kappa, true)?;
        let n = v.len();
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("spike has norm {norm}, expected 1")));
        }
        let eig = SymmetricEigen::try_new(w.clone(), 1e-14, 10_000)
            .ok_or_else(|| Error::Eigen("symmetric eigensolver did not converge".into()))?;
        if let Some(bad) = eig
            .eigenvalues
            .iter()
            .find(|&&e| e < kappa - SPECTRUM_TOL || e > 1.0 - kappa + SPECTRUM_TOL)
        {
            return Err(Error::InvalidParameter(format!(
                "eigenvalue {bad} of W outside [{kappa}, {}]",
                1.0 - kappa
            )));
        }
        let w_op = InteractionOperator::zeros(n).with_dense(w)?;
        let m = w_op.clone().with_rank_one(lambda, v.clone())?;
        Ok(SpikedInstance {
            v,
            lambda,
            kappa,
            w: w_op,
            m,
        })
    }

    pub fn n(&self) -> usize {
        self.v.len()
    }

    /// `μ_M` with zero external field.
    pub fn planted_model(&self) -> IsingModel {
        IsingModel::without_field(self.m.clone())
    }

    /// `μ_{W,h}`.
    pub fn background_model(&self, h: Vec<f64>) -> Result<IsingModel> {
        IsingModel::new(self.w.clone(), h)
    }
}

fn check_params(lambda: f64, kappa: f64, allow_zero_lambda: bool) -> Result<()> {
    if !(kappa > 0.0 && kappa < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "kappa must lie in (0, 1/2), got {kappa}"
        )));
    }
    let ok = if allow_zero_lambda { lambda >= 0.0 } else { lambda > 0.0 };
    if !ok || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("invalid lambda {lambda}")));
    }
    Ok(())
}

/// Random spiked instance.
///
/// `v` has i.i.d. uniform signs scaled by `1/√n`. `W` keeps the eigenvectors
/// of a symmetric Gaussian matrix and maps its spectrum affinely onto
/// `[κ, 1 − κ]`. A zero `lambda` is accepted so null controls can reuse the
/// generator.
pub fn gen_spiked_wigner(n: usize, lambda: f64, kappa: f64, seed: u64) -> Result<SpikedInstance> {
    check_params(lambda, kappa, true)?;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let mut rng = stream_rng(seed, INSTANCE_STREAM);
    let scale = 1.0 / (n as f64).sqrt();
    let v: Vec<f64> = (0..n)
        .map(|_| if rng.random::<bool>() { scale } else { -scale })
        .collect();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let g: f64 = rng.sample(StandardNormal);
            a[(i, j)] = g;
            a[(j, i)] = g;
        }
    }
    let eig = SymmetricEigen::try_new(a, 1e-14, 10_000)
        .ok_or_else(|| Error::Eigen("symmetric eigensolver did not converge".into()))?;
    let (lo, hi) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &e| (l.min(e), h.max(e)));
    let remapped = eig.eigenvalues.map(|e| {
        if hi > lo {
            kappa + (e - lo) / (hi - lo) * (1.0 - 2.0 * kappa)
        } else {
            0.5
        }
    });
    let q = &eig.eigenvectors;
    let mut w = q * DMatrix::from_diagonal(&remapped) * q.transpose();
    // exact symmetry
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (w[(i, j)] + w[(j, i)]);
            w[(i, j)] = s;
            w[(j, i)] = s;
        }
    }
    SpikedInstance::from_parts(w, v, lambda, kappa)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_is_contained() {
        let inst = gen_spiked_wigner(40, 3.0, 0.25, 5).unwrap();
        let w = inst.w.to_dense();
        let eig = SymmetricEigen::new(w);
        for &e in eig.eigenvalues.iter() {
            assert!((0.25 - SPECTRUM_TOL..=0.75 + SPECTRUM_TOL).contains(&e), "{e}");
        }
    }

    #[test]
    fn spike_is_unit_sign_vector() {
        let inst = gen_spiked_wigner(25, 1.0, 0.1, 2).unwrap();
        let s = 1.0 / 5.0;
        assert!(inst.v.iter().all(|&x| x == s || x == -s));
        let norm: f64 = inst.v.iter().map(|x| x * x).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn planted_minus_spike_is_background() {
        let inst = gen_spiked_wigner(20, 7.0, 0.2, 9).unwrap();
        let m = inst.m.to_dense();
        let w = inst.w.to_dense();
        for i in 0..20 {
            for j in 0..20 {
                let diff = m[(i, j)] - 7.0 * inst.v[i] * inst.v[j] - w[(i, j)];
                assert!(diff.abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn parameter_checks() {
        assert!(gen_spiked_wigner(10, 1.0, 0.5, 0).is_err());
        assert!(gen_spiked_wigner(10, -1.0, 0.2, 0).is_err());
        let w = DMatrix::from_diagonal_element(2, 2, 0.9);
        let v = vec![1.0 / 2f64.sqrt(); 2];
        assert!(SpikedInstance::from_parts(w, v, 1.0, 0.25).is_err());
    }

    #[test]
    fn single_site_instance() {
        let inst = gen_spiked_wigner(1, 1.0, 0.3, 0).unwrap();
        assert!((inst.w.entry(0, 0) - 0.5).abs() < 1e-12);
    }
}
