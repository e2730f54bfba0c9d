use nalgebra::{DMatrix, SymmetricEigen};

use super::kernel::KernelMatrix;
use crate::{Error, Result};

/// Largest support handled by the dense spectral-gap computation.
pub const MAX_GAP_STATES: usize = 4096;

/// `1 − λ₂` for a reversible kernel, from the symmetrised matrix
/// `D^{1/2} P D^{−1/2}` with `D = diag(π)`.
pub fn spectral_gap(kernel: &KernelMatrix) -> Result<f64> {
    let size = kernel.size();
    if size > MAX_GAP_STATES {
        return Err(Error::TooLarge {
            what: "support",
            value: size,
            limit: MAX_GAP_STATES,
        });
    }
    if size < 2 {
        return Err(Error::VacuousBound("single-state support has no spectral gap".into()));
    }
    let root: Vec<f64> = kernel.stationary().probs().iter().map(|p| p.sqrt()).collect();
    let mut s = DMatrix::<f64>::zeros(size, size);
    for x in 0..size {
        for &(y, p) in kernel.row(x) {
            let y = y as usize;
            s[(x, y)] += root[x] * p / root[y];
        }
    }
    let sym = (&s + s.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(sym, 1e-14, 100_000)
        .ok_or_else(|| Error::Eigen("spectral gap eigensolve failed".into()))?;
    let mut ev: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok(1.0 - ev[1])
}

/// `(1 − 2π*) / ln(1/π* − 1)` with `π*` the smallest mass; the limit `½`
/// is used at `π* = ½`.
pub fn mlsi_prefactor(pi_star: f64) -> f64 {
    let e = 0.5 - pi_star;
    if e.abs() < 1e-6 {
        // series of (2e)/ln((½+e)/(½−e)) around e = 0
        0.5 - 2.0 / 3.0 * e * e
    } else {
        (1.0 - 2.0 * pi_star) / (1.0 / pi_star - 1.0).ln()
    }
}

/// Certified lower bound on the MLSI constant of a reversible kernel:
/// `(1 − 2π*) / ln(1/π* − 1) · gap`.
pub fn mlsi_lower_bound(kernel: &KernelMatrix) -> Result<f64> {
    let pi_star = kernel.stationary().min_positive();
    let gap = spectral_gap(kernel)?;
    Ok(mlsi_prefactor(pi_star) * gap.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{enumerate_hardcore, glauber_kernel, ExactTable, StateKind};
    use crate::models::Graph;

    #[test]
    fn two_state_gap_and_bound() {
        let pi = ExactTable::uniform(1, StateKind::Spins, vec![0, 1]).unwrap();
        let k = glauber_kernel(&pi).unwrap();
        assert!((spectral_gap(&k).unwrap() - 1.0).abs() < 1e-12);
        assert!((mlsi_lower_bound(&k).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn product_gap_is_one_over_n() {
        let pi = ExactTable::uniform(4, StateKind::Spins, (0..16).collect()).unwrap();
        let k = glauber_kernel(&pi).unwrap();
        assert!((spectral_gap(&k).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn prefactor_is_continuous_at_half() {
        let a = mlsi_prefactor(0.5 - 1e-6 - 1e-9);
        let b = mlsi_prefactor(0.5 - 1e-6 + 1e-9);
        assert!((a - b).abs() < 1e-9);
        assert_eq!(mlsi_prefactor(0.5), 0.5);
    }

    #[test]
    fn star_bound_is_not_exponentially_small() {
        let k = glauber_kernel(&enumerate_hardcore(&Graph::star(6)).unwrap()).unwrap();
        let b = mlsi_lower_bound(&k).unwrap();
        assert!(b > 0.0 && b >= (-10.0f64 * 6.0).exp());
    }

    #[test]
    fn single_state_is_vacuous() {
        let pi = ExactTable::uniform(1, StateKind::Occupancy, vec![0]).unwrap();
        let k = glauber_kernel(&pi).unwrap();
        assert!(matches!(mlsi_lower_bound(&k), Err(Error::VacuousBound(_))));
    }
}
