use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::ising::{glauber_update, IsingState};
use super::SiteChain;
use crate::models::{InteractionOperator, SpikedInstance};
use crate::{Error, Result};

/// Record of one restricted Gaussian dynamics step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RgdStep {
    /// Standard Gaussian draw.
    pub g: f64,
    /// `λ⟨v, x⟩ + √λ g`; the external field is `z_scalar · v`.
    pub z_scalar: f64,
    /// Glauber updates spent sampling `x′`.
    pub inner_updates: usize,
}

/// Default inner sampler length `⌈20 n ln n⌉` (at least 1).
pub fn default_inner_updates(n: usize) -> usize {
    ((20.0 * n as f64 * (n as f64).ln()).ceil() as usize).max(1)
}

/// Restricted Gaussian dynamics for `M = W + λvvᵀ`.
///
/// States carry caches for `W` only; the Gaussian field enters each inner
/// update directly.
#[derive(Clone, Copy, Debug)]
pub struct Rgd<'a> {
    pub w: &'a InteractionOperator,
    pub v: &'a [f64],
    pub lambda: f64,
    pub inner_updates: usize,
}

impl<'a> Rgd<'a> {
    pub fn new(w: &'a InteractionOperator, v: &'a [f64], lambda: f64, inner_updates: usize) -> Result<Self> {
        if inner_updates == 0 {
            return Err(Error::InvalidParameter("inner_updates must be at least 1".into()));
        }
        if v.len() != w.n() {
            return Err(Error::Mismatch("spike and W dimensions differ".into()));
        }
        if !(lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!("invalid lambda {lambda}")));
        }
        Ok(Rgd {
            w,
            v,
            lambda,
            inner_updates,
        })
    }

    pub fn from_instance(inst: &'a SpikedInstance, inner_updates: usize) -> Result<Self> {
        Self::new(&inst.w, &inst.v, inst.lambda, inner_updates)
    }
}

/// One RGD step: draw `g`, set `z = (λ⟨v,x⟩ + √λ g) v`, then run
/// `inner_updates` Glauber updates of `μ_{W,z}` started at `x`.
pub fn rgd_step<R: Rng + ?Sized>(rgd: &Rgd<'_>, state: &mut IsingState, rng: &mut R) -> RgdStep {
    let g: f64 = rng.sample(StandardNormal);
    let corr: f64 = rgd.v.iter().zip(state.spins()).map(|(a, b)| a * b).sum();
    let z_scalar = rgd.lambda * corr + rgd.lambda.sqrt() * g;
    let v = rgd.v;
    for _ in 0..rgd.inner_updates {
        glauber_update(rgd.w, |i| z_scalar * v[i], state, rng);
    }
    RgdStep {
        g,
        z_scalar,
        inner_updates: rgd.inner_updates,
    }
}

impl SiteChain for Rgd<'_> {
    type State = IsingState;

    fn dim(&self) -> usize {
        self.w.n()
    }

    fn step<R: Rng + ?Sized>(&self, state: &mut IsingState, rng: &mut R) {
        rgd_step(self, state, rng);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::gen_spiked_wigner;
    use crate::rng::stream_rng;

    #[test]
    fn zero_lambda_gives_zero_field() {
        let inst = gen_spiked_wigner(8, 1.0, 0.2, 0).unwrap();
        let rgd = Rgd::new(&inst.w, &inst.v, 0.0, 10).unwrap();
        let mut rng = stream_rng(1, 0);
        let mut s = IsingState::random(&inst.w, &mut rng);
        for _ in 0..20 {
            assert_eq!(rgd_step(&rgd, &mut s, &mut rng).z_scalar, 0.0);
        }
    }

    #[test]
    fn z_scalar_matches_formula() {
        let inst = gen_spiked_wigner(8, 4.0, 0.2, 0).unwrap();
        let rgd = Rgd::from_instance(&inst, 5).unwrap();
        let mut rng = stream_rng(2, 0);
        let mut s = IsingState::random(&inst.w, &mut rng);
        let corr: f64 = inst.v.iter().zip(s.spins()).map(|(a, b)| a * b).sum();
        let step = rgd_step(&rgd, &mut s, &mut rng);
        assert!((step.z_scalar - (4.0 * corr + 2.0 * step.g)).abs() < 1e-12);
        assert_eq!(step.inner_updates, 5);
    }

    #[test]
    fn inner_length_default_and_validation() {
        assert_eq!(default_inner_updates(1), 1);
        assert_eq!(default_inner_updates(10), (200.0 * 10f64.ln()).ceil() as usize);
        let inst = gen_spiked_wigner(4, 1.0, 0.2, 0).unwrap();
        assert!(Rgd::from_instance(&inst, 0).is_err());
    }
}
