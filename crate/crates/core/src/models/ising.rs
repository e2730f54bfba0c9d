use serde::{Deserialize, Serialize};

use super::operator::{dot, InteractionOperator};
use crate::{Error, Result};

/// Ising measure `μ_{J,h}(x) ∝ exp(½ xᵀJx + ⟨h, x⟩)` on `{±1}ⁿ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsingModel {
    pub j: InteractionOperator,
    pub h: Vec<f64>,
}

impl IsingModel {
    pub fn new(j: InteractionOperator, h: Vec<f64>) -> Result<Self> {
        if j.n() != h.len() {
            return Err(Error::Mismatch(format!(
                "interaction has dimension {}, field has length {}",
                j.n(),
                h.len()
            )));
        }
        if h.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite external field".into()));
        }
        Ok(IsingModel { j, h })
    }

    /// Zero-field model.
    pub fn without_field(j: InteractionOperator) -> Self {
        let n = j.n();
        IsingModel { j, h: vec![0.0; n] }
    }

    pub fn n(&self) -> usize {
        self.h.len()
    }

    /// Unnormalised log-density `½ xᵀJx + ⟨h, x⟩`.
    pub fn log_weight(&self, x: &[f64]) -> f64 {
        0.5 * self.j.quadratic_form(x) + dot(&self.h, x)
    }

    /// Same interaction, external field replaced by `h`.
    pub fn with_field(&self, h: Vec<f64>) -> Result<Self> {
        IsingModel::new(self.j.clone(), h)
    }
}

/// Mean-field model with `J = (β/n) 11ᵀ` and no external field.
pub fn curie_weiss(n: usize, beta: f64) -> Result<IsingModel> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let j = InteractionOperator::zeros(n).with_rank_one(beta / n as f64, vec![1.0; n])?;
    Ok(IsingModel::without_field(j))
}
