use serde::{Deserialize, Serialize};

use crate::chains::Configuration;
use crate::models::Graph;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    Raw,
    PerSqrtN,
    PerN,
}

impl Normalization {
    fn divisor(self, n: usize) -> f64 {
        match self {
            Normalization::Raw => 1.0,
            Normalization::PerSqrtN => (n as f64).sqrt(),
            Normalization::PerN => n as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ObservableKind {
    /// Occupied vertices (or `+1` spins).
    SetSize,
    /// `|⟨x, v⟩|`.
    AbsCorrelation(Vec<f64>),
    /// `|⟨x, σ⟩|`.
    Overlap(Vec<f64>),
    /// `(1/n) Σ_v φ_v(x)`, stored as its linear weights `(d + deg(u))/n`.
    ScoreAverage(Vec<f64>),
    /// `⟨w, x⟩`.
    CustomLinear(Vec<f64>),
}

/// Named scalar function of a configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableSpec {
    name: String,
    kind: ObservableKind,
    normalization: Normalization,
    n: usize,
}

impl ObservableSpec {
    pub fn new(name: impl Into<String>, kind: ObservableKind, normalization: Normalization, n: usize) -> Result<Self> {
        let len = match &kind {
            ObservableKind::SetSize => n,
            ObservableKind::AbsCorrelation(w)
            | ObservableKind::Overlap(w)
            | ObservableKind::ScoreAverage(w)
            | ObservableKind::CustomLinear(w) => w.len(),
        };
        if len != n {
            return Err(Error::Mismatch(format!(
                "observable vector has length {len}, expected {n}"
            )));
        }
        Ok(ObservableSpec {
            name: name.into(),
            kind,
            normalization,
            n,
        })
    }

    /// `set_size`, raw.
    pub fn set_size(n: usize) -> Self {
        Self::new("set_size", ObservableKind::SetSize, Normalization::Raw, n).unwrap()
    }

    /// `abs_corr`: `|⟨x, v⟩|/√n`.
    pub fn abs_correlation(v: Vec<f64>) -> Self {
        let n = v.len();
        Self::new(
            "abs_corr",
            ObservableKind::AbsCorrelation(v),
            Normalization::PerSqrtN,
            n,
        )
        .unwrap()
    }

    /// `overlap`: `|⟨x, σ⟩|/n`.
    pub fn overlap(sigma: Vec<f64>) -> Self {
        let n = sigma.len();
        Self::new("overlap", ObservableKind::Overlap(sigma), Normalization::PerN, n).unwrap()
    }

    /// `score_average`: `(1/n) Σ_v φ_v(x)` for the given graph.
    pub fn score_average(graph: &Graph) -> Self {
        let n = graph.n();
        let d = graph.max_degree() as f64;
        let w = (0..n).map(|u| (d + graph.degree(u) as f64) / n as f64).collect();
        Self::new("score_average", ObservableKind::ScoreAverage(w), Normalization::Raw, n).unwrap()
    }

    pub fn custom_linear(name: impl Into<String>, w: Vec<f64>, normalization: Normalization) -> Self {
        let n = w.len();
        Self::new(name, ObservableKind::CustomLinear(w), normalization, n).unwrap()
    }

    /// Same observable under a different name.
    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &ObservableKind {
        &self.kind
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn eval<C: Configuration + ?Sized>(&self, x: &C) -> f64 {
        let raw = match &self.kind {
            ObservableKind::SetSize => x.occupied() as f64,
            ObservableKind::AbsCorrelation(w) | ObservableKind::Overlap(w) => x.dot(w).abs(),
            ObservableKind::ScoreAverage(w) | ObservableKind::CustomLinear(w) => x.dot(w),
        };
        raw / self.normalization.divisor(self.n)
    }
}

/// Observables looked up by name.
#[derive(Clone, Debug, Default)]
pub struct ObservableRegistry {
    specs: Vec<ObservableSpec>,
}

impl ObservableRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `spec`, replacing any observable of the same name.
    pub fn register(&mut self, spec: ObservableSpec) {
        match self.specs.iter_mut().find(|s| s.name == spec.name) {
            Some(slot) => *slot = spec,
            None => self.specs.push(spec),
        }
    }

    pub fn get(&self, name: &str) -> Result<&ObservableSpec> {
        self.specs
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::UnknownObservable(name.to_string()))
    }

    pub fn resolve(&self, names: &[&str]) -> Result<Vec<&ObservableSpec>> {
        names.iter().map(|n| self.get(n)).collect()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.specs.iter().map(|s| s.name.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::{HardcoreState, IsingState};
    use crate::models::InteractionOperator;

    #[test]
    fn abs_correlation_flip_invariant() {
        let j = InteractionOperator::zeros(4);
        let v = vec![0.5, -0.5, 0.5, 0.5];
        let obs = ObservableSpec::abs_correlation(v);
        let a = IsingState::from_mask(&j, 0b0101);
        let b = IsingState::from_mask(&j, 0b1010);
        assert_eq!(obs.eval(&a), obs.eval(&b));
        // x = (+,-,+,-): ⟨x,v⟩ = 1, divided by √4
        assert!((obs.eval(&a) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn score_average_matches_definition() {
        let g = Graph::star(3);
        let s = HardcoreState::from_vertices(&g, &[1, 2]).unwrap();
        let obs = ObservableSpec::score_average(&g);
        // φ_0 = 2, φ_1 = φ_2 = 3, φ_3 = 0
        assert!((obs.eval(&s) - 8.0 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn registry_lookup() {
        let mut r = ObservableRegistry::new();
        r.register(ObservableSpec::set_size(3));
        assert!(r.get("set_size").is_ok());
        assert!(matches!(r.get("nope"), Err(Error::UnknownObservable(_))));
        assert!(ObservableSpec::new("w", ObservableKind::CustomLinear(vec![1.0]), Normalization::Raw, 2).is_err());
    }
}
