//! Single-site Markov chains and the seeded chain runner.

mod hardcore;
mod ising;
mod rgd;
mod runner;

use rand::Rng;

pub use hardcore::{hardcore_step, HardcoreGlauber, HardcoreState};
pub use ising::{glauber_step_ising, glauber_update, logistic_complement, IsingGlauber, IsingState, REFRESH_INTERVAL};
pub use rgd::{default_inner_updates, rgd_step, Rgd, RgdStep};
pub use runner::{run_chain, RunConfig, RunLength, Trajectory};

/// Read access to a configuration for observables. Occupancy states expose
/// `{0, 1}` coordinates, spin states `{±1}`.
pub trait Configuration {
    fn dim(&self) -> usize;
    /// Number of occupied vertices or `+1` spins.
    fn occupied(&self) -> usize;
    /// `⟨w, x⟩`.
    fn dot(&self, w: &[f64]) -> f64;
    fn value(&self, i: usize) -> f64;
}

/// A Markov chain driven one update at a time.
pub trait SiteChain: Sync {
    type State: Configuration + Clone + Send;

    fn dim(&self) -> usize;

    fn step<R: Rng + ?Sized>(&self, state: &mut Self::State, rng: &mut R);
}
