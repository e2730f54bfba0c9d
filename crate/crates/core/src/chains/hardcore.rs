use fixedbitset::FixedBitSet;
use rand::Rng;

use super::{Configuration, SiteChain};
use crate::models::Graph;
use crate::{Error, Result};

/// Independent set with per-vertex counts of occupied neighbours.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HardcoreState {
    set: FixedBitSet,
    size: usize,
    blocked: Vec<u32>,
}

impl HardcoreState {
    /// The empty set on `n` vertices.
    pub fn empty(n: usize) -> Self {
        HardcoreState {
            set: FixedBitSet::with_capacity(n),
            size: 0,
            blocked: vec![0; n],
        }
    }

    /// State for the given vertex set, which must be independent in `graph`.
    pub fn from_vertices(graph: &Graph, vertices: &[usize]) -> Result<Self> {
        let mut state = Self::empty(graph.n());
        for &v in vertices {
            if v >= graph.n() {
                return Err(Error::InvalidParameter(format!("vertex {v} out of range")));
            }
            if state.set.contains(v) {
                continue;
            }
            if state.blocked[v] > 0 {
                return Err(Error::InvalidParameter(format!("vertex {v} has an occupied neighbour")));
            }
            state.insert(graph, v);
        }
        Ok(state)
    }

    /// State from a bitmask (bit `i` set means vertex `i` occupied).
    pub fn from_mask(graph: &Graph, mask: u64) -> Result<Self> {
        let vs: Vec<usize> = (0..graph.n().min(64)).filter(|&i| mask >> i & 1 == 1).collect();
        Self::from_vertices(graph, &vs)
    }

    pub fn contains(&self, v: usize) -> bool {
        self.set.contains(v)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn blocked_count(&self, v: usize) -> u32 {
        self.blocked[v]
    }

    pub fn set(&self) -> &FixedBitSet {
        &self.set
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.set.ones()
    }

    /// Bitmask of the occupied vertices (first 64 only).
    pub fn mask(&self) -> u64 {
        self.set.ones().filter(|&v| v < 64).fold(0, |m, v| m | 1 << v)
    }

    fn insert(&mut self, graph: &Graph, v: usize) {
        self.set.insert(v);
        self.size += 1;
        for &u in graph.neighbors(v) {
            self.blocked[u as usize] += 1;
        }
    }

    fn remove(&mut self, graph: &Graph, v: usize) {
        self.set.set(v, false);
        self.size -= 1;
        for &u in graph.neighbors(v) {
            self.blocked[u as usize] -= 1;
        }
    }

    /// Full consistency check against `graph`: independence, size and
    /// blocked counts.
    pub fn is_consistent(&self, graph: &Graph) -> bool {
        if self.blocked.len() != graph.n() || self.size != self.set.count_ones(..) {
            return false;
        }
        (0..graph.n()).all(|v| {
            let occ = graph
                .neighbors(v)
                .iter()
                .filter(|&&u| self.set.contains(u as usize))
                .count() as u32;
            occ == self.blocked[v] && !(self.set.contains(v) && occ > 0)
        })
    }
}

/// One Glauber update of the uniform hardcore model.
///
/// A uniform vertex `v` is chosen. If a neighbour of `v` is occupied, `v`
/// stays out. Otherwise `v` is occupied or vacated with probability 1/2 each.
/// Returns whether the set changed.
#[inline]
pub fn hardcore_step<R: Rng + ?Sized>(graph: &Graph, state: &mut HardcoreState, rng: &mut R) -> bool {
    let v = rng.random_range(0..graph.n());
    if state.blocked[v] > 0 {
        return false;
    }
    let occupy: bool = rng.random();
    let changed = match (occupy, state.set.contains(v)) {
        (true, false) => {
            state.insert(graph, v);
            true
        }
        (false, true) => {
            state.remove(graph, v);
            true
        }
        _ => false,
    };
    debug_assert!(!changed || state.blocked[v] == 0);
    changed
}

/// Hardcore Glauber dynamics on a fixed graph.
#[derive(Clone, Copy, Debug)]
pub struct HardcoreGlauber<'a> {
    pub graph: &'a Graph,
}

impl SiteChain for HardcoreGlauber<'_> {
    type State = HardcoreState;

    fn dim(&self) -> usize {
        self.graph.n()
    }

    #[inline]
    fn step<R: Rng + ?Sized>(&self, state: &mut HardcoreState, rng: &mut R) {
        hardcore_step(self.graph, state, rng);
    }
}

impl Configuration for HardcoreState {
    fn dim(&self) -> usize {
        self.blocked.len()
    }

    fn occupied(&self) -> usize {
        self.size
    }

    fn dot(&self, w: &[f64]) -> f64 {
        self.set.ones().map(|v| w[v]).sum()
    }

    fn value(&self, i: usize) -> f64 {
        if self.set.contains(i) {
            1.0
        } else {
            0.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn blocked_vertex_stays_out() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let mut rng = stream_rng(1, 0);
        for _ in 0..1000 {
            let mut s = HardcoreState::from_vertices(&g, &[0]).unwrap();
            hardcore_step(&g, &mut s, &mut rng);
            assert!(!s.contains(1));
        }
    }

    #[test]
    fn isolated_vertex_occupied_half_the_time() {
        let g = Graph::empty(1);
        let mut rng = stream_rng(2, 0);
        let trials = 100_000;
        let hits = (0..trials)
            .filter(|_| {
                let mut s = HardcoreState::empty(1);
                hardcore_step(&g, &mut s, &mut rng);
                s.contains(0)
            })
            .count();
        let p = hits as f64 / trials as f64;
        // 4 sigma band for Binomial(1e5, 1/2)
        assert!((p - 0.5).abs() < 4.0 * (0.25 / trials as f64).sqrt(), "{p}");
    }

    #[test]
    fn k2_frequencies_uniform() {
        let g = Graph::complete(2);
        let mut rng = stream_rng(3, 0);
        let mut s = HardcoreState::empty(2);
        let mut counts = [0usize; 4];
        let steps = 600_000;
        for _ in 0..steps {
            hardcore_step(&g, &mut s, &mut rng);
            counts[s.mask() as usize] += 1;
        }
        assert_eq!(counts[3], 0);
        let tv: f64 = counts[..3]
            .iter()
            .map(|&c| (c as f64 / steps as f64 - 1.0 / 3.0).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv <= 0.01, "tv = {tv}");
    }

    #[test]
    fn state_stays_consistent() {
        let g = crate::models::gen_bipartite_regular(40, 4, 8).unwrap();
        let mut rng = stream_rng(4, 0);
        let mut s = HardcoreState::empty(40);
        for t in 0..20_000 {
            hardcore_step(&g, &mut s, &mut rng);
            if t % 97 == 0 {
                assert!(s.is_consistent(&g));
            }
        }
        assert!(s.is_consistent(&g));
    }

    #[test]
    fn rejects_dependent_sets() {
        let g = Graph::cycle(5);
        assert!(HardcoreState::from_vertices(&g, &[0, 1]).is_err());
        let s = HardcoreState::from_vertices(&g, &[0, 2]).unwrap();
        assert_eq!(s.size(), 2);
        assert_eq!(s.blocked_count(1), 2);
        assert_eq!(s.mask(), 0b101);
    }
}
