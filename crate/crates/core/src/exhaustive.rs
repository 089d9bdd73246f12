//! Every labeled graph on a handful of vertices, with exact per-ordering
//! rates cached so property checks reduce to table lookups.

use rayon::prelude::*;

use crate::engine::{exact_rates_all, EngineConfig};
use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::ordering::{enumerate_orderings, Ordering, OrientedView};

/// Largest vertex count for which every graph and ordering is enumerated.
pub const EXHAUSTIVE_CAP: usize = 5;

/// Vertex pairs in mask-bit order: `(0,1), (0,2), ..., (n-2,n-1)`.
pub fn pairs(n: usize) -> Vec<(Vertex, Vertex)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

pub fn pair_bit(n: usize, u: Vertex, v: Vertex) -> u32 {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    // Pairs starting below `a` come first.
    let before = a * n - a * (a + 1) / 2;
    (before + (b - a - 1)) as u32
}

pub fn graph_from_mask(n: usize, mask: u32) -> Graph {
    let edges: Vec<_> = pairs(n)
        .into_iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, e)| e)
        .collect();
    Graph::from_edges(n, &edges).expect("pairs are valid edges")
}

pub fn mask_of(graph: &Graph) -> u32 {
    graph.edges().fold(0, |m, (u, v)| m | 1 << pair_bit(graph.n(), u, v))
}

pub fn mask_count(n: usize) -> u32 {
    1 << (n * n.saturating_sub(1) / 2)
}

/// Masks of the connected graphs on `n` vertices.
pub fn connected_masks(n: usize) -> Vec<u32> {
    (0..mask_count(n)).filter(|&m| graph_from_mask(n, m).is_connected()).collect()
}

/// Exact `ℓ_σ(v)` for every graph on `n` vertices, every ordering and vertex.
#[derive(Clone, Debug)]
pub struct RateCache {
    pub n: usize,
    pub q: f64,
    pub orderings: Vec<Ordering>,
    // [mask][ordering * n + v]
    rates: Vec<Vec<f64>>,
}

impl RateCache {
    pub fn build(n: usize, q: f64) -> Result<Self> {
        if n == 0 || n > EXHAUSTIVE_CAP {
            return Err(Error::InvalidParams(format!("exhaustive corpus needs 1 <= n <= {EXHAUSTIVE_CAP}, got {n}")));
        }
        let cfg = EngineConfig::exact(q);
        cfg.validate()?;
        let orderings: Vec<Ordering> = enumerate_orderings(n)?.collect();
        let rates = (0..mask_count(n))
            .into_par_iter()
            .map(|mask| {
                let g = graph_from_mask(n, mask);
                let mut row = Vec::with_capacity(orderings.len() * n);
                for o in &orderings {
                    row.extend(exact_rates_all(&OrientedView::new(&g, o), &cfg)?);
                }
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RateCache { n, q, orderings, rates })
    }

    /// `ℓ_σ(v)` with `σ = self.orderings[ordering]`.
    pub fn fixed(&self, mask: u32, ordering: usize, v: Vertex) -> f64 {
        self.rates[mask as usize][ordering * self.n + v]
    }

    /// Random-order `ℓ(v)`.
    pub fn random(&self, mask: u32, v: Vertex) -> f64 {
        let k = self.orderings.len();
        (0..k).map(|o| self.fixed(mask, o, v)).sum::<f64>() / k as f64
    }

    /// `ℓ(v | σ(v) = index)`, 1-based.
    pub fn positional(&self, mask: u32, v: Vertex, index: usize) -> f64 {
        let (sum, count) = self
            .orderings
            .iter()
            .enumerate()
            .filter(|(_, o)| o.position(v) == index - 1)
            .fold((0.0, 0usize), |(s, c), (i, _)| (s + self.fixed(mask, i, v), c + 1));
        sum / count as f64
    }
}

/// Rate caches for every `n` from 1 to `max_n`.
#[derive(Clone, Debug)]
pub struct Corpus {
    pub q: f64,
    caches: Vec<RateCache>,
}

impl Corpus {
    pub fn build(max_n: usize, q: f64) -> Result<Self> {
        let caches = (1..=max_n).map(|n| RateCache::build(n, q)).collect::<Result<Vec<_>>>()?;
        Ok(Corpus { q, caches })
    }

    pub fn max_n(&self) -> usize {
        self.caches.len()
    }

    pub fn cache(&self, n: usize) -> &RateCache {
        &self.caches[n - 1]
    }

    /// Random-order rate of `v` in an arbitrary graph of the corpus size.
    pub fn random_rate(&self, graph: &Graph, v: Vertex) -> f64 {
        self.cache(graph.n()).random(mask_of(graph), v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn masks_round_trip() {
        for n in 1..=5 {
            for mask in 0..mask_count(n) {
                assert_eq!(mask_of(&graph_from_mask(n, mask)), mask);
            }
        }
        assert_eq!(pair_bit(4, 2, 3), 5);
        assert_eq!(pair_bit(4, 1, 0), 0);
    }

    #[test]
    fn connected_counts() {
        // Connected labeled graphs: 1, 1, 4, 38, 728.
        let counts: Vec<usize> = (1..=5).map(|n| connected_masks(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 4, 38, 728]);
    }

    #[test]
    fn cache_matches_direct_computation() {
        let c = RateCache::build(3, 0.7).unwrap();
        let full = mask_count(3) - 1;
        assert!((c.random(full, 0) - crate::rates::rate_random_exact(&graph_from_mask(3, full), 0, &EngineConfig::exact(0.7)).unwrap()).abs() < 1e-12);
        assert!((c.positional(full, 1, 1) - 0.7).abs() < 1e-12);
        assert!((c.random(0, 2) - 0.7).abs() < 1e-12);
    }
}
