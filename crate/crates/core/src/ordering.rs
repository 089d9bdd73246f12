//! Decision orderings and the acyclic orientation they induce on a graph.

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

/// Hard cap on exhaustive ordering enumeration (10! = 3 628 800).
pub const ENUMERATION_CAP: usize = 10;

/// A permutation of the vertices. `order[i]` is the vertex acting at
/// (0-based) index `i`, `position[v]` is the index at which `v` acts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vertex>", into = "Vec<Vertex>")]
pub struct Ordering {
    order: Vec<Vertex>,
    position: Vec<usize>,
}

impl Ordering {
    pub fn identity(n: usize) -> Self {
        Ordering {
            order: (0..n).collect(),
            position: (0..n).collect(),
        }
    }

    /// Builds an ordering from the index → vertex sequence.
    pub fn from_sequence(order: Vec<Vertex>) -> Result<Self> {
        let n = order.len();
        let mut position = vec![usize::MAX; n];
        for (i, &v) in order.iter().enumerate() {
            if v >= n || position[v] != usize::MAX {
                return Err(Error::InvalidParams(format!("{order:?} is not a permutation of 0..{n}")));
            }
            position[v] = i;
        }
        Ok(Ordering { order, position })
    }

    /// Uniform over all n! permutations (Fisher–Yates).
    pub fn sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut order: Vec<Vertex> = (0..n).collect();
        order.shuffle(rng);
        Self::from_sequence(order).expect("shuffle is a permutation")
    }

    /// Uniform among orderings placing `v` at 0-based index `index`.
    pub fn sample_pinned<R: Rng + ?Sized>(n: usize, v: Vertex, index: usize, rng: &mut R) -> Self {
        let mut rest: Vec<Vertex> = (0..n).filter(|&u| u != v).collect();
        rest.shuffle(rng);
        rest.insert(index, v);
        Self::from_sequence(rest).expect("pinned shuffle is a permutation")
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.order.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// 0-based index at which `v` acts.
    #[inline]
    pub fn position(&self, v: Vertex) -> usize {
        self.position[v]
    }

    #[inline]
    pub fn at(&self, index: usize) -> Vertex {
        self.order[index]
    }

    #[inline]
    pub fn sequence(&self) -> &[Vertex] {
        &self.order
    }

    #[inline]
    pub fn precedes(&self, u: Vertex, v: Vertex) -> bool {
        self.position[u] < self.position[v]
    }
}

impl TryFrom<Vec<Vertex>> for Ordering {
    type Error = Error;
    fn try_from(order: Vec<Vertex>) -> Result<Self> {
        Ordering::from_sequence(order)
    }
}

impl From<Ordering> for Vec<Vertex> {
    fn from(o: Ordering) -> Self {
        o.order
    }
}

/// All n! orderings, each exactly once, in lexicographic order.
pub fn enumerate_orderings(n: usize) -> Result<impl Iterator<Item = Ordering>> {
    if n > ENUMERATION_CAP {
        return Err(Error::EnumerationCap { n, cap: ENUMERATION_CAP });
    }
    Ok((0..n)
        .permutations(n)
        .map(|p| Ordering::from_sequence(p).expect("permutation")))
}

/// A graph viewed through an ordering: every edge points from the earlier
/// agent to the later one.
#[derive(Clone, Copy, Debug)]
pub struct OrientedView<'a> {
    pub graph: &'a Graph,
    pub ordering: &'a Ordering,
}

impl<'a> OrientedView<'a> {
    pub fn new(graph: &'a Graph, ordering: &'a Ordering) -> Self {
        assert_eq!(graph.n(), ordering.len(), "ordering size must match graph");
        OrientedView { graph, ordering }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Neighbors acting before `v`, ascending by id.
    pub fn prior_neighbors(&self, v: Vertex) -> Vec<Vertex> {
        let pv = self.ordering.position(v);
        self.graph
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| self.ordering.position(u) < pv)
            .collect()
    }

    pub fn prior_degree(&self, v: Vertex) -> usize {
        let pv = self.ordering.position(v);
        self.graph
            .neighbors(v)
            .iter()
            .filter(|&&u| self.ordering.position(u) < pv)
            .count()
    }

    /// Every vertex with a directed path to `v` (excluding `v`), ascending.
    pub fn ancestor_cone(&self, v: Vertex) -> Vec<Vertex> {
        let mut seen = vec![false; self.n()];
        seen[v] = true;
        let mut stack = vec![v];
        let mut cone = Vec::new();
        while let Some(x) = stack.pop() {
            let px = self.ordering.position(x);
            for &u in self.graph.neighbors(x) {
                if !seen[u] && self.ordering.position(u) < px {
                    seen[u] = true;
                    cone.push(u);
                    stack.push(u);
                }
            }
        }
        cone.sort_unstable();
        cone
    }

    /// Marks every vertex reachable from `sources` along oriented edges.
    /// Sources reach themselves.
    pub fn reachable_mask(&self, sources: &[Vertex]) -> Vec<bool> {
        let mut reached = vec![false; self.n()];
        for &s in sources {
            reached[s] = true;
        }
        // One sweep in decision order settles every vertex: all of a vertex's
        // in-neighbors act before it.
        for &v in self.ordering.sequence() {
            if reached[v] {
                continue;
            }
            let pv = self.ordering.position(v);
            reached[v] = self
                .graph
                .neighbors(v)
                .iter()
                .any(|&u| reached[u] && self.ordering.position(u) < pv);
        }
        reached
    }

    pub fn reachable_set(&self, sources: &[Vertex]) -> Vec<Vertex> {
        self.reachable_mask(sources)
            .iter()
            .enumerate()
            .filter_map(|(v, &r)| r.then_some(v))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn path(n: usize) -> Graph {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &e).unwrap()
    }

    fn complete(n: usize) -> Graph {
        let e: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph::from_edges(n, &e).unwrap()
    }

    fn ord(seq: &[usize]) -> Ordering {
        Ordering::from_sequence(seq.to_vec()).unwrap()
    }

    #[test]
    fn single_vertex_sample_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(Ordering::sample(1, &mut rng), Ordering::identity(1));
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let a = Ordering::sample(20, &mut ChaCha8Rng::seed_from_u64(9));
        let b = Ordering::sample(20, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn three_vertex_sampling_passes_chi_square() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let perms: Vec<Ordering> = enumerate_orderings(3).unwrap().collect();
        let mut counts = [0usize; 6];
        for _ in 0..60_000 {
            let o = Ordering::sample(3, &mut rng);
            counts[perms.iter().position(|p| *p == o).unwrap()] += 1;
        }
        let expected = 10_000.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // 99.9th percentile of chi-square with 5 degrees of freedom.
        assert!(chi2 < 20.515, "chi2 = {chi2}, counts = {counts:?}");
        // Each cell individually within 3 binomial standard deviations.
        let sd = (60_000.0f64 * (1.0 / 6.0) * (5.0 / 6.0)).sqrt();
        for c in counts {
            assert!((c as f64 - expected).abs() <= 3.0 * sd, "{counts:?}");
        }
    }

    #[test]
    fn prior_neighbors_examples() {
        let g = path(3);
        let id = Ordering::identity(3);
        let view = OrientedView::new(&g, &id);
        assert_eq!(view.prior_neighbors(1), vec![0]);
        assert!(view.prior_neighbors(0).is_empty());

        let k3 = complete(3);
        let o = ord(&[2, 0, 1]);
        assert_eq!(OrientedView::new(&k3, &o).prior_neighbors(1), vec![0, 2]);
    }

    #[test]
    fn ancestor_cone_examples() {
        let g = path(4);
        let id = Ordering::identity(4);
        assert_eq!(OrientedView::new(&g, &id).ancestor_cone(3), vec![0, 1, 2]);

        let star = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let o = ord(&[0, 2, 1, 3]);
        assert_eq!(OrientedView::new(&star, &o).ancestor_cone(3), vec![0]);

        let k4 = complete(4);
        assert_eq!(OrientedView::new(&k4, &id).ancestor_cone(2), vec![0, 1]);
    }

    #[test]
    fn reachable_set_examples() {
        let g = path(3);
        let id = Ordering::identity(3);
        let view = OrientedView::new(&g, &id);
        assert_eq!(view.reachable_set(&[0]), vec![0, 1, 2]);
        assert_eq!(view.reachable_set(&[2]), vec![2]);

        let k3 = complete(3);
        let o = ord(&[1, 0, 2]);
        assert_eq!(OrientedView::new(&k3, &o).reachable_set(&[1]), vec![0, 1, 2]);
    }

    #[test]
    fn enumeration_counts_and_cap() {
        assert_eq!(enumerate_orderings(3).unwrap().count(), 6);
        assert_eq!(enumerate_orderings(1).unwrap().count(), 1);
        assert!(matches!(enumerate_orderings(11), Err(Error::EnumerationCap { n: 11, .. })));
    }

    #[test]
    fn ordering_json_is_index_to_vertex_array() {
        let o = ord(&[2, 0, 1]);
        assert_eq!(serde_json::to_string(&o).unwrap(), "[2,0,1]");
        let back: Ordering = serde_json::from_str("[2,0,1]").unwrap();
        assert_eq!(back, o);
        assert!(serde_json::from_str::<Ordering>("[0,0,1]").is_err());
    }

    #[test]
    fn pinned_sampling_places_vertex() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for i in 0..5 {
            let o = Ordering::sample_pinned(5, 2, i, &mut rng);
            assert_eq!(o.position(2), i);
        }
    }
}
