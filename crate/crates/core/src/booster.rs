//! Boosting: attach high-quality celebrities to a seed set, measure how many
//! non-learners the seed set reaches, and choose the seed set greedily.

use std::collections::BTreeMap;

use itertools::Itertools;
use log::warn;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::engine::EngineConfig;
use crate::error::{Error, Result};
use crate::families::role;
use crate::graph::{Graph, GraphJson, Vertex};
use crate::ordering::{enumerate_orderings, Ordering, OrientedView};
use crate::rates::{non_learners, OracleConfig};
use crate::seed::{derive_seed, run_trials};

/// Largest graph `coverage_exact` enumerates orderings for.
pub const COVERAGE_ENUM_CAP: usize = 8;
/// Largest graph the reverse-order dynamic program handles.
pub const COVERAGE_TABLE_CAP: usize = 14;
/// Largest graph `brute_force_min_cover` searches.
pub const BRUTE_FORCE_CAP: usize = 12;
pub const DEFAULT_MAX_SAMPLES: usize = 1_000_000;
const COVER_EPS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AddedVertex {
    pub id: Vertex,
    pub role: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GainRecord {
    pub iteration: usize,
    pub vertex: Vertex,
    /// Estimated coverage after adding `vertex`.
    pub coverage: f64,
    pub gain: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoostPlan {
    pub seed_set: Vec<Vertex>,
    pub k: usize,
    pub added_vertices: Vec<AddedVertex>,
    pub added_edges: Vec<[Vertex; 2]>,
    #[serde(with = "graph_as_json")]
    pub resulting_graph: Graph,
    #[serde(default)]
    pub target_set: Vec<Vertex>,
    #[serde(default)]
    pub tolerance: usize,
    #[serde(default)]
    pub gains: Vec<GainRecord>,
}

mod graph_as_json {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(g: &Graph, s: S) -> std::result::Result<S::Ok, S::Error> {
        g.to_json().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Graph, D::Error> {
        let j = GraphJson::deserialize(d)?;
        Graph::from_json(&j).map_err(serde::de::Error::custom)
    }
}

fn check_set(graph: &Graph, set: &[Vertex], what: &str) -> Result<()> {
    let n = graph.n();
    if let Some(&v) = set.iter().find(|&&v| v >= n) {
        return Err(Error::InvalidParams(format!("{what} contains vertex {v}, graph has {n}")));
    }
    if set.iter().duplicates().next().is_some() {
        return Err(Error::InvalidParams(format!("{what} has repeated vertices")));
    }
    Ok(())
}

/// Adds celebrities `w_i = n + i` (`i < k`), each with guinea pigs
/// `z_ij = n + k + i*k + j`, and joins every celebrity to every seed.
pub fn boost_agents(graph: &Graph, seeds: &[Vertex], k: usize) -> Result<BoostPlan> {
    check_set(graph, seeds, "seed set")?;
    if k == 0 {
        return Err(Error::InvalidParams("k must be at least 1".into()));
    }
    let n = graph.n();
    let mut edges: Vec<(Vertex, Vertex)> = graph.edges().collect();
    let mut added_vertices = Vec::with_capacity(k * k + k);
    let mut added_edges = Vec::with_capacity(k * k + k * seeds.len());
    for i in 0..k {
        added_vertices.push(AddedVertex { id: n + i, role: role::CELEBRITY.into() });
    }
    for i in 0..k {
        let w = n + i;
        for j in 0..k {
            let z = n + k + i * k + j;
            added_vertices.push(AddedVertex { id: z, role: role::GUINEA.into() });
            added_edges.push([z, w]);
        }
        for &v in seeds {
            added_edges.push([w, v]);
        }
    }
    edges.extend(added_edges.iter().map(|e| (e[0], e[1])));
    let mut resulting_graph = Graph::from_edges(n + k * k + k, &edges)?;
    for (v, r) in graph.labels() {
        resulting_graph.set_label(v, r);
    }
    for a in &added_vertices {
        resulting_graph.set_label(a.id, a.role.clone());
    }
    let mut seed_set = seeds.to_vec();
    seed_set.sort_unstable();
    Ok(BoostPlan {
        seed_set,
        k,
        added_vertices,
        added_edges,
        resulting_graph,
        target_set: Vec::new(),
        tolerance: 0,
        gains: Vec::new(),
    })
}

/// `C_σ(S)`: members of `target` reachable from `seeds` under one ordering.
pub fn covered_count(view: &OrientedView<'_>, target: &[Vertex], seeds: &[Vertex]) -> usize {
    if seeds.is_empty() {
        return 0;
    }
    let reach = view.reachable_mask(seeds);
    target.iter().filter(|&&u| reach[u]).count()
}

/// `C(S)` averaged over all `n!` orderings.
pub fn coverage_exact(graph: &Graph, target: &[Vertex], seeds: &[Vertex]) -> Result<f64> {
    check_set(graph, target, "target set")?;
    check_set(graph, seeds, "seed set")?;
    let n = graph.n();
    if n > COVERAGE_ENUM_CAP {
        return Err(Error::EnumerationCap { n, cap: COVERAGE_ENUM_CAP });
    }
    let mut total = 0usize;
    let mut count = 0usize;
    for o in enumerate_orderings(n)? {
        total += covered_count(&OrientedView::new(graph, &o), target, seeds);
        count += 1;
    }
    Ok(total as f64 / count as f64)
}

/// Exact coverage for every seed set at once.
///
/// For each vertex `u`, the set `K_u` of vertices with a directed path to
/// `u` (plus `u`) is distributed by a dynamic program that builds the
/// ordering from the back: the earliest unplaced vertex `y` joins `K_u` iff
/// it is `u` or has a neighbor already in `K_u`. A subset-sum transform then
/// gives `Pr(K_u ⊆ X)` for every `X`, and `u` is missed by `S` exactly when
/// `K_u ⊆ V \ S`.
#[derive(Clone, Debug)]
pub struct CoverageTable {
    n: usize,
    /// `miss[u][X] = Pr(K_u ⊆ X)`.
    miss: Vec<Vec<f64>>,
}

impl CoverageTable {
    pub fn new(graph: &Graph) -> Result<Self> {
        let n = graph.n();
        if n > COVERAGE_TABLE_CAP {
            return Err(Error::EnumerationCap { n, cap: COVERAGE_TABLE_CAP });
        }
        let adj: Vec<u32> = (0..n)
            .map(|v| graph.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u))
            .collect();
        let miss = (0..n).map(|u| Self::cone_miss(n, &adj, u)).collect();
        Ok(CoverageTable { n, miss })
    }

    fn cone_miss(n: usize, adj: &[u32], u: usize) -> Vec<f64> {
        let full = (1u32 << n) - 1;
        let mut layer: BTreeMap<(u32, u32), f64> = BTreeMap::new();
        layer.insert((0, 0), 1.0);
        for placed in 0..n {
            let p = 1.0 / (n - placed) as f64;
            let mut next: BTreeMap<(u32, u32), f64> = BTreeMap::new();
            for (&(x, k), &w) in &layer {
                let mut rest = full & !x;
                while rest != 0 {
                    let y = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    let joins = y == u || adj[y] & k != 0;
                    let key = (x | 1 << y, if joins { k | 1 << y } else { k });
                    *next.entry(key).or_insert(0.0) += w * p;
                }
            }
            layer = next;
        }
        let mut f = vec![0.0; 1 << n];
        for ((_, k), w) in layer {
            f[k as usize] += w;
        }
        for b in 0..n {
            for x in 0..1usize << n {
                if x & (1 << b) != 0 {
                    f[x] += f[x ^ (1 << b)];
                }
            }
        }
        f
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Probability that `u` is reachable from `seeds`.
    pub fn reach_probability(&self, u: Vertex, seeds: &[Vertex]) -> f64 {
        let s = seeds.iter().fold(0usize, |m, &v| m | 1 << v);
        1.0 - self.miss[u][((1usize << self.n) - 1) & !s]
    }

    pub fn coverage(&self, target: &[Vertex], seeds: &[Vertex]) -> f64 {
        let s = seeds.iter().fold(0usize, |m, &v| m | 1 << v);
        let free = ((1usize << self.n) - 1) & !s;
        target.iter().map(|&u| 1.0 - self.miss[u][free]).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageParams {
    /// Absolute tolerance `ε_c`; `None` means `0.05 n`.
    pub abs_tol: Option<f64>,
    pub fail_prob: f64,
    pub max_samples: usize,
}

impl Default for CoverageParams {
    fn default() -> Self {
        CoverageParams {
            abs_tol: None,
            fail_prob: 0.01,
            max_samples: DEFAULT_MAX_SAMPLES,
        }
    }
}

impl CoverageParams {
    pub fn tolerance(&self, n: usize) -> f64 {
        self.abs_tol.unwrap_or(0.05 * n as f64)
    }

    /// `⌈n² ln(2/δ) / (2ε²)⌉`, capped at `max_samples` (with a warning).
    pub fn sample_count(&self, n: usize) -> Result<usize> {
        let eps = self.tolerance(n);
        if !(eps > 0.0) || !(self.fail_prob > 0.0 && self.fail_prob < 1.0) || self.max_samples == 0 {
            return Err(Error::InvalidConfig(format!(
                "coverage tolerance {eps} and failure probability {} must be positive",
                self.fail_prob
            )));
        }
        let nf = n.max(1) as f64;
        let raw = (nf * nf * (2.0 / self.fail_prob).ln() / (2.0 * eps * eps)).ceil();
        if raw > self.max_samples as f64 {
            warn!("coverage sample count {raw} capped at {}", self.max_samples);
            return Ok(self.max_samples);
        }
        Ok((raw as usize).max(1))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageEstimate {
    pub value: f64,
    /// Hoeffding half-width at the requested failure probability.
    pub half_width: f64,
    pub samples: usize,
    pub target_set: Vec<Vertex>,
}

fn hoeffding_half_width(range: f64, samples: usize, fail_prob: f64) -> f64 {
    range * ((2.0 / fail_prob).ln() / (2.0 * samples as f64)).sqrt()
}

/// `C̃(S)`: mean coverage over sampled orderings.
pub fn coverage_mc<R: RngCore + ?Sized>(
    graph: &Graph,
    target: &[Vertex],
    seeds: &[Vertex],
    params: &CoverageParams,
    rng: &mut R,
) -> Result<CoverageEstimate> {
    check_set(graph, target, "target set")?;
    check_set(graph, seeds, "seed set")?;
    let n = graph.n();
    let samples = params.sample_count(n)?;
    let master = rng.next_u64();
    let value = if seeds.is_empty() {
        0.0
    } else {
        let counts = run_trials(master, "coverage", samples, |_, rng| {
            let o = Ordering::sample(n, rng);
            covered_count(&OrientedView::new(graph, &o), target, seeds)
        });
        counts.iter().sum::<usize>() as f64 / samples as f64
    };
    Ok(CoverageEstimate {
        value,
        half_width: hoeffding_half_width(target.len() as f64, samples, params.fail_prob),
        samples,
        target_set: target.to_vec(),
    })
}

/// Runs the greedy loop on a fixed target set: while the estimated
/// coverage of `S` is below `|V'| - T`, draw fresh orderings and add the
/// candidate in `V' \ S` with the largest estimated coverage (lowest id on
/// ties).
pub fn greedy_cover<R: RngCore + ?Sized>(
    graph: &Graph,
    target: &[Vertex],
    tolerance: usize,
    params: &CoverageParams,
    rng: &mut R,
) -> Result<(Vec<Vertex>, Vec<GainRecord>)> {
    check_set(graph, target, "target set")?;
    let n = graph.n();
    let goal = target.len() as f64 - tolerance as f64;
    let samples = params.sample_count(n)?;
    let master = rng.next_u64();
    let mut seeds: Vec<Vertex> = Vec::new();
    let mut gains = Vec::new();
    let mut current = 0.0;
    let mut in_target = vec![false; n];
    for &u in target {
        in_target[u] = true;
    }
    while current < goal - COVER_EPS {
        let iteration = gains.len();
        if iteration >= target.len() {
            return Err(Error::GreedyDiverged { iterations: iteration });
        }
        let candidates: Vec<Vertex> = target.iter().copied().filter(|v| !seeds.contains(v)).collect();
        let round_seed = derive_seed(master, "greedy-round", iteration as u64);
        // Per ordering: coverage of S ∪ {v} for each candidate.
        let per_ordering: Vec<Vec<u32>> = run_trials(round_seed, "greedy", samples, |_, rng| {
            let o = Ordering::sample(n, rng);
            let view = OrientedView::new(graph, &o);
            let base = if seeds.is_empty() { vec![false; n] } else { view.reachable_mask(&seeds) };
            candidates
                .iter()
                .map(|&v| {
                    let extra = view.reachable_mask(&[v]);
                    (0..n).filter(|&u| in_target[u] && (base[u] || extra[u])).count() as u32
                })
                .collect()
        });
        let mut totals = vec![0u64; candidates.len()];
        for row in &per_ordering {
            for (t, &c) in totals.iter_mut().zip(row) {
                *t += c as u64;
            }
        }
        // Strictly greater keeps the lowest id among equals.
        let mut best = 0;
        for i in 1..totals.len() {
            if totals[i] > totals[best] {
                best = i;
            }
        }
        let value = totals[best] as f64 / samples as f64;
        let vertex = candidates[best];
        seeds.push(vertex);
        gains.push(GainRecord {
            iteration,
            vertex,
            coverage: value,
            gain: value - current,
            samples,
        });
        current = value;
    }
    Ok((seeds, gains))
}

/// BoostGraph: finds the non-learners `V'` with the oracle, covers them
/// greedily, and boosts the chosen seeds with `k` celebrities. When every
/// vertex already learns the graph is returned unchanged.
#[allow(clippy::too_many_arguments)]
pub fn greedy_boost<R: RngCore + ?Sized>(
    graph: &Graph,
    oracle: &OracleConfig,
    engine: &EngineConfig,
    k: usize,
    tolerance: usize,
    params: &CoverageParams,
    rng: &mut R,
) -> Result<BoostPlan> {
    if k == 0 {
        return Err(Error::InvalidParams("k must be at least 1".into()));
    }
    let target = non_learners(graph, oracle, engine, rng)?;
    greedy_boost_target(graph, &target, k, tolerance, params, rng)
}

/// [`greedy_boost`] with an explicit target set.
pub fn greedy_boost_target<R: RngCore + ?Sized>(
    graph: &Graph,
    target: &[Vertex],
    k: usize,
    tolerance: usize,
    params: &CoverageParams,
    rng: &mut R,
) -> Result<BoostPlan> {
    let (seeds, gains) = greedy_cover(graph, target, tolerance, params, rng)?;
    let mut plan = if seeds.is_empty() {
        BoostPlan {
            seed_set: Vec::new(),
            k,
            added_vertices: Vec::new(),
            added_edges: Vec::new(),
            resulting_graph: graph.clone(),
            target_set: Vec::new(),
            tolerance,
            gains: Vec::new(),
        }
    } else {
        boost_agents(graph, &seeds, k)?
    };
    // Keep the greedy pick order in the gain log; the seed set is sorted.
    plan.target_set = target.to_vec();
    plan.tolerance = tolerance;
    plan.gains = gains;
    Ok(plan)
}

/// Smallest `S ⊆ V` with exact coverage at least `|V'| - T`; among sets of
/// that size the lexicographically first.
pub fn brute_force_min_cover(graph: &Graph, target: &[Vertex], tolerance: usize) -> Result<Vec<Vertex>> {
    check_set(graph, target, "target set")?;
    let n = graph.n();
    if n > BRUTE_FORCE_CAP {
        return Err(Error::EnumerationCap { n, cap: BRUTE_FORCE_CAP });
    }
    let goal = target.len() as f64 - tolerance as f64;
    if goal <= COVER_EPS {
        return Ok(Vec::new());
    }
    let table = CoverageTable::new(graph)?;
    for size in 1..=n {
        for s in (0..n).combinations(size) {
            if table.coverage(target, &s) >= goal - COVER_EPS {
                return Ok(s);
            }
        }
    }
    unreachable!("S = V covers every target")
}
