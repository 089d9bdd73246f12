//! Property suites run over exhaustive or sampled corpora. Each suite counts
//! the checks it made and the violations it found.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::analytics::{caro_wei, conditional_floor, good_neighborhood_floor, sampling_concentration};
use crate::booster::{brute_force_min_cover, coverage_exact, greedy_cover, CoverageParams};
use crate::error::{Error, Result};
use crate::exhaustive::{connected_masks, graph_from_mask, pair_bit, pairs, Corpus};
use crate::families::erdos_renyi;
use crate::graph::{Graph, Modification, Vertex};
use crate::ordering::OrientedView;
use crate::robustness::modification_floor;
use crate::seed::rng_from_seed;

/// Slack for comparisons between exact rates.
pub const RATE_TOL: f64 = 1e-12;
/// Violations kept verbatim in a report.
pub const EXAMPLE_LIMIT: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Monotonicity,
    Improvement,
    Submodularity,
    Concentration,
    Bounds,
    Greedy,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Monotonicity,
        Suite::Improvement,
        Suite::Submodularity,
        Suite::Concentration,
        Suite::Bounds,
        Suite::Greedy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Monotonicity => "monotonicity",
            Suite::Improvement => "improvement",
            Suite::Submodularity => "submodularity",
            Suite::Concentration => "concentration",
            Suite::Bounds => "bounds",
            Suite::Greedy => "greedy",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checked: u64,
    pub violations: u64,
    /// The first few violations, described.
    pub examples: Vec<String>,
}

impl SuiteReport {
    fn new(suite: Suite) -> Self {
        SuiteReport { suite, checked: 0, violations: 0, examples: Vec::new() }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations += 1;
            if self.examples.len() < EXAMPLE_LIMIT {
                self.examples.push(describe());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Positional rates never decrease with the index, for every vertex of
/// every connected graph in the corpus.
pub fn monotonicity(corpus: &Corpus) -> SuiteReport {
    let mut r = SuiteReport::new(Suite::Monotonicity);
    for n in 2..=corpus.max_n() {
        let cache = corpus.cache(n);
        for mask in connected_masks(n) {
            for v in 0..n {
                let rates: Vec<f64> = (1..=n).map(|i| cache.positional(mask, v, i)).collect();
                for i in 1..n {
                    r.check(rates[i] >= rates[i - 1] - RATE_TOL, || {
                        format!("n={n} mask={mask} v={v}: index {i} gives {} > index {} gives {}", rates[i - 1], i + 1, rates[i])
                    });
                }
            }
        }
    }
    r
}

/// Under every ordering, an agent does at least as well as each prior
/// neighbor, and dropping any subset of its prior edges never helps it;
/// under random orderings an extra edge never hurts.
pub fn improvement(corpus: &Corpus) -> SuiteReport {
    let mut r = SuiteReport::new(Suite::Improvement);
    for n in 2..=corpus.max_n() {
        let cache = corpus.cache(n);
        for mask in connected_masks(n) {
            let g = graph_from_mask(n, mask);
            for (oi, o) in cache.orderings.iter().enumerate() {
                let view = OrientedView::new(&g, o);
                for v in 0..n {
                    let lv = cache.fixed(mask, oi, v);
                    let prior = view.prior_neighbors(v);
                    for &u in &prior {
                        let lu = cache.fixed(mask, oi, u);
                        r.check(lv >= lu - RATE_TOL, || {
                            format!("n={n} mask={mask} order={:?}: v={v} at {lv} below neighbor {u} at {lu}", o.sequence())
                        });
                    }
                    for size in 1..=prior.len() {
                        for drop in prior.iter().combinations(size) {
                            let cut = drop.iter().fold(mask, |m, &&u| m & !(1 << pair_bit(n, u, v)));
                            let lc = cache.fixed(cut, oi, v);
                            r.check(lc <= lv + RATE_TOL, || {
                                format!("n={n} mask={mask} order={:?}: v={v} rises to {lc} from {lv} without {drop:?}", o.sequence())
                            });
                        }
                    }
                }
            }
            // Random-order rates with one more edge at v.
            for v in 0..n {
                let base = cache.random(mask, v);
                for u in (0..n).filter(|&u| u != v && !g.has_edge(u, v)) {
                    let more = cache.random(mask | 1 << pair_bit(n, u, v), v);
                    r.check(more >= base - RATE_TOL, || {
                        format!("n={n} mask={mask}: adding ({u}, {v}) lowers ℓ(v) from {base} to {more}")
                    });
                }
            }
        }
    }
    r
}

fn floor_check(r: &mut SuiteReport, corpus: &Corpus, g: &Graph, mask: u32, v: Vertex, before: f64, mods: &[Modification]) {
    let (after, map) = g.apply_all(mods).expect("modification valid by construction");
    let Some(v2) = map[v] else { return };
    let rate = corpus.random_rate(&after, v2);
    let bound = modification_floor(before, mods);
    r.check(rate >= bound - RATE_TOL, || {
        format!("n={} mask={mask} v={v} {mods:?}: {rate} below floor {bound}", g.n())
    });
}

/// Rates after one or two vertex deletions or one edge edit stay above
/// the modification floors. Also checks the conditioning floor
/// `1 - ε / Pr(A)`, the good-neighborhood floor, and Caro–Wei against the
/// independence number.
pub fn bounds(corpus: &Corpus) -> SuiteReport {
    let mut r = SuiteReport::new(Suite::Bounds);
    for n in 2..=corpus.max_n() {
        let cache = corpus.cache(n);
        for mask in connected_masks(n) {
            let g = graph_from_mask(n, mask);
            for v in 0..n {
                let before = cache.random(mask, v);
                for u in (0..n).filter(|&u| u != v) {
                    floor_check(&mut r, corpus, &g, mask, v, before, &[Modification::DeleteVertex(u)]);
                }
                for (a, b) in (0..n).filter(|&u| u != v).tuple_combinations() {
                    // Delete the larger id first so the smaller keeps its id.
                    let mods = [Modification::DeleteVertex(b), Modification::DeleteVertex(a)];
                    floor_check(&mut r, corpus, &g, mask, v, before, &mods);
                }
                for (a, b) in pairs(n) {
                    let m = if g.has_edge(a, b) { Modification::DeleteEdge(a, b) } else { Modification::AddEdge(a, b) };
                    floor_check(&mut r, corpus, &g, mask, v, before, &[m]);
                }
                // Conditioning on v acting in the first k positions.
                for k in 1..n {
                    let (mut sum, mut hits) = (0.0, 0usize);
                    for (oi, o) in cache.orderings.iter().enumerate() {
                        if o.position(v) < k {
                            sum += cache.fixed(mask, oi, v);
                            hits += 1;
                        }
                    }
                    let p = hits as f64 / cache.orderings.len() as f64;
                    let cond = sum / hits as f64;
                    let floor = conditional_floor(before, p);
                    r.check(cond >= floor - RATE_TOL, || {
                        format!("n={n} mask={mask} v={v}: rate {cond} given position < {k} below {floor}")
                    });
                }
            }
            // Neighbors all at rate at least 1 - ε.
            for v in (0..n).filter(|&v| g.degree(v) > 0) {
                let eps = g.neighbors(v).iter().map(|&u| 1.0 - cache.random(mask, u)).fold(0.0, f64::max);
                let floor = good_neighborhood_floor(g.degree(v), eps);
                let rate = cache.random(mask, v);
                r.check(rate >= floor - RATE_TOL, || {
                    format!("n={n} mask={mask} v={v}: {rate} below neighborhood floor {floor}")
                });
            }
            let alpha = independence_number(&g);
            let cw = caro_wei(&g);
            r.check(cw <= alpha as f64 + RATE_TOL, || format!("n={n} mask={mask}: Caro-Wei {cw} above α = {alpha}"));
        }
    }
    r
}

/// Size of a largest independent set, by brute force.
pub fn independence_number(g: &Graph) -> usize {
    let n = g.n();
    assert!(n < 32, "brute-force independence number needs n < 32");
    let adj: Vec<u32> = (0..n).map(|v| g.neighbors(v).iter().fold(0, |m, &u| m | 1 << u)).collect();
    (0u32..1 << n)
        .filter(|&s| (0..n).all(|v| s >> v & 1 == 0 || adj[v] & s == 0))
        .map(|s| s.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

fn random_subset<R: Rng + ?Sized>(items: &[Vertex], rng: &mut R) -> Vec<Vertex> {
    items.iter().copied().filter(|_| rng.gen_bool(0.5)).collect()
}

/// Exact coverage on random `(G, V', S ⊆ T, x)` tuples: monotone,
/// nonnegative, and the gain of `x` shrinks from `S` to `T`.
pub fn submodularity<R: RngCore + ?Sized>(tuples: usize, max_n: usize, rng: &mut R) -> Result<SuiteReport> {
    if !(2..=crate::booster::COVERAGE_ENUM_CAP).contains(&max_n) {
        return Err(Error::InvalidParams(format!("submodularity corpus size {max_n} outside 2..=8")));
    }
    let mut r = SuiteReport::new(Suite::Submodularity);
    let mut rng = rng_from_seed(rng.next_u64());
    for _ in 0..tuples {
        let n = rng.gen_range(2..=max_n);
        let g = erdos_renyi(n, rng.gen_range(0.2..0.8), &mut rng)?.graph;
        let all: Vec<Vertex> = (0..n).collect();
        let mut target = random_subset(&all, &mut rng);
        if target.is_empty() {
            target.push(rng.gen_range(0..n));
        }
        let x = rng.gen_range(0..n);
        let rest: Vec<Vertex> = all.iter().copied().filter(|&u| u != x).collect();
        let t = random_subset(&rest, &mut rng);
        let s = random_subset(&t, &mut rng);
        let with = |set: &[Vertex]| {
            let mut w = set.to_vec();
            w.push(x);
            w
        };
        let cs = coverage_exact(&g, &target, &s)?;
        let ct = coverage_exact(&g, &target, &t)?;
        let csx = coverage_exact(&g, &target, &with(&s))?;
        let ctx = coverage_exact(&g, &target, &with(&t))?;
        let tag = || format!("edges={:?} target={target:?} S={s:?} T={t:?} x={x}", g.edges().collect::<Vec<_>>());
        r.check(cs >= -RATE_TOL, || format!("negative coverage {cs}: {}", tag()));
        r.check(ct >= cs - RATE_TOL, || format!("C(T) = {ct} < C(S) = {cs}: {}", tag()));
        r.check(csx >= cs - RATE_TOL, || format!("negative gain at S: {}", tag()));
        r.check(csx - cs >= ctx - ct - RATE_TOL, || {
            format!("gain {} at S below gain {} at T: {}", csx - cs, ctx - ct, tag())
        });
    }
    Ok(r)
}

/// Parameter sets `(n, k, ε)` for the sampling-concentration check.
pub const CONCENTRATION_CASES: [(usize, usize, f64); 2] = [(100, 20, 0.2), (200, 30, 0.1)];

pub fn concentration<R: RngCore + ?Sized>(samples: usize, rng: &mut R) -> SuiteReport {
    let mut r = SuiteReport::new(Suite::Concentration);
    for (n, k, eps) in CONCENTRATION_CASES {
        let c = sampling_concentration(n, k, eps, samples, rng);
        r.check(c.holds(), || format!("{c:?}"));
    }
    r
}

/// Greedy seed sets on random graphs stay within
/// `⌈ln(|V'| / max(T, 1)) + 2⌉` times the optimum.
pub fn greedy_approximation<R: RngCore + ?Sized>(
    graphs: usize,
    max_n: usize,
    params: &CoverageParams,
    rng: &mut R,
) -> Result<SuiteReport> {
    if !(4..=crate::booster::BRUTE_FORCE_CAP).contains(&max_n) {
        return Err(Error::InvalidParams(format!("greedy corpus size {max_n} outside 4..=12")));
    }
    let mut r = SuiteReport::new(Suite::Greedy);
    let mut rng = rng_from_seed(rng.next_u64());
    for _ in 0..graphs {
        let n = rng.gen_range(4..=max_n);
        let g = erdos_renyi(n, rng.gen_range(0.1..0.5), &mut rng)?.graph;
        let mut all: Vec<Vertex> = (0..n).collect();
        all.shuffle(&mut rng);
        let mut target: Vec<Vertex> = all[..rng.gen_range(1..=n)].to_vec();
        target.sort_unstable();
        let tolerance = rng.gen_range(0..=target.len() / 2);
        let (greedy, _) = greedy_cover(&g, &target, tolerance, params, &mut rng)?;
        let opt = brute_force_min_cover(&g, &target, tolerance)?;
        let factor = ((target.len() as f64 / tolerance.max(1) as f64).ln() + 2.0).ceil();
        r.check(greedy.len() as f64 <= factor * opt.len() as f64, || {
            format!(
                "edges={:?} target={target:?} T={tolerance}: greedy {greedy:?} vs optimum {opt:?}",
                g.edges().collect::<Vec<_>>()
            )
        });
    }
    Ok(r)
}
