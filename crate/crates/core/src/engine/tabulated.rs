//! Tables estimated from forward simulation.
//!
//! For each agent (in decision order), `forward_samples` signal profiles per
//! ground-truth value are pushed through the tables already built. The
//! counts of each observed action vector give a smoothed estimate of its
//! likelihood ratio, which is then combined with the exact likelihood of the
//! agent's own signal.

use rand::Rng;

use crate::graph::Vertex;
use crate::ordering::OrientedView;
use crate::rates::first_learner_scores;

use super::{DecisionTable, EngineConfig, TableSet};

/// Ranking used when an agent has more prior neighbors than it may observe:
/// first-learner score, plus one for neighbors that act with nothing to
/// observe (their action is their signal).
pub fn observation_priority(view: &OrientedView<'_>, u: Vertex, scores: &[f64]) -> f64 {
    scores[u] + if view.prior_degree(u) == 0 { 1.0 } else { 0.0 }
}

/// The prior neighbors `v` observes, ascending by id: all of them if there
/// are at most `obs_cap`, otherwise the `obs_cap` with highest priority
/// (lower id first among equals).
pub fn select_observed(view: &OrientedView<'_>, v: Vertex, obs_cap: usize, scores: &[f64]) -> Vec<Vertex> {
    let mut prior = view.prior_neighbors(v);
    if prior.len() <= obs_cap {
        return prior;
    }
    let mut ranked: Vec<(f64, Vertex)> = prior
        .iter()
        .map(|&u| (observation_priority(view, u, scores), u))
        .collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    prior = ranked[..obs_cap].iter().map(|&(_, u)| u).collect();
    prior.sort_unstable();
    prior
}

pub(crate) fn build_tabulated_subset<R: Rng + ?Sized>(
    view: &OrientedView<'_>,
    cfg: &EngineConfig,
    targets: &[Vertex],
    rng: &mut R,
) -> TableSet {
    let n = view.n();
    let scores = first_learner_scores(view.graph);
    let mut observed: Vec<Option<Vec<Vertex>>> = vec![None; n];
    let mut stack: Vec<Vertex> = targets.to_vec();
    while let Some(v) = stack.pop() {
        if observed[v].is_some() {
            continue;
        }
        let obs = select_observed(view, v, cfg.obs_cap, &scores);
        stack.extend(obs.iter().copied());
        observed[v] = Some(obs);
    }

    let r = cfg.forward_samples;
    let slr = cfg.signal_llr();
    let band = cfg.tie_band;
    let eps = cfg.tie_epsilon;
    let mut set = TableSet::with_capacity(n);
    // Simulated actions of every built agent: first r entries under θ = 0,
    // next r under θ = 1.
    let mut acts: Vec<Vec<u8>> = vec![Vec::new(); n];
    let mut idx = vec![0u32; 2 * r];
    for &v in view.ordering.sequence() {
        let Some(obs) = observed[v].take() else { continue };
        let own: Vec<u8> = (0..2 * r)
            .map(|k| {
                let theta = (k >= r) as u8;
                if rng.gen_bool(cfg.q) { theta } else { 1 - theta }
            })
            .collect();
        if obs.is_empty() {
            set.insert(DecisionTable::source(v, cfg.q));
            acts[v] = own;
            continue;
        }
        idx.fill(0);
        for (j, &u) in obs.iter().enumerate() {
            for (slot, &a) in idx.iter_mut().zip(&acts[u]) {
                *slot |= (a as u32) << j;
            }
        }
        let cells = 1usize << obs.len();
        let mut counts = [vec![0u32; cells], vec![0u32; cells]];
        for (k, &o) in idx.iter().enumerate() {
            counts[(k >= r) as usize][o as usize] += 1;
        }
        // Add-one smoothing; the normalizers are equal and cancel.
        let llr: Vec<f64> = (0..cells)
            .map(|o| ((counts[1][o] + 1) as f64).ln() - ((counts[0][o] + 1) as f64).ln())
            .collect();
        let tolerance = |o: usize| {
            let se = (1.0 / (counts[1][o] + 1) as f64 + 1.0 / (counts[0][o] + 1) as f64).sqrt();
            // A log-likelihood band of half-width w is a posterior band of
            // half-width tanh(w / 2) / 2 around 1/2.
            eps.max(0.5 * (0.5 * band * se).tanh())
        };
        let t = DecisionTable::from_llr(v, obs, &llr, tolerance, slr);
        let raw = t.actions_raw();
        acts[v] = idx
            .iter()
            .zip(&own)
            .map(|(&o, &s)| raw[((o as usize) << 1) | s as usize])
            .collect();
        set.insert(t);
    }
    set
}

/// Estimated decision tables for every agent under `view.ordering`.
pub fn build_tables_tabulated<R: Rng + ?Sized>(
    view: &OrientedView<'_>,
    cfg: &EngineConfig,
    rng: &mut R,
) -> Vec<DecisionTable> {
    let all: Vec<Vertex> = (0..view.n()).collect();
    build_tabulated_subset(view, cfg, &all, rng).into_complete()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{build_tables_exact, policy_rates};
    use crate::graph::Graph;
    use crate::ordering::Ordering;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tabulated_matches_exact_on_small_graph() {
        let g = Graph::from_edges(5, &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (1, 4)]).unwrap();
        let id = Ordering::identity(5);
        let view = OrientedView::new(&g, &id);
        let cfg = EngineConfig::tabulated(0.7);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let tab = build_tables_tabulated(&view, &cfg, &mut rng);
        let exact = build_tables_exact(&view, &EngineConfig::exact(0.7)).unwrap();
        let a = policy_rates(&id, &tab, 0.7, 22).unwrap();
        let b = policy_rates(&id, &exact, 0.7, 22).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 0.02, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn selection_keeps_highest_priority() {
        // Star with center 0 acting last: leaves are sources with equal
        // scores, so the lowest ids win.
        let e: Vec<_> = (1..6).map(|i| (0, i)).collect();
        let g = Graph::from_edges(6, &e).unwrap();
        let o = Ordering::from_sequence(vec![1, 2, 3, 4, 5, 0]).unwrap();
        let view = OrientedView::new(&g, &o);
        let scores = first_learner_scores(&g);
        assert_eq!(select_observed(&view, 0, 3, &scores), vec![1, 2, 3]);
        assert_eq!(select_observed(&view, 0, 8, &scores), vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn source_actions_equal_signals() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let id = Ordering::identity(2);
        let view = OrientedView::new(&g, &id);
        let cfg = EngineConfig::tabulated(0.6).with_forward_samples(100);
        let t = build_tables_tabulated(&view, &cfg, &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(t[0], DecisionTable::source(0, 0.6));
    }
}
