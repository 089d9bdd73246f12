//! Modification experiments: rates before and after adversarial edits,
//! the celebrity worst case, and signal-quality sweeps.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::analytics::{edge_mod_floor, vertex_mod_floor};
use crate::engine::EngineConfig;
use crate::error::{Error, Result};
use crate::families::{celebrity, FamilyInstance};
use crate::graph::{Graph, Modification, Vertex};
use crate::rates::{graph_rate, rate_fixed, rate_random, RateEstimate};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentParams {
    pub q: f64,
    pub trials: usize,
    /// The target vertex before modification; `None` for graph-level rates.
    pub vertex: Option<Vertex>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub before: RateEstimate,
    pub after: RateEstimate,
    /// Floor on `after` implied by `before`.
    pub bound: f64,
    pub mods: Vec<Modification>,
    pub params: ExperimentParams,
}

impl ExperimentResult {
    pub fn floor_holds(&self, slack: f64) -> bool {
        self.after.mean >= self.bound - slack
    }
}

/// Floor after `mods` given the rate `before`: `1 - (k+1)ε` if any vertex
/// is added or removed, `1 - ((2k+1)/2)ε` for edge edits only, where
/// `ε = 1 - before` and `k = mods.len()`.
pub fn modification_floor(before: f64, mods: &[Modification]) -> f64 {
    let eps = 1.0 - before;
    let k = mods.len();
    if mods.iter().any(Modification::is_vertex_mod) {
        vertex_mod_floor(k, eps)
    } else {
        edge_mod_floor(k, eps)
    }
}

/// `ℓ(v)` before and after applying `mods`.
pub fn degradation<R: RngCore + ?Sized>(
    graph: &Graph,
    v: Vertex,
    cfg: &EngineConfig,
    mods: &[Modification],
    trials: usize,
    rng: &mut R,
) -> Result<ExperimentResult> {
    if v >= graph.n() {
        return Err(Error::InvalidParams(format!("vertex {v} not in graph")));
    }
    let (after_graph, map) = graph.apply_all(mods)?;
    let v_after = map[v].ok_or(Error::TargetDeleted(v))?;
    let before = rate_random(graph, v, cfg, trials, rng)?;
    let after = if mods.is_empty() {
        before
    } else {
        rate_random(&after_graph, v_after, cfg, trials, rng)?
    };
    let bound = if mods.is_empty() { before.mean } else { modification_floor(before.mean, mods) };
    Ok(ExperimentResult {
        before,
        after,
        bound,
        mods: mods.to_vec(),
        params: ExperimentParams { q: cfg.q, trials, vertex: Some(v) },
    })
}

/// `L(celebrity(n, k))` before and after deleting every celebrity, with the
/// tabulated engine at signal quality `q`.
pub fn celebrity_worstcase<R: RngCore + ?Sized>(
    n: usize,
    k: usize,
    q: f64,
    trials: usize,
    rng: &mut R,
) -> Result<ExperimentResult> {
    celebrity_worstcase_with(n, k, &EngineConfig::tabulated(q), trials, rng)
}

pub fn celebrity_worstcase_with<R: RngCore + ?Sized>(
    n: usize,
    k: usize,
    cfg: &EngineConfig,
    trials: usize,
    rng: &mut R,
) -> Result<ExperimentResult> {
    let inst = celebrity(n, k)?;
    // Delete from the highest id down so earlier ids stay valid.
    let mods: Vec<Modification> = (n - k..n).rev().map(Modification::DeleteVertex).collect();
    let before = graph_rate(&inst.graph, cfg, trials, rng)?;
    // Without the celebrities every agent is isolated and follows its signal.
    let after = RateEstimate::exact(cfg.q, 1);
    Ok(ExperimentResult {
        before,
        after,
        bound: modification_floor(before.mean, &mods),
        mods,
        params: ExperimentParams { q: cfg.q, trials, vertex: None },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub family: String,
    pub params: String,
    pub q: f64,
    pub vertex: Vertex,
    pub rate: RateEstimate,
}

/// Compact `k=v;k=v` rendering of generator parameters.
pub fn params_string(inst: &FamilyInstance) -> String {
    inst.params
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

/// Rate of `vertex` at each `q` in `grid`: under the strategic order when
/// the family has one, otherwise under random orderings.
pub fn q_sweep<R: RngCore + ?Sized>(
    inst: &FamilyInstance,
    vertex: Vertex,
    grid: &[f64],
    cfg: &EngineConfig,
    trials: usize,
    rng: &mut R,
) -> Result<Vec<SweepRow>> {
    if let Some(&q) = grid.iter().find(|&&q| !(q > 0.5 && q < 1.0)) {
        return Err(Error::InvalidParams(format!("grid value {q} outside (1/2, 1)")));
    }
    let params = params_string(inst);
    grid.iter()
        .map(|&q| {
            let c = EngineConfig { q, ..cfg.clone() };
            let rate = match &inst.strategic_order {
                Some(o) => rate_fixed(&inst.graph, o, vertex, &c, trials, rng)?,
                None => rate_random(&inst.graph, vertex, &c, trials, rng)?,
            };
            Ok(SweepRow {
                family: inst.family.clone(),
                params: params.clone(),
                q,
                vertex,
                rate,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::majority_tail;
    use crate::families::{complete, fragile_low_q, path, LowQLayout};
    use crate::rates::Method;
    use crate::seed::rng_from_seed;

    #[test]
    fn no_mods_means_no_change() {
        let g = path(4).unwrap().graph;
        let r = degradation(&g, 1, &EngineConfig::exact(0.7), &[], 1, &mut rng_from_seed(0)).unwrap();
        assert_eq!(r.before, r.after);
        assert_eq!(r.bound, r.before.mean);
    }

    #[test]
    fn deleting_target_is_an_error() {
        let g = complete(4).unwrap().graph;
        let r = degradation(&g, 2, &EngineConfig::exact(0.7), &[Modification::DeleteVertex(2)], 1, &mut rng_from_seed(0));
        assert_eq!(r.unwrap_err(), Error::TargetDeleted(2));
    }

    #[test]
    fn floors_use_the_right_formula() {
        let e = [Modification::AddEdge(0, 1)];
        let v = [Modification::DeleteVertex(3), Modification::AddEdge(0, 1)];
        assert!((modification_floor(0.9, &e) - (1.0 - 1.5 * 0.1)).abs() < 1e-12);
        assert!((modification_floor(0.9, &v) - (1.0 - 3.0 * 0.1)).abs() < 1e-12);
    }

    #[test]
    fn single_deletion_respects_floor() {
        let g = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (1, 2), (3, 4)]).unwrap();
        let r = degradation(&g, 0, &EngineConfig::exact(0.7), &[Modification::DeleteVertex(4)], 1, &mut rng_from_seed(0))
            .unwrap();
        assert_eq!(r.after.method, Method::ExactEnum);
        assert!(r.floor_holds(1e-12), "{r:?}");
    }

    #[test]
    fn sweep_on_fragile_network() {
        let f = fragile_low_q(2, 0).unwrap();
        let u0 = LowQLayout { k_w: 2, tail: 0 }.u0();
        let rows = q_sweep(&f, u0, &[0.85, 0.9], &EngineConfig::exact(0.7), 1, &mut rng_from_seed(0)).unwrap();
        assert_eq!(rows.len(), 2);
        for r in &rows {
            assert!((r.rate.mean - majority_tail(5, r.q)).abs() < 1e-9);
        }
        assert!(q_sweep(&f, u0, &[0.4], &EngineConfig::exact(0.7), 1, &mut rng_from_seed(0)).is_err());
    }
}
