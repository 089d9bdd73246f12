use crate::error::{Error, Result};
use crate::graph::Vertex;
use crate::ordering::OrientedView;

use super::likelihood::observation_likelihood;
use super::{DecisionTable, EngineConfig, TableSet};

fn check_cone(view: &OrientedView<'_>, v: Vertex, cap: usize) -> Result<()> {
    let size = view.ancestor_cone(v).len() + 1;
    if size > cap {
        return Err(Error::ConeCapExceeded { vertex: v, size, cap });
    }
    Ok(())
}

/// Exact tables for `targets` and everything they depend on.
pub(crate) fn build_exact_subset(view: &OrientedView<'_>, cfg: &EngineConfig, targets: &[Vertex]) -> Result<TableSet> {
    let n = view.n();
    let mut needed = vec![false; n];
    for &v in targets {
        check_cone(view, v, cfg.cone_cap)?;
        needed[v] = true;
        for u in view.ancestor_cone(v) {
            needed[u] = true;
        }
    }
    let mut set = TableSet::with_capacity(n);
    let slr = cfg.signal_llr();
    for &v in view.ordering.sequence() {
        if !needed[v] {
            continue;
        }
        let observed = view.prior_neighbors(v);
        if observed.is_empty() {
            set.insert(DecisionTable::source(v, cfg.q));
            continue;
        }
        let lik = observation_likelihood(view.ordering, &set, &observed, cfg.q, cfg.cone_cap)?;
        let llr: Vec<f64> = lik[1]
            .iter()
            .zip(&lik[0])
            .map(|(&l1, &l0)| {
                if l1 == 0.0 && l0 == 0.0 {
                    f64::NAN
                } else {
                    l1.ln() - l0.ln()
                }
            })
            .collect();
        let mut t = DecisionTable::from_llr(v, observed, &llr, |_| cfg.tie_epsilon, slr);
        t.likelihood = Some(lik);
        set.insert(t);
    }
    Ok(set)
}

/// Exact decision tables for every agent under `view.ordering`.
pub fn build_tables_exact(view: &OrientedView<'_>, cfg: &EngineConfig) -> Result<Vec<DecisionTable>> {
    let all: Vec<Vertex> = (0..view.n()).collect();
    Ok(build_exact_subset(view, cfg, &all)?.into_complete())
}

/// `ℓ_σ(v)`: exact probability that `v` acts correctly under this ordering.
pub fn exact_rate_fixed(view: &OrientedView<'_>, v: Vertex, cfg: &EngineConfig) -> Result<f64> {
    let set = build_exact_subset(view, cfg, &[v])?;
    let t = set.get(v).expect("target table built");
    Ok(t.rate_from_likelihood(t.likelihood().expect("exact tables keep likelihoods"), cfg.q))
}

/// `ℓ_σ(v)` for every agent.
pub fn exact_rates_all(view: &OrientedView<'_>, cfg: &EngineConfig) -> Result<Vec<f64>> {
    let all: Vec<Vertex> = (0..view.n()).collect();
    let set = build_exact_subset(view, cfg, &all)?;
    Ok(all
        .iter()
        .map(|&v| {
            let t = set.get(v).unwrap();
            t.rate_from_likelihood(t.likelihood().unwrap(), cfg.q)
        })
        .collect())
}
