//! Deterministic Bayesian agent decisions.
//!
//! Each agent's behavior under a fixed ordering is a lookup table from
//! (own signal, observed action vector) to an action. Tables are built in
//! decision order, either exactly (enumerating signal assignments of the
//! ancestor cone) or from forward simulation of the earlier agents' tables.

mod exact;
mod likelihood;
mod tabulated;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Vertex;
use crate::ordering::{Ordering, OrientedView};

pub use exact::{build_tables_exact, exact_rate_fixed, exact_rates_all};
pub use likelihood::{policy_rate, policy_rates};
pub use tabulated::{build_tables_tabulated, observation_priority, select_observed};
pub(crate) use tabulated::build_tabulated_subset;

pub const MAX_CONE_CAP: usize = 26;
pub const MAX_OBS_CAP: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineMode {
    Exact,
    Tabulated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub mode: EngineMode,
    /// Largest `|B(v) ∪ {v}|` the exact engine will enumerate.
    pub cone_cap: usize,
    /// Most prior neighbors a tabulated agent observes.
    pub obs_cap: usize,
    /// Forward simulations per ground-truth value when tabulating.
    pub forward_samples: usize,
    pub tie_epsilon: f64,
    /// Tabulated cells whose log-likelihood ratio is within this many
    /// standard errors of zero are treated as ties.
    pub tie_band: f64,
    /// Orderings are enumerated exhaustively (instead of sampled) for graphs
    /// up to this size when the engine is exact.
    pub enum_cap: usize,
    pub q: f64,
}

impl EngineConfig {
    pub fn exact(q: f64) -> Self {
        EngineConfig {
            mode: EngineMode::Exact,
            cone_cap: 22,
            obs_cap: 10,
            forward_samples: 20_000,
            tie_epsilon: 1e-12,
            tie_band: 3.0,
            enum_cap: 6,
            q,
        }
    }

    pub fn tabulated(q: f64) -> Self {
        EngineConfig {
            mode: EngineMode::Tabulated,
            ..Self::exact(q)
        }
    }

    pub fn with_forward_samples(mut self, r: usize) -> Self {
        self.forward_samples = r;
        self
    }

    pub fn with_obs_cap(mut self, cap: usize) -> Self {
        self.obs_cap = cap;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q > 0.5 && self.q < 1.0) {
            return Err(Error::InvalidConfig(format!("q = {} must lie in (1/2, 1)", self.q)));
        }
        if self.cone_cap > MAX_CONE_CAP {
            return Err(Error::InvalidConfig(format!("cone_cap {} exceeds {MAX_CONE_CAP}", self.cone_cap)));
        }
        if self.obs_cap > MAX_OBS_CAP {
            return Err(Error::InvalidConfig(format!("obs_cap {} exceeds {MAX_OBS_CAP}", self.obs_cap)));
        }
        if self.forward_samples == 0 {
            return Err(Error::InvalidConfig("forward_samples must be positive".into()));
        }
        if self.enum_cap > 8 {
            return Err(Error::InvalidConfig(format!("enum_cap {} exceeds 8", self.enum_cap)));
        }
        if !(self.tie_epsilon >= 0.0 && self.tie_band >= 0.0) {
            return Err(Error::InvalidConfig("tie tolerances must be non-negative".into()));
        }
        Ok(())
    }

    /// `ln(q / (1 - q))`, the log-likelihood ratio carried by one signal.
    pub(crate) fn signal_llr(&self) -> f64 {
        (self.q / (1.0 - self.q)).ln()
    }
}

/// Maximum a posteriori action; a posterior within `tie_epsilon` of 1/2 is
/// a tie and the agent sides with its own signal.
pub fn decide(posterior: f64, own_signal: u8, tie_epsilon: f64) -> u8 {
    if posterior > 0.5 + tie_epsilon {
        1
    } else if posterior < 0.5 - tie_epsilon {
        0
    } else {
        own_signal
    }
}

#[inline]
fn logistic(llr: f64) -> f64 {
    1.0 / (1.0 + (-llr).exp())
}

/// One agent's complete decision function under a fixed ordering.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTable {
    pub vertex: Vertex,
    /// Prior neighbors whose actions this agent uses, ascending by id; bit
    /// `j` of an observation index is the action of `observed[j]`.
    pub observed: Vec<Vertex>,
    actions: Vec<u8>,
    posteriors: Vec<f64>,
    /// Exact `Pr(observation | θ)` for θ = 0, 1, kept by the exact engine.
    #[serde(skip)]
    likelihood: Option<[Vec<f64>; 2]>,
}

impl DecisionTable {
    #[inline]
    pub fn key(own_signal: u8, observation: usize) -> usize {
        (observation << 1) | own_signal as usize
    }

    /// Table of an agent with nothing to observe.
    pub fn source(vertex: Vertex, q: f64) -> Self {
        DecisionTable {
            vertex,
            observed: Vec::new(),
            actions: vec![0, 1],
            posteriors: vec![1.0 - q, q],
            likelihood: Some([vec![1.0], vec![1.0]]),
        }
    }

    /// Builds the table from per-observation log-likelihood ratios
    /// `ln Pr(o | θ=1) - ln Pr(o | θ=0)` and per-observation tie tolerances.
    fn from_llr(
        vertex: Vertex,
        observed: Vec<Vertex>,
        obs_llr: &[f64],
        tie_tolerance: impl Fn(usize) -> f64,
        signal_llr: f64,
    ) -> Self {
        let cells = obs_llr.len() * 2;
        let mut actions = vec![0u8; cells];
        let mut posteriors = vec![0.5; cells];
        for (o, &l) in obs_llr.iter().enumerate() {
            let tol = tie_tolerance(o);
            for s in 0..2u8 {
                let k = Self::key(s, o);
                let posterior = if l.is_nan() {
                    0.5
                } else {
                    logistic(l + if s == 1 { signal_llr } else { -signal_llr })
                };
                posteriors[k] = posterior;
                actions[k] = decide(posterior, s, tol);
            }
        }
        DecisionTable {
            vertex,
            observed,
            actions,
            posteriors,
            likelihood: None,
        }
    }

    #[inline]
    pub fn action(&self, own_signal: u8, observation: usize) -> u8 {
        self.actions[Self::key(own_signal, observation)]
    }

    #[inline]
    pub fn posterior(&self, own_signal: u8, observation: usize) -> f64 {
        self.posteriors[Self::key(own_signal, observation)]
    }

    #[inline]
    pub(crate) fn actions_raw(&self) -> &[u8] {
        &self.actions
    }

    pub fn observation_count(&self) -> usize {
        1 << self.observed.len()
    }

    pub fn likelihood(&self) -> Option<&[Vec<f64>; 2]> {
        self.likelihood.as_ref()
    }

    /// Correct-action probability given exact observation likelihoods.
    pub(crate) fn rate_from_likelihood(&self, lik: &[Vec<f64>; 2], q: f64) -> f64 {
        let mut total = 0.0;
        for o in 0..self.observation_count() {
            let (l0, l1) = (lik[0][o], lik[1][o]);
            let hit1 = q * (self.action(1, o) == 1) as u8 as f64 + (1.0 - q) * (self.action(0, o) == 1) as u8 as f64;
            let hit0 = q * (self.action(0, o) == 0) as u8 as f64 + (1.0 - q) * (self.action(1, o) == 0) as u8 as f64;
            total += l1 * hit1 + l0 * hit0;
        }
        0.5 * total
    }
}

/// Decision tables indexed by vertex; entries may be absent when only the
/// tables feeding some target agents were built.
#[derive(Clone, Debug, Default)]
pub struct TableSet {
    tables: Vec<Option<DecisionTable>>,
}

impl TableSet {
    pub(crate) fn with_capacity(n: usize) -> Self {
        TableSet { tables: vec![None; n] }
    }

    pub(crate) fn insert(&mut self, t: DecisionTable) {
        let v = t.vertex;
        self.tables[v] = Some(t);
    }

    pub fn get(&self, v: Vertex) -> Option<&DecisionTable> {
        self.tables[v].as_ref()
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    pub fn into_complete(self) -> Vec<DecisionTable> {
        self.tables
            .into_iter()
            .enumerate()
            .map(|(v, t)| t.unwrap_or_else(|| panic!("no table built for vertex {v}")))
            .collect()
    }
}

/// One private signal per vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignalProfile(pub Vec<u8>);

impl SignalProfile {
    pub fn sample<R: Rng + ?Sized>(n: usize, theta: u8, q: f64, rng: &mut R) -> Self {
        SignalProfile(
            (0..n)
                .map(|_| if rng.gen_bool(q) { theta } else { 1 - theta })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTrace {
    pub theta: u8,
    pub signals: Vec<u8>,
    pub actions: Vec<u8>,
    pub posteriors: Vec<f64>,
}

impl DecisionTrace {
    pub fn correct_fraction(&self) -> f64 {
        if self.actions.is_empty() {
            return 0.0;
        }
        let hits = self.actions.iter().filter(|&&a| a == self.theta).count();
        hits as f64 / self.actions.len() as f64
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("trace serializes")
    }
}

#[inline]
fn observation_index(observed: &[Vertex], actions: &[u8]) -> usize {
    observed
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &u)| acc | ((actions[u] as usize) << j))
}

/// Replays every agent's decision in decision order.
pub fn simulate_sequence(
    view: &OrientedView<'_>,
    tables: &[DecisionTable],
    theta: u8,
    profile: &SignalProfile,
) -> DecisionTrace {
    let n = view.n();
    assert_eq!(tables.len(), n, "one table per vertex");
    assert_eq!(profile.len(), n, "one signal per vertex");
    let mut actions = vec![0u8; n];
    let mut posteriors = vec![0.5; n];
    for &v in view.ordering.sequence() {
        let t = &tables[v];
        let o = observation_index(&t.observed, &actions);
        let s = profile.0[v];
        actions[v] = t.action(s, o);
        posteriors[v] = t.posterior(s, o);
    }
    DecisionTrace {
        theta,
        signals: profile.0.clone(),
        actions,
        posteriors,
    }
}

/// Replays only the agents that have tables; returns their actions
/// (`None` for agents without a table).
pub(crate) fn simulate_partial(ordering: &Ordering, tables: &TableSet, signals: &[u8]) -> Vec<Option<u8>> {
    let mut actions = vec![0u8; signals.len()];
    let mut done = vec![None; signals.len()];
    for &v in ordering.sequence() {
        if let Some(t) = tables.get(v) {
            let o = observation_index(&t.observed, &actions);
            actions[v] = t.action(signals[v], o);
            done[v] = Some(actions[v]);
        }
    }
    done
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decide_examples() {
        assert_eq!(decide(0.9, 0, 1e-12), 1);
        assert_eq!(decide(0.5, 1, 1e-12), 1);
        assert_eq!(decide(0.5, 0, 1e-12), 0);
        assert_eq!(decide(0.3, 1, 1e-12), 0);
        assert_eq!(decide(0.5 + 1e-14, 0, 1e-12), 0);
    }

    #[test]
    fn config_validation() {
        assert!(EngineConfig::exact(0.7).validate().is_ok());
        assert!(EngineConfig::exact(0.5).validate().is_err());
        assert!(EngineConfig::exact(1.0).validate().is_err());
        let mut c = EngineConfig::exact(0.7);
        c.cone_cap = 27;
        assert!(c.validate().is_err());
        let c = EngineConfig::tabulated(0.7).with_obs_cap(17);
        assert!(c.validate().is_err());
    }

    #[test]
    fn source_table_follows_signal() {
        let t = DecisionTable::source(3, 0.7);
        assert_eq!(t.action(0, 0), 0);
        assert_eq!(t.action(1, 0), 1);
        assert!((t.rate_from_likelihood(t.likelihood().unwrap(), 0.7) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn trace_json_shape() {
        let tr = DecisionTrace {
            theta: 1,
            signals: vec![1, 0],
            actions: vec![1, 1],
            posteriors: vec![0.7, 0.5],
        };
        assert_eq!(
            tr.to_json_string(),
            r#"{"theta":1,"signals":[1,0],"actions":[1,1],"posteriors":[0.7,0.5]}"#
        );
    }
}
