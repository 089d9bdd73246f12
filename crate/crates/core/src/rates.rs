//! Learning-rate estimation: fixed-order, random-order, positional and
//! conditional rates, plus learning oracles.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::engine::{
    build_tabulated_subset, exact_rate_fixed, exact_rates_all, simulate_partial, EngineConfig, EngineMode,
    SignalProfile,
};
use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::ordering::{enumerate_orderings, Ordering, OrientedView};
use crate::seed::{run_trials, TrialRng};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Every ordering and signal profile enumerated.
    ExactEnum,
    /// Sampled orderings, exact rate per ordering.
    McOrderings,
    /// Sampled orderings and signal profiles.
    McFull,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ExactEnum => "exact-enum",
            Method::McOrderings => "mc-orderings",
            Method::McFull => "mc-full",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub mean: f64,
    /// 95% confidence half-width; zero for exact values.
    pub half_width: f64,
    pub samples: u64,
    pub method: Method,
}

impl RateEstimate {
    pub fn exact(mean: f64, samples: u64) -> Self {
        RateEstimate {
            mean,
            half_width: 0.0,
            samples,
            method: Method::ExactEnum,
        }
    }

    /// Mean of per-trial values in `[0, 1]` with a normal-approximation
    /// interval, widened to the Wilson interval when the mean sits within a
    /// handful of samples of 0 or 1.
    pub fn from_values(values: &[f64], method: Method) -> Self {
        let n = values.len();
        assert!(n > 0, "estimate needs at least one trial");
        let nf = n as f64;
        let mean = values.iter().sum::<f64>() / nf;
        let half_width = if n == 1 {
            1.0
        } else {
            let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (nf - 1.0);
            let normal = Z95 * (var / nf).sqrt();
            if mean * nf < 5.0 || (1.0 - mean) * nf < 5.0 {
                normal.max(wilson_half_width(mean, n))
            } else {
                normal
            }
        };
        RateEstimate {
            mean,
            half_width,
            samples: n as u64,
            method,
        }
    }

    pub fn lower(&self) -> f64 {
        self.mean - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.half_width
    }

    /// True when the two 95% intervals are disjoint.
    pub fn separated_from(&self, other: &RateEstimate) -> bool {
        self.lower() > other.upper() || other.lower() > self.upper()
    }
}

/// Half-width of the 95% Wilson score interval for a proportion.
pub fn wilson_half_width(p: f64, n: usize) -> f64 {
    let nf = n as f64;
    let z2 = Z95 * Z95;
    Z95 / (1.0 + z2 / nf) * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt()
}

/// `Σ_{u ∈ N(v)} 1 / deg(u)`.
pub fn first_learner_score(graph: &Graph, v: Vertex) -> f64 {
    graph.neighbors(v).iter().map(|&u| 1.0 / graph.degree(u) as f64).sum()
}

pub fn first_learner_scores(graph: &Graph) -> Vec<f64> {
    (0..graph.n()).map(|v| first_learner_score(graph, v)).collect()
}

/// The rate of `v` under one ordering: exact when the engine is exact and
/// the cone fits, otherwise a 0/1 outcome of one tabulated run. The flag
/// reports whether simulation was used.
pub fn ordering_outcome<R: Rng + ?Sized>(
    graph: &Graph,
    ordering: &Ordering,
    v: Vertex,
    cfg: &EngineConfig,
    rng: &mut R,
) -> Result<(f64, bool)> {
    let view = OrientedView::new(graph, ordering);
    if cfg.mode == EngineMode::Exact {
        match exact_rate_fixed(&view, v, cfg) {
            Ok(r) => return Ok((r, false)),
            Err(Error::ConeCapExceeded { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let tables = build_tabulated_subset(&view, cfg, &[v], rng);
    let theta = rng.gen_range(0..2u8);
    let profile = SignalProfile::sample(graph.n(), theta, cfg.q, rng);
    let actions = simulate_partial(ordering, &tables, &profile.0);
    Ok(((actions[v] == Some(theta)) as u8 as f64, true))
}

/// Mean correctness over all vertices under one ordering; exact when
/// possible, otherwise one shared tabulated run.
pub fn ordering_graph_outcome<R: Rng + ?Sized>(
    graph: &Graph,
    ordering: &Ordering,
    cfg: &EngineConfig,
    rng: &mut R,
) -> Result<(f64, bool)> {
    let n = graph.n();
    let view = OrientedView::new(graph, ordering);
    if cfg.mode == EngineMode::Exact {
        match exact_rates_all(&view, cfg) {
            Ok(r) => return Ok((r.iter().sum::<f64>() / n as f64, false)),
            Err(Error::ConeCapExceeded { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let all: Vec<Vertex> = (0..n).collect();
    let tables = build_tabulated_subset(&view, cfg, &all, rng);
    let theta = rng.gen_range(0..2u8);
    let profile = SignalProfile::sample(n, theta, cfg.q, rng);
    let actions = simulate_partial(ordering, &tables, &profile.0);
    let hits = actions.iter().filter(|&&a| a == Some(theta)).count();
    Ok((hits as f64 / n as f64, true))
}

fn collect(outcomes: Vec<Result<(f64, bool)>>) -> Result<RateEstimate> {
    let mut values = Vec::with_capacity(outcomes.len());
    let mut simulated = false;
    for o in outcomes {
        let (x, s) = o?;
        values.push(x);
        simulated |= s;
    }
    let method = if simulated { Method::McFull } else { Method::McOrderings };
    Ok(RateEstimate::from_values(&values, method))
}

fn check_vertex(graph: &Graph, v: Vertex) -> Result<()> {
    if v >= graph.n() {
        return Err(Error::InvalidParams(format!("vertex {v} not in a graph on {} vertices", graph.n())));
    }
    Ok(())
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be at least 1".into()));
    }
    Ok(())
}

fn enumerable(graph: &Graph, cfg: &EngineConfig) -> bool {
    cfg.mode == EngineMode::Exact && graph.n() <= cfg.enum_cap
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// `ℓ_σ(v)` under one fixed ordering: exact when the engine is exact and
/// the cone fits, otherwise tables are estimated once and `trials` signal
/// profiles are replayed through them.
pub fn rate_fixed<R: RngCore + ?Sized>(
    graph: &Graph,
    ordering: &Ordering,
    v: Vertex,
    cfg: &EngineConfig,
    trials: usize,
    rng: &mut R,
) -> Result<RateEstimate> {
    cfg.validate()?;
    check_vertex(graph, v)?;
    let view = OrientedView::new(graph, ordering);
    if cfg.mode == EngineMode::Exact {
        match exact_rate_fixed(&view, v, cfg) {
            Ok(r) => return Ok(RateEstimate::exact(r, 1u64 << (view.ancestor_cone(v).len() + 1))),
            Err(Error::ConeCapExceeded { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    check_trials(trials)?;
    let mut build_rng = crate::seed::rng_from_seed(rng.next_u64());
    let tables = build_tabulated_subset(&view, cfg, &[v], &mut build_rng);
    let master = rng.next_u64();
    let n = graph.n();
    let values = run_trials(master, "rate-fixed", trials, |_, rng: &mut TrialRng| {
        let theta = rng.gen_range(0..2u8);
        let profile = SignalProfile::sample(n, theta, cfg.q, rng);
        (simulate_partial(ordering, &tables, &profile.0)[v] == Some(theta)) as u8 as f64
    });
    Ok(RateEstimate::from_values(&values, Method::McFull))
}

/// `ℓ(v)`: rate of `v` under a uniformly random ordering.
pub fn rate_random<R: RngCore + ?Sized>(
    graph: &Graph,
    v: Vertex,
    cfg: &EngineConfig,
    trials: usize,
    rng: &mut R,
) -> Result<RateEstimate> {
    cfg.validate()?;
    check_vertex(graph, v)?;
    check_trials(trials)?;
    if enumerable(graph, cfg) {
        if let Some(mean) = exact_mean(graph, |o| {
            exact_rate_fixed(&OrientedView::new(graph, o), v, cfg)
        })? {
            return Ok(RateEstimate::exact(mean, factorial(graph.n())));
        }
    }
    let master = rng.next_u64();
    let n = graph.n();
    collect(run_trials(master, "rate-random", trials, |_, rng: &mut TrialRng| {
        let o = Ordering::sample(n, rng);
        ordering_outcome(graph, &o, v, cfg, rng)
    }))
}

/// Averages `f` over all orderings; `None` when some cone is too large.
fn exact_mean(graph: &Graph, f: impl Fn(&Ordering) -> Result<f64>) -> Result<Option<f64>> {
    let mut total = 0.0;
    let mut count = 0usize;
    for o in enumerate_orderings(graph.n())? {
        match f(&o) {
            Ok(r) => total += r,
            Err(Error::ConeCapExceeded { .. }) => return Ok(None),
            Err(e) => return Err(e),
        }
        count += 1;
    }
    Ok(Some(total / count as f64))
}

/// Exact `ℓ(v)` by enumerating orderings; fails above `cfg.enum_cap`.
pub fn rate_random_exact(graph: &Graph, v: Vertex, cfg: &EngineConfig) -> Result<f64> {
    check_vertex(graph, v)?;
    if graph.n() > cfg.enum_cap {
        return Err(Error::EnumerationCap { n: graph.n(), cap: cfg.enum_cap });
    }
    let mut total = 0.0;
    let mut count = 0usize;
    for o in enumerate_orderings(graph.n())? {
        total += exact_rate_fixed(&OrientedView::new(graph, &o), v, cfg)?;
        count += 1;
    }
    Ok(total / count as f64)
}

/// `L(G)`: expected fraction of correct agents under a random ordering.
pub fn graph_rate<R: RngCore + ?Sized>(
    graph: &Graph,
    cfg: &EngineConfig,
    trials: usize,
    rng: &mut R,
) -> Result<RateEstimate> {
    cfg.validate()?;
    check_trials(trials)?;
    let n = graph.n();
    if n == 0 {
        return Err(Error::InvalidParams("graph has no vertices".into()));
    }
    if enumerable(graph, cfg) {
        if let Some(mean) = exact_mean(graph, |o| {
            let r = exact_rates_all(&OrientedView::new(graph, o), cfg)?;
            Ok(r.iter().sum::<f64>() / n as f64)
        })? {
            return Ok(RateEstimate::exact(mean, factorial(n)));
        }
    }
    let master = rng.next_u64();
    collect(run_trials(master, "graph-rate", trials, |_, rng: &mut TrialRng| {
        let o = Ordering::sample(n, rng);
        ordering_graph_outcome(graph, &o, cfg, rng)
    }))
}

/// `ℓ(v | σ(v) = index)` with a 1-based index.
pub fn positional_rate<R: RngCore + ?Sized>(
    graph: &Graph,
    v: Vertex,
    cfg: &EngineConfig,
    index: usize,
    trials: usize,
    rng: &mut R,
) -> Result<RateEstimate> {
    cfg.validate()?;
    check_vertex(graph, v)?;
    let n = graph.n();
    if index == 0 || index > n {
        return Err(Error::InvalidParams(format!("index {index} outside 1..={n}")));
    }
    if enumerable(graph, cfg) {
        if let Ok(mean) = positional_rate_exact(graph, v, cfg, index) {
            return Ok(RateEstimate::exact(mean, factorial(n - 1)));
        }
    }
    check_trials(trials)?;
    let master = rng.next_u64();
    collect(run_trials(master, "positional-rate", trials, |_, rng: &mut TrialRng| {
        let o = Ordering::sample_pinned(n, v, index - 1, rng);
        ordering_outcome(graph, &o, v, cfg, rng)
    }))
}

/// Exact positional rate by enumerating the `(n-1)!` pinned orderings.
pub fn positional_rate_exact(graph: &Graph, v: Vertex, cfg: &EngineConfig, index: usize) -> Result<f64> {
    check_vertex(graph, v)?;
    let n = graph.n();
    if index == 0 || index > n {
        return Err(Error::InvalidParams(format!("index {index} outside 1..={n}")));
    }
    let mut total = 0.0;
    let mut count = 0usize;
    for rest in enumerate_orderings(n - 1)? {
        let mut seq: Vec<Vertex> = rest.sequence().iter().map(|&u| if u >= v { u + 1 } else { u }).collect();
        seq.insert(index - 1, v);
        let o = Ordering::from_sequence(seq)?;
        total += exact_rate_fixed(&OrientedView::new(graph, &o), v, cfg)?;
        count += 1;
    }
    Ok(total / count as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalEstimate {
    pub estimate: RateEstimate,
    /// Empirical (or exact) probability of the conditioning event.
    pub event_probability: f64,
    pub attempts: u64,
}

/// Orderings drawn per requested trial before rejection sampling gives up.
pub const REJECTION_BUDGET: usize = 1000;

/// `ℓ(v | A)` by rejection sampling orderings satisfying `event`.
pub fn conditional_rate<R, P>(
    graph: &Graph,
    v: Vertex,
    cfg: &EngineConfig,
    event: P,
    trials: usize,
    rng: &mut R,
) -> Result<ConditionalEstimate>
where
    R: RngCore + ?Sized,
    P: Fn(&Ordering) -> bool,
{
    cfg.validate()?;
    check_vertex(graph, v)?;
    check_trials(trials)?;
    let n = graph.n();
    let mut sampler = crate::seed::rng_from_seed(rng.next_u64());
    let eval_master = rng.next_u64();
    let budget = trials.saturating_mul(REJECTION_BUDGET);
    let mut accepted = Vec::with_capacity(trials);
    let mut attempts = 0usize;
    while accepted.len() < trials && attempts < budget {
        attempts += 1;
        let o = Ordering::sample(n, &mut sampler);
        if event(&o) {
            accepted.push(o);
        }
    }
    if accepted.is_empty() {
        return Err(Error::PredicateNeverSatisfied { attempts });
    }
    let estimate = collect(run_trials(eval_master, "conditional-rate", accepted.len(), |i, rng: &mut TrialRng| {
        ordering_outcome(graph, &accepted[i], v, cfg, rng)
    }))?;
    Ok(ConditionalEstimate {
        estimate,
        event_probability: accepted.len() as f64 / attempts as f64,
        attempts: attempts as u64,
    })
}

/// Exact `(ℓ(v | A), Pr(A))` over all orderings.
pub fn conditional_rate_exact<P: Fn(&Ordering) -> bool>(
    graph: &Graph,
    v: Vertex,
    cfg: &EngineConfig,
    event: P,
) -> Result<(f64, f64)> {
    check_vertex(graph, v)?;
    let mut total = 0.0;
    let mut hits = 0usize;
    let mut count = 0usize;
    for o in enumerate_orderings(graph.n())? {
        count += 1;
        if event(&o) {
            hits += 1;
            total += exact_rate_fixed(&OrientedView::new(graph, &o), v, cfg)?;
        }
    }
    if hits == 0 {
        return Err(Error::PredicateNeverSatisfied { attempts: count });
    }
    Ok((total / hits as f64, hits as f64 / count as f64))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleKind {
    Exact,
    Mc,
    Heuristic,
    Labels,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub kind: OracleKind,
    /// Rate threshold `t` in (0, 1).
    pub threshold: f64,
    /// First-learner score cutoff for the heuristic kind.
    pub tau: f64,
    pub trials: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Vertex>>,
}

impl OracleConfig {
    pub fn new(kind: OracleKind) -> Self {
        OracleConfig {
            kind,
            threshold: 0.9,
            tau: 8.0,
            trials: 500,
            labels: None,
        }
    }

    pub fn heuristic(tau: f64) -> Self {
        OracleConfig { tau, ..Self::new(OracleKind::Heuristic) }
    }

    pub fn labels(learners: Vec<Vertex>) -> Self {
        OracleConfig {
            labels: Some(learners),
            ..Self::new(OracleKind::Labels)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::InvalidConfig(format!("oracle threshold {} outside (0, 1)", self.threshold)));
        }
        match self.kind {
            OracleKind::Heuristic if !(self.tau > 0.0) => {
                Err(Error::InvalidConfig("heuristic oracle needs tau > 0".into()))
            }
            OracleKind::Mc if self.trials == 0 => Err(Error::InvalidConfig("mc oracle needs trials > 0".into())),
            OracleKind::Labels if self.labels.is_none() => {
                Err(Error::InvalidConfig("labels oracle needs a learner set".into()))
            }
            _ => Ok(()),
        }
    }
}

/// `f(v, t)`: whether `v` is judged to learn at rate at least `t`.
pub fn learning_oracle<R: RngCore + ?Sized>(
    graph: &Graph,
    v: Vertex,
    oracle: &OracleConfig,
    cfg: &EngineConfig,
    rng: &mut R,
) -> Result<bool> {
    oracle.validate()?;
    check_vertex(graph, v)?;
    match oracle.kind {
        OracleKind::Exact => {
            let exact = EngineConfig { mode: EngineMode::Exact, ..cfg.clone() };
            Ok(rate_random_exact(graph, v, &exact)? >= oracle.threshold)
        }
        OracleKind::Mc => {
            let est = rate_random(graph, v, cfg, oracle.trials, rng)?;
            Ok(est.lower() >= oracle.threshold)
        }
        OracleKind::Heuristic => Ok(heuristic_learner(graph, v, oracle.tau, &first_learner_scores(graph))),
        OracleKind::Labels => Ok(oracle.labels.as_ref().unwrap().contains(&v)),
    }
}

fn heuristic_learner(graph: &Graph, v: Vertex, tau: f64, scores: &[f64]) -> bool {
    if scores[v] >= tau {
        return true;
    }
    let good = graph.neighbors(v).iter().filter(|&&u| scores[u] >= tau).count();
    good as f64 >= tau
}

/// Every vertex the oracle accepts, ascending.
pub fn learners<R: RngCore + ?Sized>(
    graph: &Graph,
    oracle: &OracleConfig,
    cfg: &EngineConfig,
    rng: &mut R,
) -> Result<Vec<Vertex>> {
    oracle.validate()?;
    if oracle.kind == OracleKind::Heuristic {
        let scores = first_learner_scores(graph);
        return Ok((0..graph.n())
            .filter(|&v| heuristic_learner(graph, v, oracle.tau, &scores))
            .collect());
    }
    let master = rng.next_u64();
    let mut out = Vec::new();
    for v in 0..graph.n() {
        let mut r = crate::seed::derive_rng(master, "oracle", v as u64);
        if learning_oracle(graph, v, oracle, cfg, &mut r)? {
            out.push(v);
        }
    }
    Ok(out)
}

/// Complement of [`learners`]: the set `V'` the booster must cover.
pub fn non_learners<R: RngCore + ?Sized>(
    graph: &Graph,
    oracle: &OracleConfig,
    cfg: &EngineConfig,
    rng: &mut R,
) -> Result<Vec<Vertex>> {
    let good = learners(graph, oracle, cfg, rng)?;
    Ok((0..graph.n()).filter(|v| good.binary_search(v).is_err()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;

    fn path(n: usize) -> Graph {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &e).unwrap()
    }

    fn complete(n: usize) -> Graph {
        let e: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph::from_edges(n, &e).unwrap()
    }

    #[test]
    fn trivial_graphs_rate_q() {
        let cfg = EngineConfig::exact(0.7);
        let mut rng = rng_from_seed(1);
        let r = rate_random(&Graph::empty(1), 0, &cfg, 10, &mut rng).unwrap();
        assert_eq!(r.method, Method::ExactEnum);
        assert!((r.mean - 0.7).abs() < 1e-12);
        let r = rate_random(&Graph::empty(2), 1, &cfg, 10, &mut rng).unwrap();
        assert!((r.mean - 0.7).abs() < 1e-12);
        let r = rate_random(&complete(2), 0, &cfg, 10, &mut rng).unwrap();
        assert!((r.mean - 0.7).abs() < 1e-12);
        let l = graph_rate(&complete(2), &cfg, 10, &mut rng).unwrap();
        assert!((l.mean - 0.7).abs() < 1e-12);
        let l = graph_rate(&Graph::empty(9), &cfg, 50, &mut rng).unwrap();
        assert!((l.mean - 0.7).abs() < 1e-12);
    }

    #[test]
    fn positional_examples() {
        let cfg = EngineConfig::exact(0.7);
        let mut rng = rng_from_seed(2);
        let k3 = complete(3);
        let r: Vec<f64> = (1..=3)
            .map(|i| positional_rate(&k3, 0, &cfg, i, 1, &mut rng).unwrap().mean)
            .collect();
        assert!((r[0] - 0.7).abs() < 1e-12);
        assert!(r[0] <= r[1] + 1e-12 && r[1] <= r[2] + 1e-12, "{r:?}");
        // Middle of a path acting last: majority of three signals.
        let p = positional_rate(&path(3), 1, &cfg, 3, 1, &mut rng).unwrap();
        assert!((p.mean - 0.784).abs() < 1e-12, "{}", p.mean);
        assert!(positional_rate(&k3, 0, &cfg, 0, 1, &mut rng).is_err());
    }

    #[test]
    fn conditional_examples() {
        let g = path(5);
        let cfg = EngineConfig::exact(0.7);
        let mut rng = rng_from_seed(3);
        let c = conditional_rate(&g, 2, &cfg, |o: &Ordering| o.position(2) == 0, 50, &mut rng).unwrap();
        assert!((c.estimate.mean - 0.7).abs() < 1e-12);
        assert!((c.event_probability - 0.2).abs() < 0.1);
        let never = conditional_rate(&g, 2, &cfg, |_: &Ordering| false, 2, &mut rng);
        assert!(matches!(never, Err(Error::PredicateNeverSatisfied { attempts: 2000 })));
    }

    #[test]
    fn scores_and_oracles() {
        let star = Graph::from_edges(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]).unwrap();
        assert!((first_learner_score(&star, 0) - 5.0).abs() < 1e-12);
        assert!((first_learner_score(&complete(7), 3) - 1.0).abs() < 1e-12);
        let cfg = EngineConfig::exact(0.6);
        let mut rng = rng_from_seed(4);
        assert!(learning_oracle(&star, 0, &OracleConfig::heuristic(5.0), &cfg, &mut rng).unwrap());
        assert!(!learning_oracle(&complete(12), 0, &OracleConfig::heuristic(10.0), &cfg, &mut rng).unwrap());
        let mut mc = OracleConfig::new(OracleKind::Mc);
        mc.trials = 20;
        assert!(!learning_oracle(&Graph::empty(1), 0, &mc, &cfg, &mut rng).unwrap());
        let exact = OracleConfig::new(OracleKind::Exact);
        assert!(matches!(
            learning_oracle(&Graph::empty(7), 0, &exact, &cfg, &mut rng),
            Err(Error::EnumerationCap { n: 7, cap: 6 })
        ));
        let lab = OracleConfig::labels(vec![1, 3]);
        assert_eq!(learners(&path(4), &lab, &cfg, &mut rng).unwrap(), vec![1, 3]);
        assert_eq!(non_learners(&path(4), &lab, &cfg, &mut rng).unwrap(), vec![0, 2]);
    }

    #[test]
    fn interval_widens_near_boundary() {
        let all_ones = vec![1.0; 40];
        let e = RateEstimate::from_values(&all_ones, Method::McFull);
        assert_eq!(e.mean, 1.0);
        assert!(e.half_width > 0.0);
        let mixed: Vec<f64> = (0..1000).map(|i| (i % 2) as f64).collect();
        let e = RateEstimate::from_values(&mixed, Method::McFull);
        assert!((e.half_width - Z95 * (0.25f64 * 1000.0 / 999.0 / 1000.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_tracks_exact_value() {
        let g = Graph::from_edges(7, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (0, 6), (1, 4)]).unwrap();
        let cfg = EngineConfig::exact(0.7);
        let mut small = cfg.clone();
        small.enum_cap = 7;
        let exact = rate_random(&g, 1, &small, 1, &mut rng_from_seed(0)).unwrap();
        assert_eq!(exact.method, Method::ExactEnum);
        let mc = rate_random(&g, 1, &cfg, 4000, &mut rng_from_seed(5)).unwrap();
        assert_eq!(mc.method, Method::McOrderings);
        assert!((mc.mean - exact.mean).abs() <= mc.half_width * 1.5, "{mc:?} vs {exact:?}");
    }
}
