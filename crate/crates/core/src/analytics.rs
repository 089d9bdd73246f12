//! Closed-form quantities: majority tails, concentration floors, the
//! fragility threshold and a few graph bounds.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::ordering::Ordering;
use crate::seed::run_trials;

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Probability that the majority of `m` independent signals of quality `q`
/// is correct. For even `m` a tie is broken by a fair coin (the agent's own
/// signal, which is correct half the time given a tie).
pub fn majority_tail(m: u32, q: f64) -> f64 {
    let mut p = 0.0;
    for k in 0..=m {
        let term = binomial(m, k) * q.powi(k as i32) * (1.0 - q).powi((m - k) as i32);
        if 2 * k > m {
            p += term;
        } else if 2 * k == m {
            p += 0.5 * term;
        }
    }
    p
}

/// `1 - exp(-m / (8 q^2))`, the concentration floor used to argue that a
/// celebrity seeing `m` signals is right.
pub fn chernoff_floor(m: f64, q: f64) -> f64 {
    1.0 - (-m / (8.0 * q * q)).exp()
}

/// How the rate of an agent observing four independent sources is written.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceRateForm {
    /// `q^5 + 5 q^4 (1-q) + 10 q^3 (1-q)^2`, the majority-of-five tail.
    Binomial,
    /// `q^5 + 5 q^4 (1-q) + 10 q^3 (1-q^2)`, as sometimes printed.
    Printed,
}

pub fn four_source_rate(q: f64, form: SourceRateForm) -> f64 {
    let head = q.powi(5) + 5.0 * q.powi(4) * (1.0 - q);
    match form {
        SourceRateForm::Binomial => head + 10.0 * q.powi(3) * (1.0 - q).powi(2),
        SourceRateForm::Printed => head + 10.0 * q.powi(3) * (1.0 - q * q),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fragility {
    /// Learns below the threshold: `f(q) = (1-q)^2 ℓ(q)`.
    LowQ,
    /// Learns above the threshold: `g(q) = q (1-q)^3 ℓ(q)`.
    HighQ,
}

/// The weight whose balance `w(q) = w(1-q)` defines the threshold.
pub fn balance_weight(q: f64, variant: Fragility, form: SourceRateForm) -> f64 {
    let l = four_source_rate(q, form);
    match variant {
        Fragility::LowQ => (1.0 - q).powi(2) * l,
        Fragility::HighQ => q * (1.0 - q).powi(3) * l,
    }
}

pub const THRESHOLD_BRACKET: (f64, f64) = (0.6, 0.95);
pub const THRESHOLD_TOL: f64 = 1e-9;

/// Root of `w(q) - w(1-q)` in [`THRESHOLD_BRACKET`] by bisection, or `None`
/// when the bracket holds no sign change.
pub fn threshold_q0_with(variant: Fragility, form: SourceRateForm) -> Option<f64> {
    let h = |q: f64| balance_weight(q, variant, form) - balance_weight(1.0 - q, variant, form);
    let (mut lo, mut hi) = THRESHOLD_BRACKET;
    let (mut hlo, hhi) = (h(lo), h(hi));
    if hlo.signum() == hhi.signum() {
        return None;
    }
    while hi - lo > THRESHOLD_TOL {
        let mid = 0.5 * (lo + hi);
        let hm = h(mid);
        if hm == 0.0 {
            return Some(mid);
        }
        if hm.signum() == hlo.signum() {
            lo = mid;
            hlo = hm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Fragility threshold `q0` with the binomial source rate.
pub fn threshold_q0(variant: Fragility) -> f64 {
    threshold_q0_with(variant, SourceRateForm::Binomial).expect("binomial form brackets a root")
}

/// `Σ_v 1 / (1 + deg v)`, a lower bound on the independence number.
pub fn caro_wei(graph: &Graph) -> f64 {
    (0..graph.n()).map(|v| 1.0 / (1 + graph.degree(v)) as f64).sum()
}

/// `1 - 1/(d+1) - 2 ε ln d` for an agent with `d` neighbors of rate `1 - ε`.
pub fn good_neighborhood_floor(d: usize, eps: f64) -> f64 {
    let df = d as f64;
    1.0 - 1.0 / (df + 1.0) - 2.0 * eps * df.ln()
}

/// `1 - (1 - ℓ(A)) / Pr(A)`, the floor on a rate conditioned on event `A`.
pub fn conditional_floor(rate: f64, event_probability: f64) -> f64 {
    1.0 - (1.0 - rate) / event_probability
}

/// `1 - 4 / (k ε)`.
pub fn concentration_bound(k: usize, eps: f64) -> f64 {
    1.0 - 4.0 / (k as f64 * eps)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationResult {
    pub n: usize,
    pub k: usize,
    pub eps: f64,
    pub samples: usize,
    /// Empirical frequency of `kε/2 ≤ Y ≤ 3kε/2`.
    pub frequency: f64,
    pub bound: f64,
    /// Three binomial standard deviations of the frequency at the bound.
    pub slack: f64,
}

impl ConcentrationResult {
    pub fn holds(&self) -> bool {
        self.frequency >= self.bound - self.slack
    }
}

/// Marks vertices `0..k`, samples orderings, and counts how often the
/// number `Y` of marked vertices among the first `⌊nε⌋` positions lands in
/// `[kε/2, 3kε/2]`.
pub fn sampling_concentration<R: RngCore + ?Sized>(
    n: usize,
    k: usize,
    eps: f64,
    samples: usize,
    rng: &mut R,
) -> ConcentrationResult {
    assert!(k <= n && samples > 0 && eps > 0.0 && eps <= 1.0);
    let cutoff = (n as f64 * eps).floor() as usize;
    let (lo, hi) = (k as f64 * eps / 2.0, 3.0 * k as f64 * eps / 2.0);
    let master = rng.next_u64();
    let hits = run_trials(master, "concentration", samples, |_, rng| {
        let o = Ordering::sample(n, rng);
        let y = o.sequence()[..cutoff].iter().filter(|&&v| v < k).count() as f64;
        (lo <= y && y <= hi) as usize
    })
    .into_iter()
    .sum::<usize>();
    let bound = concentration_bound(k, eps);
    let p = bound.clamp(0.0, 1.0);
    ConcentrationResult {
        n,
        k,
        eps,
        samples,
        frequency: hits as f64 / samples as f64,
        bound,
        slack: 3.0 * (p * (1.0 - p) / samples as f64).sqrt(),
    }
}

/// `1 - (k+1) ε` after `k` vertex modifications.
pub fn vertex_mod_floor(k: usize, eps: f64) -> f64 {
    1.0 - (k as f64 + 1.0) * eps
}

/// `1 - ((2k+1)/2) ε` after `k` edge modifications.
pub fn edge_mod_floor(k: usize, eps: f64) -> f64 {
    1.0 - (2.0 * k as f64 + 1.0) / 2.0 * eps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;

    #[test]
    fn majority_tail_examples() {
        assert!((majority_tail(1, 0.7) - 0.7).abs() < 1e-15);
        assert!((majority_tail(3, 0.7) - 0.784).abs() < 1e-12);
        assert!((majority_tail(5, 0.7) - 0.83692).abs() < 1e-12);
        assert!((majority_tail(5, 0.85) - 0.973388).abs() < 1e-6);
        // A tie between two signals is a coin flip on the own signal.
        assert!((majority_tail(2, 0.7) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn chernoff_examples() {
        assert!(chernoff_floor(0.0, 0.7).abs() < 1e-15);
        assert!((chernoff_floor(16.0, 0.7) - 0.983_129).abs() < 1e-5);
    }

    #[test]
    fn chernoff_floor_is_not_below_majority_for_many_signals() {
        // The floor overshoots the true tail once m is moderately large at
        // weak signal quality, so it cannot be read as a lower bound here.
        assert!(chernoff_floor(25.0, 0.55) > majority_tail(25, 0.55));
        assert!(chernoff_floor(1.0, 0.95) <= majority_tail(1, 0.95));
    }

    #[test]
    fn threshold_matches_closed_form() {
        let q0 = threshold_q0(Fragility::LowQ);
        assert!((q0 - 0.7887).abs() < 5e-4);
        // (3 + √3) / 6 balances (1-q)^2 ℓ(q) exactly.
        assert!((q0 - (3.0 + 3f64.sqrt()) / 6.0).abs() < 1e-8);
        let w = |q| balance_weight(q, Fragility::LowQ, SourceRateForm::Binomial);
        assert!((w(q0) - w(1.0 - q0)).abs() < 1e-9);
        assert!((w(0.6) - w(0.4)).signum() != (w(0.95) - w(0.05)).signum());
        assert!((threshold_q0(Fragility::HighQ) - q0).abs() < 1e-8);
    }

    #[test]
    fn printed_source_rate_has_no_threshold() {
        assert_eq!(threshold_q0_with(Fragility::LowQ, SourceRateForm::Printed), None);
    }

    #[test]
    fn caro_wei_examples() {
        let k4 = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert!((caro_wei(&k4) - 1.0).abs() < 1e-12);
        assert!((caro_wei(&Graph::empty(6)) - 6.0).abs() < 1e-12);
        let star = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert!((caro_wei(&star) - 2.2).abs() < 1e-12);
    }

    #[test]
    fn concentration_frequency_is_sane() {
        let r = sampling_concentration(50, 10, 0.5, 2000, &mut rng_from_seed(1));
        assert!(r.holds(), "{r:?}");
        assert!(r.frequency > 0.5);
    }
}
