//! Brute-force Bayesian agents: every agent's posterior is computed by
//! summing over all `2^n` signal profiles, with no cone restriction and no
//! factorization.

#![allow(dead_code)]

use std::collections::HashMap;

use netlearn::graph::{Graph, Vertex};
use netlearn::ordering::Ordering;

pub const EPS: f64 = 1e-12;

pub struct BruteForce {
    /// `actions[profile][v]`, bit `v` of `profile` being `v`'s signal.
    pub actions: Vec<Vec<u8>>,
    /// Per vertex: the prior neighbors observed, ascending.
    pub observed: Vec<Vec<Vertex>>,
    /// Per vertex: `(own signal, observation bits) -> Pr(θ = 1)` for every
    /// reachable cell.
    pub posteriors: Vec<HashMap<(u8, usize), f64>>,
    /// `ℓ_σ(v)`.
    pub rates: Vec<f64>,
}

fn profile_weight(p: usize, n: usize, theta: u8, q: f64) -> f64 {
    (0..n).map(|v| if (p >> v & 1) as u8 == theta { q } else { 1.0 - q }).product()
}

pub fn brute_force(g: &Graph, o: &Ordering, q: f64) -> BruteForce {
    let n = g.n();
    assert!(n <= 12);
    let np = 1usize << n;
    let w: [Vec<f64>; 2] = [
        (0..np).map(|p| profile_weight(p, n, 0, q)).collect(),
        (0..np).map(|p| profile_weight(p, n, 1, q)).collect(),
    ];
    let mut actions = vec![vec![0u8; n]; np];
    let mut observed = vec![Vec::new(); n];
    let mut posteriors = vec![HashMap::new(); n];
    for &v in o.sequence() {
        let mut prior: Vec<Vertex> = g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| o.position(u) < o.position(v))
            .collect();
        prior.sort_unstable();
        let key = |p: usize, acts: &Vec<u8>| {
            let obs = prior.iter().enumerate().fold(0usize, |m, (j, &u)| m | (acts[u] as usize) << j);
            ((p >> v & 1) as u8, obs)
        };
        let mut mass: HashMap<(u8, usize), [f64; 2]> = HashMap::new();
        for p in 0..np {
            let e = mass.entry(key(p, &actions[p])).or_insert([0.0; 2]);
            e[0] += w[0][p];
            e[1] += w[1][p];
        }
        let post: HashMap<(u8, usize), f64> = mass.iter().map(|(&k, m)| (k, m[1] / (m[0] + m[1]))).collect();
        for p in 0..np {
            let k = key(p, &actions[p]);
            let x = post[&k];
            actions[p][v] = if x > 0.5 + EPS {
                1
            } else if x < 0.5 - EPS {
                0
            } else {
                k.0
            };
        }
        observed[v] = prior;
        posteriors[v] = post;
    }
    let rates = (0..n)
        .map(|v| {
            (0..np)
                .map(|p| {
                    let a = actions[p][v];
                    0.5 * if a == 1 { w[1][p] } else { w[0][p] }
                })
                .sum()
        })
        .collect();
    BruteForce { actions, observed, posteriors, rates }
}

/// Random-order rate of every vertex, averaging brute force over all `n!`
/// orderings.
pub fn brute_force_random(g: &Graph, q: f64) -> Vec<f64> {
    let n = g.n();
    let all: Vec<Ordering> = netlearn::ordering::enumerate_orderings(n).unwrap().collect();
    let mut acc = vec![0.0; n];
    for o in &all {
        for (a, r) in acc.iter_mut().zip(brute_force(g, o, q).rates) {
            *a += r;
        }
    }
    acc.iter().map(|a| a / all.len() as f64).collect()
}

pub fn complete(n: usize) -> Graph {
    let e: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    Graph::from_edges(n, &e).unwrap()
}
