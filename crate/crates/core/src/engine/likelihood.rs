//! Exact distribution of an observed action vector under a set of tables.
//!
//! The actions in `observed` are functions of the signals of their
//! dependency closure. The closure splits into components that share no
//! signals, so each component is enumerated separately and the resulting
//! distributions multiply.

use crate::error::{Error, Result};
use crate::graph::Vertex;
use crate::ordering::Ordering;

use super::{DecisionTable, TableSet};

/// `[Pr(o | θ=0), Pr(o | θ=1)]` for every observation index `o` over the
/// vertices `observed` (bit `j` = action of `observed[j]`).
pub(crate) fn observation_likelihood(
    ordering: &Ordering,
    tables: &TableSet,
    observed: &[Vertex],
    q: f64,
    component_cap: usize,
) -> Result<[Vec<f64>; 2]> {
    let n = tables.len();
    let mut in_closure = vec![false; n];
    let mut closure = Vec::new();
    let mut stack: Vec<Vertex> = observed.to_vec();
    for &u in observed {
        in_closure[u] = true;
    }
    while let Some(u) = stack.pop() {
        closure.push(u);
        let t = tables
            .get(u)
            .unwrap_or_else(|| panic!("table for vertex {u} missing from dependency closure"));
        for &w in &t.observed {
            if !in_closure[w] {
                in_closure[w] = true;
                stack.push(w);
            }
        }
    }

    // Components of the closure under "observes" links.
    let mut comp = vec![usize::MAX; n];
    let mut members: Vec<Vec<Vertex>> = Vec::new();
    let mut users: Vec<Vec<Vertex>> = vec![Vec::new(); n];
    for &u in &closure {
        for &w in &tables.get(u).unwrap().observed {
            users[w].push(u);
        }
    }
    for &start in &closure {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = members.len();
        let mut group = vec![start];
        comp[start] = id;
        let mut i = 0;
        while i < group.len() {
            let x = group[i];
            i += 1;
            let t = tables.get(x).unwrap();
            for &y in t.observed.iter().chain(users[x].iter()) {
                if comp[y] == usize::MAX {
                    comp[y] = id;
                    group.push(y);
                }
            }
        }
        group.sort_unstable_by_key(|&x| ordering.position(x));
        members.push(group);
    }

    let k = observed.len();
    let mut result = [vec![0.0; 1 << k], vec![0.0; 1 << k]];
    result[0][0] = 1.0;
    result[1][0] = 1.0;
    // Bits of the global observation index already filled by earlier components.
    let mut filled: Vec<usize> = Vec::new();
    for group in &members {
        if group.len() > component_cap {
            let vertex = *observed.iter().find(|&&u| comp[u] == comp[group[0]]).unwrap();
            return Err(Error::ConeCapExceeded {
                vertex,
                size: group.len(),
                cap: component_cap,
            });
        }
        let targets: Vec<(usize, usize)> = observed
            .iter()
            .enumerate()
            .filter(|(_, &u)| comp[u] == comp[group[0]])
            .map(|(j, &u)| (j, group.iter().position(|&x| x == u).unwrap()))
            .collect();
        let local = component_distribution(group, tables, &targets, q);
        // Multiply in: new[o_prev | o_local] = old[o_prev] * local[o_local].
        let local_bits: Vec<usize> = targets.iter().map(|&(j, _)| j).collect();
        for theta in 0..2 {
            let old = std::mem::replace(&mut result[theta], vec![0.0; 1 << k]);
            for prev in subsets_of(&filled) {
                let p = old[prev];
                if p == 0.0 {
                    continue;
                }
                for (lo, &lp) in local[theta].iter().enumerate() {
                    if lp == 0.0 {
                        continue;
                    }
                    let mut o = prev;
                    for (b, &j) in local_bits.iter().enumerate() {
                        o |= ((lo >> b) & 1) << j;
                    }
                    result[theta][o] += p * lp;
                }
            }
        }
        filled.extend(local_bits);
    }
    Ok(result)
}

/// All masks composed of bits from `bits`.
fn subsets_of(bits: &[usize]) -> impl Iterator<Item = usize> + '_ {
    (0usize..1 << bits.len()).map(move |m| {
        bits.iter()
            .enumerate()
            .fold(0, |acc, (b, &j)| acc | (((m >> b) & 1) << j))
    })
}

/// Enumerates every signal assignment of one component (vertices in
/// decision order) and tallies the joint distribution of the target
/// actions; `targets` holds (output bit, local index) pairs.
fn component_distribution(
    group: &[Vertex],
    tables: &TableSet,
    targets: &[(usize, usize)],
    q: f64,
) -> [Vec<f64>; 2] {
    let c = group.len();
    let local_of = |v: Vertex| group.iter().position(|&x| x == v).unwrap();
    let plan: Vec<(&DecisionTable, Vec<usize>)> = group
        .iter()
        .map(|&v| {
            let t = tables.get(v).unwrap();
            (t, t.observed.iter().map(|&u| local_of(u)).collect())
        })
        .collect();
    let pq: Vec<f64> = (0..=c).map(|i| q.powi(i as i32)).collect();
    let pnq: Vec<f64> = (0..=c).map(|i| (1.0 - q).powi(i as i32)).collect();
    let mut out = [vec![0.0; 1 << targets.len()], vec![0.0; 1 << targets.len()]];
    let mut act = vec![0u8; c];
    for mask in 0u64..1u64 << c {
        for (i, (t, obs)) in plan.iter().enumerate() {
            let o = obs
                .iter()
                .enumerate()
                .fold(0usize, |acc, (j, &l)| acc | ((act[l] as usize) << j));
            act[i] = t.actions_raw()[(o << 1) | ((mask >> i) & 1) as usize];
        }
        let ones = mask.count_ones() as usize;
        let key = targets
            .iter()
            .enumerate()
            .fold(0usize, |acc, (b, &(_, l))| acc | ((act[l] as usize) << b));
        out[1][key] += pq[ones] * pnq[c - ones];
        out[0][key] += pnq[ones] * pq[c - ones];
    }
    out
}

/// Exact correct-action probability of `v` under an arbitrary table set.
pub fn policy_rate(ordering: &Ordering, tables: &TableSet, v: Vertex, q: f64, component_cap: usize) -> Result<f64> {
    let t = tables
        .get(v)
        .ok_or_else(|| Error::InvalidParams(format!("no table for vertex {v}")))?;
    if let Some(lik) = t.likelihood() {
        return Ok(t.rate_from_likelihood(lik, q));
    }
    let lik = observation_likelihood(ordering, tables, &t.observed, q, component_cap)?;
    Ok(t.rate_from_likelihood(&lik, q))
}

/// Exact correct-action probability of every agent under complete tables.
pub fn policy_rates(ordering: &Ordering, tables: &[DecisionTable], q: f64, component_cap: usize) -> Result<Vec<f64>> {
    let mut set = TableSet::with_capacity(tables.len());
    for t in tables {
        set.insert(t.clone());
    }
    (0..tables.len())
        .map(|v| policy_rate(ordering, &set, v, q, component_cap))
        .collect()
}
