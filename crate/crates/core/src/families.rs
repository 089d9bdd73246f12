//! Network families: learning and non-learning constructions, the fragile
//! strategic-order networks, embeddable gadgets and small test graphs.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::ordering::Ordering;

pub mod role {
    pub const CELEBRITY: &str = "celebrity";
    pub const COMMONER: &str = "commoner";
    pub const SPECIAL: &str = "special";
    pub const GUINEA: &str = "guinea";
    pub const APEX: &str = "apex";
    pub const GADGET: &str = "gadget";
    pub const SOURCE: &str = "source";
    pub const HUB: &str = "v";
    pub const W: &str = "w";
    pub const W_PRIME: &str = "w-prime";
    pub const X: &str = "x";
    pub const GADGET_TOP: &str = "gadget-top";
    pub const U0: &str = "u0";
    pub const CHAIN: &str = "chain";
    pub const CENTER: &str = "center";
    pub const LEAF: &str = "leaf";
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyInstance {
    pub family: String,
    pub graph: Graph,
    pub strategic_order: Option<Ordering>,
    pub params: BTreeMap<String, Value>,
}

/// Everything about an instance except its edges.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub family: String,
    pub params: BTreeMap<String, Value>,
    pub roles: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategic_order: Option<Ordering>,
}

impl FamilyInstance {
    fn new(family: &str, graph: Graph, params: Value) -> Self {
        let params = match params {
            Value::Object(m) => m.into_iter().collect(),
            _ => BTreeMap::new(),
        };
        FamilyInstance {
            family: family.to_string(),
            graph,
            strategic_order: None,
            params,
        }
    }

    fn with_order(mut self, order: Ordering) -> Self {
        self.strategic_order = Some(order);
        self
    }

    pub fn roles(&self) -> BTreeMap<Vertex, String> {
        self.graph.labels()
    }

    pub fn with_role(&self, r: &str) -> Vec<Vertex> {
        self.graph.vertices_with_label(r)
    }

    pub fn sidecar(&self) -> Sidecar {
        Sidecar {
            family: self.family.clone(),
            params: self.params.clone(),
            roles: self.roles().into_iter().map(|(v, r)| (v.to_string(), r)).collect(),
            strategic_order: self.strategic_order.clone(),
        }
    }
}

fn complete_edges(n: usize) -> Vec<(Vertex, Vertex)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

fn positive(name: &str, x: usize) -> Result<()> {
    if x == 0 {
        return Err(Error::InvalidParams(format!("{name} must be at least 1")));
    }
    Ok(())
}

pub fn complete(n: usize) -> Result<FamilyInstance> {
    positive("n", n)?;
    let g = Graph::from_edges(n, &complete_edges(n))?;
    Ok(FamilyInstance::new("complete", g, json!({ "n": n })))
}

/// `K_{n-k, k}`: commoners `0..n-k`, celebrities `n-k..n`.
pub fn celebrity(n: usize, k: usize) -> Result<FamilyInstance> {
    if k == 0 || k >= n {
        return Err(Error::InvalidParams(format!("celebrity count {k} must lie in 1..{n}")));
    }
    let c = n - k;
    let edges: Vec<_> = (0..c).flat_map(|u| (c..n).map(move |w| (u, w))).collect();
    let mut g = Graph::from_edges(n, &edges)?;
    for v in 0..n {
        g.set_label(v, if v < c { role::COMMONER } else { role::CELEBRITY });
    }
    Ok(FamilyInstance::new("celebrity", g, json!({ "n": n, "k": k })))
}

/// `K_n` on `0..n` whose first `g` vertices each get `h` degree-one guinea
/// pigs; guinea pig `j` of special `i` is `n + i*h + j`.
pub fn guinea_boosted_complete(n: usize, g: usize, h: usize) -> Result<FamilyInstance> {
    positive("n", n)?;
    positive("h", h)?;
    if g > n {
        return Err(Error::InvalidParams(format!("{g} specials requested in K_{n}")));
    }
    let total = n + g * h;
    let mut edges = complete_edges(n);
    for i in 0..g {
        for j in 0..h {
            edges.push((i, n + i * h + j));
        }
    }
    let mut graph = Graph::from_edges(total, &edges)?;
    for i in 0..g {
        graph.set_label(i, role::SPECIAL);
    }
    for z in n..total {
        graph.set_label(z, role::GUINEA);
    }
    Ok(FamilyInstance::new("guinea", graph, json!({ "n": n, "g": g, "h": h })))
}

/// A graph with an ordering under which `apex` (acting last) learns well.
#[derive(Clone, Debug, PartialEq)]
pub struct Gadget {
    pub graph: Graph,
    pub internal_order: Ordering,
    pub apex: Vertex,
}

/// Complete binary tree of the given depth in heap numbering (root 0,
/// children `2i+1`, `2i+2`), ordered leaves first, level by level, root last.
pub fn binary_tree_gadget(depth: u32) -> Result<Gadget> {
    if depth == 0 || depth > 20 {
        return Err(Error::InvalidParams(format!("tree depth {depth} outside 1..=20")));
    }
    let size = (1usize << depth) - 1;
    let edges: Vec<_> = (1..size).map(|c| ((c - 1) / 2, c)).collect();
    let graph = Graph::from_edges(size, &edges)?;
    let mut order = Vec::with_capacity(size);
    for level in (0..depth).rev() {
        order.extend((1usize << level) - 1..(1usize << (level + 1)) - 1);
    }
    Ok(Gadget {
        graph,
        internal_order: Ordering::from_sequence(order)?,
        apex: 0,
    })
}

/// `K_n` where vertices `0..copies` each become the apex of a private copy
/// of the gadget body. Bodies are numbered consecutively from `n`, each in
/// the gadget's internal order. The strategic order runs every body in its
/// internal order, then `K_n`.
pub fn embedded_boosted_complete(n: usize, copies: usize, gadget: &Gadget) -> Result<FamilyInstance> {
    positive("n", n)?;
    if copies > n {
        return Err(Error::InvalidParams(format!("{copies} copies exceed the {n} vertices of K_n")));
    }
    let body: Vec<Vertex> = gadget
        .internal_order
        .sequence()
        .iter()
        .copied()
        .filter(|&x| x != gadget.apex)
        .collect();
    let b = body.len();
    let total = n + copies * b;
    let mut edges = complete_edges(n);
    let mut order = Vec::with_capacity(total);
    for c in 0..copies {
        let mut id = vec![usize::MAX; gadget.graph.n()];
        id[gadget.apex] = c;
        for (j, &x) in body.iter().enumerate() {
            id[x] = n + c * b + j;
            order.push(n + c * b + j);
        }
        edges.extend(gadget.graph.edges().map(|(x, y)| (id[x], id[y])));
    }
    order.extend(0..n);
    let mut graph = Graph::from_edges(total, &edges)?;
    for c in 0..copies {
        graph.set_label(c, role::APEX);
    }
    for v in n..total {
        graph.set_label(v, role::GADGET);
    }
    let inst = FamilyInstance::new(
        "embedded",
        graph,
        json!({ "n": n, "copies": copies, "gadget_size": gadget.graph.n() }),
    );
    Ok(inst.with_order(Ordering::from_sequence(order)?))
}

/// Ids of the low-q fragile network.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LowQLayout {
    pub k_w: usize,
    pub tail: usize,
}

impl LowQLayout {
    pub fn sources(&self) -> [Vertex; 4] {
        [0, 1, 2, 3]
    }
    pub fn hub(&self) -> Vertex {
        4
    }
    pub fn w_prime(&self, i: usize) -> Vertex {
        5 + 2 * i
    }
    pub fn w(&self, i: usize) -> Vertex {
        6 + 2 * i
    }
    pub fn u0(&self) -> Vertex {
        5 + 2 * self.k_w
    }
    pub fn chain(&self, j: usize) -> Vertex {
        self.u0() + 1 + j
    }
    pub fn n(&self) -> usize {
        self.u0() + 1 + self.tail
    }
}

/// Hub `v` after four sources; `k_w` agents `w_i`, each seeing `v` and a
/// private source `w_i'`; all `w_i` feed `u0`, followed by a chain of
/// `tail` agents. Identity is the strategic order.
pub fn fragile_low_q(k_w: usize, tail: usize) -> Result<FamilyInstance> {
    positive("k_w", k_w)?;
    let l = LowQLayout { k_w, tail };
    let mut edges: Vec<(Vertex, Vertex)> = l.sources().iter().map(|&s| (s, l.hub())).collect();
    for i in 0..k_w {
        edges.push((l.hub(), l.w(i)));
        edges.push((l.w_prime(i), l.w(i)));
        edges.push((l.w(i), l.u0()));
    }
    let mut prev = l.u0();
    for j in 0..tail {
        edges.push((prev, l.chain(j)));
        prev = l.chain(j);
    }
    let mut g = Graph::from_edges(l.n(), &edges)?;
    for s in l.sources() {
        g.set_label(s, role::SOURCE);
    }
    g.set_label(l.hub(), role::HUB);
    for i in 0..k_w {
        g.set_label(l.w_prime(i), role::W_PRIME);
        g.set_label(l.w(i), role::W);
    }
    g.set_label(l.u0(), role::U0);
    for j in 0..tail {
        g.set_label(l.chain(j), role::CHAIN);
    }
    let n = l.n();
    Ok(FamilyInstance::new("fragile-low-q", g, json!({ "k_w": k_w, "tail": tail })).with_order(Ordering::identity(n)))
}

/// Ids of the high-q fragile network.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HighQLayout {
    pub k_w: usize,
    pub tail: usize,
}

impl HighQLayout {
    pub fn x(&self, j: usize) -> Vertex {
        j
    }
    /// `v_{ij}`; `j = 0` is the gadget top, `1..=4` its sources.
    pub fn gadget(&self, i: usize, j: usize) -> Vertex {
        let base = 3 + 5 * i;
        if j == 0 {
            base + 4
        } else {
            base + j - 1
        }
    }
    pub fn w(&self, i: usize) -> Vertex {
        3 + 5 * self.k_w + i
    }
    pub fn u0(&self) -> Vertex {
        3 + 6 * self.k_w
    }
    pub fn chain(&self, j: usize) -> Vertex {
        self.u0() + 1 + j
    }
    pub fn n(&self) -> usize {
        self.u0() + 1 + self.tail
    }
}

/// Shared sources `x1..x3`; per `i` a five-vertex gadget whose top `v_i0`
/// sees four sources; `w_i` sees `x1..x3` and `v_i0`; all `w_i` feed `u0`,
/// then a chain. Identity is the strategic order.
pub fn fragile_high_q(k_w: usize, tail: usize) -> Result<FamilyInstance> {
    positive("k_w", k_w)?;
    let l = HighQLayout { k_w, tail };
    let mut edges = Vec::new();
    for i in 0..k_w {
        for j in 1..=4 {
            edges.push((l.gadget(i, j), l.gadget(i, 0)));
        }
        for x in 0..3 {
            edges.push((l.x(x), l.w(i)));
        }
        edges.push((l.gadget(i, 0), l.w(i)));
        edges.push((l.w(i), l.u0()));
    }
    let mut prev = l.u0();
    for j in 0..tail {
        edges.push((prev, l.chain(j)));
        prev = l.chain(j);
    }
    let mut g = Graph::from_edges(l.n(), &edges)?;
    for x in 0..3 {
        g.set_label(l.x(x), role::X);
    }
    for i in 0..k_w {
        g.set_label(l.gadget(i, 0), role::GADGET_TOP);
        for j in 1..=4 {
            g.set_label(l.gadget(i, j), role::SOURCE);
        }
        g.set_label(l.w(i), role::W);
    }
    g.set_label(l.u0(), role::U0);
    for j in 0..tail {
        g.set_label(l.chain(j), role::CHAIN);
    }
    let n = l.n();
    Ok(FamilyInstance::new("fragile-high-q", g, json!({ "k_w": k_w, "tail": tail })).with_order(Ordering::identity(n)))
}

pub fn path(n: usize) -> Result<FamilyInstance> {
    positive("n", n)?;
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Ok(FamilyInstance::new("path", Graph::from_edges(n, &edges)?, json!({ "n": n })))
}

/// Center 0 with `leaves` leaves.
pub fn star(leaves: usize) -> Result<FamilyInstance> {
    let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
    let mut g = Graph::from_edges(leaves + 1, &edges)?;
    g.set_label(0, role::CENTER);
    for i in 1..=leaves {
        g.set_label(i, role::LEAF);
    }
    Ok(FamilyInstance::new("star", g, json!({ "leaves": leaves })))
}

/// `m` disjoint stars with `leaves` leaves each; star `s` has center
/// `s * (leaves + 1)`.
pub fn star_forest(m: usize, leaves: usize) -> Result<FamilyInstance> {
    positive("m", m)?;
    let one = star(leaves)?.graph;
    let mut g = one.clone();
    for _ in 1..m {
        g = g.disjoint_union(&one);
    }
    Ok(FamilyInstance::new("star-forest", g, json!({ "m": m, "leaves": leaves })))
}

/// `G(n, p)`, each pair independently.
pub fn erdos_renyi<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<FamilyInstance> {
    positive("n", n)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParams(format!("edge probability {p} outside [0, 1]")));
    }
    let edges: Vec<_> = complete_edges(n).into_iter().filter(|_| rng.gen_bool(p)).collect();
    Ok(FamilyInstance::new("erdos-renyi", Graph::from_edges(n, &edges)?, json!({ "n": n, "p": p })))
}
