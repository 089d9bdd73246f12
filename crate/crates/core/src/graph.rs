//! Simple undirected graphs with optional role labels, plus the pure
//! modification operations used by the robustness experiments.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;

pub type Vertex = usize;

/// A simple undirected graph on vertices `0..n`.
///
/// Neighbor lists are kept sorted and symmetric; self-loops and parallel
/// edges are rejected at construction time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    labels: Vec<Option<String>>,
    edge_count: usize,
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            labels: vec![None; n],
            edge_count: 0,
        }
    }

    /// Validates and builds a graph. Each failure mode has its own error.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let (a, b) = (u.min(w[0]), u.max(w[0]));
                return Err(GraphError::DuplicateEdge(a, b));
            }
        }
        Ok(Graph {
            adj,
            labels: vec![None; n],
            edge_count: edges.len(),
        })
    }

    pub fn with_labels(mut self, labels: &BTreeMap<Vertex, String>) -> Result<Self, GraphError> {
        for (&v, role) in labels {
            if v >= self.n() {
                return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n() });
            }
            self.labels[v] = Some(role.clone());
        }
        Ok(self)
    }

    pub fn set_label(&mut self, v: Vertex, role: impl Into<String>) {
        self.labels[v] = Some(role.into());
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` pairs with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn label(&self, v: Vertex) -> Option<&str> {
        self.labels[v].as_deref()
    }

    pub fn labels(&self) -> BTreeMap<Vertex, String> {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(v, l)| l.clone().map(|l| (v, l)))
            .collect()
    }

    /// Vertices carrying exactly this role label.
    pub fn vertices_with_label(&self, role: &str) -> Vec<Vertex> {
        (0..self.n()).filter(|&v| self.label(v) == Some(role)).collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.n() == 0 {
            return true;
        }
        let mut seen = vec![false; self.n()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in &self.adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n()
    }

    /// Applies one modification, returning the new graph and the map from
    /// old vertex ids to new ones (`None` for a deleted vertex).
    ///
    /// Vertex deletion compacts ids: every vertex above the deleted one
    /// shifts down by one. Labels follow their vertices.
    pub fn apply(&self, m: &Modification) -> Result<(Graph, Vec<Option<Vertex>>), GraphError> {
        let n = self.n();
        let check = |v: Vertex| {
            if v < n {
                Ok(())
            } else {
                Err(GraphError::InvalidModification(format!("vertex {v} out of range for n = {n}")))
            }
        };
        let identity: Vec<Option<Vertex>> = (0..n).map(Some).collect();
        let mut edges: Vec<(Vertex, Vertex)> = self.edges().collect();
        let mut labels = self.labels.clone();
        match m {
            Modification::AddEdge(u, v) => {
                check(*u)?;
                check(*v)?;
                if u == v || self.has_edge(*u, *v) {
                    return Err(GraphError::InvalidModification(format!(
                        "cannot add edge ({u}, {v})"
                    )));
                }
                edges.push((*u, *v));
                let g = Graph::from_edges(n, &edges)?;
                Ok((Graph { labels, ..g }, identity))
            }
            Modification::DeleteEdge(u, v) => {
                check(*u)?;
                check(*v)?;
                if !self.has_edge(*u, *v) {
                    return Err(GraphError::InvalidModification(format!(
                        "edge ({u}, {v}) does not exist"
                    )));
                }
                let (a, b) = ((*u).min(*v), (*u).max(*v));
                edges.retain(|&e| e != (a, b));
                let g = Graph::from_edges(n, &edges)?;
                Ok((Graph { labels, ..g }, identity))
            }
            Modification::AddVertex { neighbors } => {
                for &u in neighbors {
                    check(u)?;
                }
                edges.extend(neighbors.iter().map(|&u| (u, n)));
                labels.push(None);
                let g = Graph::from_edges(n + 1, &edges)?;
                Ok((Graph { labels, ..g }, identity))
            }
            Modification::DeleteVertex(d) => {
                check(*d)?;
                let map: Vec<Option<Vertex>> = (0..n)
                    .map(|v| match v.cmp(d) {
                        std::cmp::Ordering::Less => Some(v),
                        std::cmp::Ordering::Equal => None,
                        std::cmp::Ordering::Greater => Some(v - 1),
                    })
                    .collect();
                let kept: Vec<(Vertex, Vertex)> = edges
                    .iter()
                    .filter_map(|&(u, v)| Some((map[u]?, map[v]?)))
                    .collect();
                labels.remove(*d);
                let g = Graph::from_edges(n - 1, &kept)?;
                Ok((Graph { labels, ..g }, map))
            }
        }
    }

    /// Applies a list of modifications in order, composing the id maps.
    pub fn apply_all(&self, mods: &[Modification]) -> Result<(Graph, Vec<Option<Vertex>>), GraphError> {
        let mut g = self.clone();
        let mut map: Vec<Option<Vertex>> = (0..self.n()).map(Some).collect();
        for m in mods {
            let (next, step) = g.apply(m)?;
            for slot in map.iter_mut() {
                *slot = slot.and_then(|v| step[v]);
            }
            g = next;
        }
        Ok((g, map))
    }

    /// Disjoint union; vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let off = self.n();
        let mut edges: Vec<(Vertex, Vertex)> = self.edges().collect();
        edges.extend(other.edges().map(|(u, v)| (u + off, v + off)));
        let mut g = Graph::from_edges(off + other.n(), &edges).expect("union of valid graphs");
        g.labels = self.labels.iter().chain(other.labels.iter()).cloned().collect();
        g
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            n: self.n(),
            edges: self.edges().map(|(u, v)| [u, v]).collect(),
            labels: {
                let l: BTreeMap<String, String> =
                    self.labels().into_iter().map(|(v, s)| (v.to_string(), s)).collect();
                if l.is_empty() {
                    None
                } else {
                    Some(l)
                }
            },
        }
    }

    pub fn from_json(json: &GraphJson) -> Result<Self, GraphError> {
        let edges: Vec<(Vertex, Vertex)> = json.edges.iter().map(|e| (e[0], e[1])).collect();
        let g = Graph::from_edges(json.n, &edges)?;
        match &json.labels {
            None => Ok(g),
            Some(map) => {
                let mut labels = BTreeMap::new();
                for (k, role) in map {
                    let v: Vertex = k
                        .parse()
                        .map_err(|_| GraphError::Json(format!("label key {k:?} is not a vertex id")))?;
                    labels.insert(v, role.clone());
                }
                g.with_labels(&labels)
            }
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("graph json serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self, GraphError> {
        let json: GraphJson = serde_json::from_str(s).map_err(|e| GraphError::Json(e.to_string()))?;
        Graph::from_json(&json)
    }
}

/// Graph wire format: `{"n": 3, "edges": [[0,1],[1,2]], "labels": {"0": "celebrity"}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[Vertex; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<BTreeMap<String, String>>,
}

/// A single edit to a graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "args", rename_all = "kebab-case")]
pub enum Modification {
    AddEdge(Vertex, Vertex),
    DeleteEdge(Vertex, Vertex),
    /// New vertex gets id `n` and is joined to `neighbors`.
    AddVertex { neighbors: Vec<Vertex> },
    DeleteVertex(Vertex),
}

impl Modification {
    pub fn is_vertex_mod(&self) -> bool {
        matches!(self, Modification::AddVertex { .. } | Modification::DeleteVertex(_))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn path_degrees() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.degrees(), vec![1, 2, 1]);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn complete_degrees() {
        assert_eq!(k(4).degrees(), vec![3; 4]);
    }

    #[test]
    fn validation_errors_are_distinct() {
        assert_eq!(Graph::from_edges(2, &[(0, 0)]), Err(GraphError::SelfLoop(0)));
        assert_eq!(
            Graph::from_edges(3, &[(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge(0, 1))
        );
        assert_eq!(
            Graph::from_edges(2, &[(0, 2)]),
            Err(GraphError::VertexOutOfRange { vertex: 2, n: 2 })
        );
    }

    #[test]
    fn delete_vertex_compacts_ids() {
        let (g, map) = k(3).apply(&Modification::DeleteVertex(2)).unwrap();
        assert_eq!(g, k(2));
        assert_eq!(map, vec![Some(0), Some(1), None]);

        let (g, map) = k(3).apply(&Modification::DeleteVertex(0)).unwrap();
        assert_eq!(g.n(), 2);
        assert!(g.has_edge(0, 1));
        assert_eq!(map, vec![None, Some(0), Some(1)]);
    }

    #[test]
    fn edge_edits() {
        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let (tri, _) = path.apply(&Modification::AddEdge(0, 2)).unwrap();
        assert_eq!(tri, k(3));
        let (g, _) = k(2).apply(&Modification::DeleteEdge(0, 1)).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.n(), 2);
        assert!(k(2).apply(&Modification::DeleteEdge(0, 5)).is_err());
        assert!(k(2).apply(&Modification::AddEdge(0, 1)).is_err());
    }

    #[test]
    fn add_vertex_gets_next_id() {
        let (g, map) = k(2).apply(&Modification::AddVertex { neighbors: vec![0, 1] }).unwrap();
        assert_eq!(g, k(3));
        assert_eq!(map, vec![Some(0), Some(1)]);
    }

    #[test]
    fn labels_follow_deleted_vertices() {
        let mut g = k(3);
        g.set_label(2, "celebrity");
        let (h, _) = g.apply(&Modification::DeleteVertex(0)).unwrap();
        assert_eq!(h.label(1), Some("celebrity"));
    }

    #[test]
    fn json_shape() {
        let mut g = Graph::from_edges(3, &[(1, 2), (0, 1)]).unwrap();
        g.set_label(0, "celebrity");
        let s = g.to_json_string();
        assert_eq!(s, r#"{"n":3,"edges":[[0,1],[1,2]],"labels":{"0":"celebrity"}}"#);
        assert_eq!(Graph::from_json_str(&s).unwrap(), g);
        assert!(Graph::from_json_str(r#"{"n":2,"edges":[[0,0]]}"#).is_err());
    }
}
