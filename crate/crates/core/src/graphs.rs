//! Finite simple graphs built from groups, and their BFS certificates.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::group::{GroupElement, GroupSpec, Subgroup};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum VertexLabel {
    Element {
        element: GroupElement,
    },
    /// Left coset of the `subgroup`-th subgroup, named by its least member.
    Coset {
        subgroup: usize,
        representative: GroupElement,
    },
    /// Midpoint of the edge between two original vertices.
    Midpoint {
        endpoints: [usize; 2],
    },
    Named {
        name: String,
    },
}

impl fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexLabel::Element { element } => write!(f, "{element}"),
            VertexLabel::Coset { subgroup, representative } => {
                write!(f, "{representative}P{subgroup}")
            }
            VertexLabel::Midpoint { endpoints: [u, v] } => write!(f, "m{u}_{v}"),
            VertexLabel::Named { name } => f.write_str(name),
        }
    }
}

/// Simple undirected graph with sorted adjacency lists and an optional 2-colouring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteGraph {
    labels: Vec<VertexLabel>,
    adjacency: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coloring: Option<Vec<u8>>,
}

impl BipartiteGraph {
    /// Builds a graph from an edge list. Rejects loops and out-of-range endpoints;
    /// parallel edges are merged.
    pub fn from_edges(
        labels: Vec<VertexLabel>,
        edges: impl IntoIterator<Item = (usize, usize)>,
        coloring: Option<Vec<u8>>,
    ) -> Result<Self, Error> {
        let n = labels.len();
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Precondition(format!("edge ({u},{v}) out of range")));
            }
            if u == v {
                return Err(Error::Precondition(format!("loop at vertex {u}")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
            nbrs.dedup();
        }
        let graph = BipartiteGraph { labels, adjacency, coloring };
        graph.validate()?;
        Ok(graph)
    }

    /// Unlabelled graph on `n` vertices named `0..n`.
    pub fn unlabelled(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, Error> {
        let labels = (0..n).map(|i| VertexLabel::Named { name: i.to_string() }).collect();
        Self::from_edges(labels, edges, None)
    }

    /// Checks symmetry, simplicity and colouring consistency (used after deserializing).
    pub fn validate(&self) -> Result<(), Error> {
        let n = self.labels.len();
        if self.adjacency.len() != n {
            return Err(Error::Precondition("adjacency length differs from label count".into()));
        }
        for (u, nbrs) in self.adjacency.iter().enumerate() {
            if nbrs.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Precondition(format!("neighbours of {u} not strictly sorted")));
            }
            for &v in nbrs {
                if v >= n || v == u || self.adjacency[v].binary_search(&u).is_err() {
                    return Err(Error::Precondition(format!("bad adjacency {u} -> {v}")));
                }
            }
        }
        if let Some(col) = &self.coloring {
            if col.len() != n || col.iter().any(|&c| c > 1) {
                return Err(Error::Precondition("malformed colouring".into()));
            }
            for (u, v) in self.edges() {
                if col[u] == col[v] {
                    return Err(Error::Precondition(format!("edge ({u},{v}) inside a colour class")));
                }
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn labels(&self) -> &[VertexLabel] {
        &self.labels
    }

    pub fn coloring(&self) -> Option<&[u8]> {
        self.coloring.as_deref()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Keeps the stored colouring if present, otherwise computes one by BFS.
    pub fn with_coloring(mut self) -> Self {
        if self.coloring.is_none() {
            if let Bipartition::Coloring(c) = is_bipartite(&self) {
                self.coloring = Some(c);
            }
        }
        self
    }

    fn bfs(&self, source: usize, dist: &mut [u32], queue: &mut VecDeque<usize>) {
        dist.fill(u32::MAX);
        dist[source] = 0;
        queue.clear();
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if dist[v] == u32::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
    }
}

/// Cayley graph `g ~ g s` for `s` in the connection set.
pub fn cayley_graph(spec: &GroupSpec, connection: &[GroupElement]) -> Result<BipartiteGraph, Error> {
    let id = spec.identity();
    for s in connection {
        spec.check(s)?;
        if *s == id {
            return Err(Error::InvalidConnectionSet("identity in connection set".into()));
        }
    }
    for s in connection {
        let inv = spec.inv(s);
        if !connection.contains(&inv) {
            return Err(Error::InvalidConnectionSet(format!(
                "connection set not closed under inverses: {s} lacks {inv}"
            )));
        }
    }
    let labels: Vec<VertexLabel> = spec.elements().map(|element| VertexLabel::Element { element }).collect();
    let mut edges = Vec::with_capacity(labels.len() * connection.len());
    for g in spec.elements() {
        let u = spec.index_of(&g);
        for s in connection {
            let v = spec.index_of(&spec.mul(&g, s));
            if u < v {
                edges.push((u, v));
            }
        }
    }
    Ok(BipartiteGraph::from_edges(labels, edges, None)?.with_coloring())
}

/// Coset graph on `G ⊔ G/P_1 ⊔ ...`, joining `g` to the coset `gP_i` for every `i`.
///
/// Group elements form colour class 0, cosets colour class 1.
pub fn coset_graph(spec: &GroupSpec, subgroups: &[Subgroup]) -> Result<BipartiteGraph, Error> {
    if subgroups.is_empty() {
        return Err(Error::Precondition("coset graph needs at least one subgroup".into()));
    }
    let order = spec.order() as usize;
    let mut labels: Vec<VertexLabel> = spec.elements().map(|element| VertexLabel::Element { element }).collect();
    let mut edges = Vec::with_capacity(order * subgroups.len());
    for (i, sub) in subgroups.iter().enumerate() {
        for coset in spec.left_cosets(sub)? {
            let vertex = labels.len();
            labels.push(VertexLabel::Coset { subgroup: i, representative: coset.representative });
            for m in &coset.members {
                edges.push((spec.index_of(m), vertex));
            }
        }
    }
    let coloring = (0..labels.len()).map(|v| u8::from(v >= order)).collect();
    BipartiteGraph::from_edges(labels, edges, Some(coloring))
}

/// Graph on `G/P ⊔ G/Q` with one edge `gP -- gQ` per group element.
pub fn link_graph(spec: &GroupSpec, p: &Subgroup, q: &Subgroup) -> Result<BipartiteGraph, Error> {
    if p.intersection(q).len() != 1 {
        return Err(Error::Precondition("link graph needs P ∩ Q = {1}".into()));
    }
    let cosets_p = spec.left_cosets(p)?;
    let cosets_q = spec.left_cosets(q)?;
    let order = spec.order() as usize;
    let mut of_p = vec![0usize; order];
    let mut of_q = vec![0usize; order];
    let mut labels = Vec::with_capacity(cosets_p.len() + cosets_q.len());
    for (which, cosets, slot) in [(0, &cosets_p, &mut of_p), (1, &cosets_q, &mut of_q)] {
        for coset in cosets {
            for m in &coset.members {
                slot[spec.index_of(m)] = labels.len();
            }
            labels.push(VertexLabel::Coset { subgroup: which, representative: coset.representative });
        }
    }
    let coloring = (0..labels.len()).map(|v| u8::from(v >= cosets_p.len())).collect();
    let edges: Vec<(usize, usize)> = (0..order).map(|g| (of_p[g], of_q[g])).collect();
    let graph = BipartiteGraph::from_edges(labels, edges, Some(coloring))?;
    debug_assert_eq!(graph.edge_count(), order);
    Ok(graph)
}

/// Inserts a midpoint on every edge. Original vertices keep their indices and
/// form colour class 0; midpoints follow in edge order as class 1.
pub fn barycentric_subdivision(graph: &BipartiteGraph) -> BipartiteGraph {
    let n = graph.vertex_count();
    let mut labels = graph.labels.clone();
    let mut edges = Vec::with_capacity(2 * graph.edge_count());
    for (u, v) in graph.edges() {
        let mid = labels.len();
        labels.push(VertexLabel::Midpoint { endpoints: [u, v] });
        edges.push((u, mid));
        edges.push((v, mid));
    }
    let coloring = (0..labels.len()).map(|v| u8::from(v >= n)).collect();
    BipartiteGraph::from_edges(labels, edges, Some(coloring)).expect("subdivision of a simple graph is simple")
}

/// Shortest cycle length, `None` for forests.
pub fn girth(graph: &BipartiteGraph) -> Option<u32> {
    let n = graph.vertex_count();
    let mut best = u32::MAX;
    let mut dist = vec![u32::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for source in 0..n {
        dist.fill(u32::MAX);
        dist[source] = 0;
        parent[source] = usize::MAX;
        queue.clear();
        queue.push_back(source);
        'bfs: while let Some(u) = queue.pop_front() {
            // every cycle found from here on is at least 2 dist[u] + 1 long
            if 2 * dist[u] + 1 >= best {
                break;
            }
            for &v in &graph.adjacency[u] {
                if dist[v] == u32::MAX {
                    dist[v] = dist[u] + 1;
                    parent[v] = u;
                    queue.push_back(v);
                } else if parent[u] != v {
                    // non-tree edge closes a cycle through the source of length <= this
                    best = best.min(dist[u] + dist[v] + 1);
                    if best == 3 {
                        break 'bfs;
                    }
                }
            }
        }
    }
    (best != u32::MAX).then_some(best)
}

/// Largest eccentricity, `None` when disconnected. Empty and one-vertex graphs have diameter 0.
pub fn diameter(graph: &BipartiteGraph) -> Option<u32> {
    let n = graph.vertex_count();
    let mut dist = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    let mut diam = 0;
    for source in 0..n {
        graph.bfs(source, &mut dist, &mut queue);
        for &d in &dist {
            if d == u32::MAX {
                return None;
            }
            diam = diam.max(d);
        }
    }
    Some(diam)
}

pub fn is_connected(graph: &BipartiteGraph) -> bool {
    connected_components(graph) <= 1
}

pub fn connected_components(graph: &BipartiteGraph) -> usize {
    let n = graph.vertex_count();
    let mut seen = vec![false; n];
    let mut count = 0;
    let mut stack = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        stack.push(s);
        while let Some(u) = stack.pop() {
            for &v in &graph.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
    }
    count
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bipartition {
    /// Colour per vertex; the least vertex of each component gets colour 0.
    Coloring(Vec<u8>),
    /// Vertices of an odd closed walk that is a simple cycle.
    OddCycle(Vec<usize>),
}

pub fn is_bipartite(graph: &BipartiteGraph) -> Bipartition {
    let n = graph.vertex_count();
    let mut color = vec![u8::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        if color[s] != u8::MAX {
            continue;
        }
        color[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &v in &graph.adjacency[u] {
                if color[v] == u8::MAX {
                    color[v] = 1 - color[u];
                    parent[v] = u;
                    depth[v] = depth[u] + 1;
                    queue.push_back(v);
                } else if color[v] == color[u] {
                    return Bipartition::OddCycle(odd_cycle(u, v, &parent, &depth));
                }
            }
        }
    }
    Bipartition::Coloring(color)
}

fn odd_cycle(u: usize, v: usize, parent: &[usize], depth: &[usize]) -> Vec<usize> {
    let (mut a, mut b) = (u, v);
    let mut left = vec![a];
    let mut right = vec![b];
    while depth[a] > depth[b] {
        a = parent[a];
        left.push(a);
    }
    while depth[b] > depth[a] {
        b = parent[b];
        right.push(b);
    }
    while a != b {
        a = parent[a];
        b = parent[b];
        left.push(a);
        right.push(b);
    }
    right.pop();
    right.reverse();
    left.extend(right);
    left
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphCertificate {
    pub vertices: usize,
    pub edges: usize,
    pub connected: bool,
    pub bipartite: bool,
    /// `null` means infinite (forest).
    pub girth: Option<u32>,
    /// `null` means infinite (disconnected).
    pub diameter: Option<u32>,
    /// Degree multiset per colour class (`"0"`, `"1"`), or `"all"` when not bipartite.
    pub degrees: BTreeMap<String, BTreeMap<usize, usize>>,
}

impl GraphCertificate {
    /// Degrees of a biregular bipartite graph as `(class 0, class 1)`.
    pub fn biregular_degrees(&self) -> Option<(usize, usize)> {
        let single = |key: &str| -> Option<usize> {
            let m = self.degrees.get(key)?;
            (m.len() == 1).then(|| *m.keys().next().unwrap())
        };
        Some((single("0")?, single("1")?))
    }
}

pub fn degrees(graph: &BipartiteGraph) -> BTreeMap<String, BTreeMap<usize, usize>> {
    let mut out: BTreeMap<String, BTreeMap<usize, usize>> = BTreeMap::new();
    let coloring = match graph.coloring() {
        Some(c) => Some(c.to_vec()),
        None => match is_bipartite(graph) {
            Bipartition::Coloring(c) => Some(c),
            Bipartition::OddCycle(_) => None,
        },
    };
    for v in 0..graph.vertex_count() {
        let key = match &coloring {
            Some(c) => c[v].to_string(),
            None => "all".to_string(),
        };
        *out.entry(key).or_default().entry(graph.degree(v)).or_default() += 1;
    }
    out
}

pub fn certificate(graph: &BipartiteGraph) -> GraphCertificate {
    let diameter = diameter(graph);
    GraphCertificate {
        vertices: graph.vertex_count(),
        edges: graph.edge_count(),
        connected: diameter.is_some(),
        bipartite: matches!(is_bipartite(graph), Bipartition::Coloring(_)),
        girth: girth(graph),
        diameter,
        degrees: degrees(graph),
    }
}

/// Deterministic DOT text; colour class 0 drawn as circles, class 1 as boxes.
pub fn export_dot(graph: &BipartiteGraph) -> String {
    let mut out = String::from("graph G {\n");
    for (v, label) in graph.labels.iter().enumerate() {
        let shape = match graph.coloring().map(|c| c[v]) {
            Some(0) => "circle",
            Some(_) => "box",
            None => "ellipse",
        };
        let text = label.to_string().replace('\\', "\\\\").replace('"', "\\\"");
        writeln!(out, "  v{v} [label=\"{text}\", shape={shape}];").unwrap();
    }
    for (u, v) in graph.edges() {
        writeln!(out, "  v{u} -- v{v};").unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn cycle(n: usize) -> BipartiteGraph {
        BipartiteGraph::unlabelled(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    fn complete_bipartite(m: usize, k: usize) -> BipartiteGraph {
        let edges = (0..m).flat_map(|i| (0..k).map(move |j| (i, m + j)));
        BipartiteGraph::unlabelled(m + k, edges).unwrap()
    }

    #[test]
    fn rejects_loops_and_merges_parallel_edges() {
        assert!(BipartiteGraph::unlabelled(2, [(0, 0)]).is_err());
        let g = BipartiteGraph::unlabelled(2, [(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn cycle_certificates() {
        let c6 = certificate(&cycle(6));
        assert_eq!((c6.girth, c6.diameter, c6.bipartite), (Some(6), Some(3), true));
        let c5 = certificate(&cycle(5));
        assert!(!c5.bipartite);
        assert_eq!(c5.girth, Some(5));
    }

    #[test]
    fn tree_has_infinite_girth() {
        let tree = BipartiteGraph::unlabelled(5, [(0, 1), (0, 2), (2, 3), (2, 4)]).unwrap();
        assert_eq!(girth(&tree), None);
    }

    #[test]
    fn disconnected_graph_has_infinite_diameter() {
        let g = BipartiteGraph::unlabelled(2, []).unwrap();
        assert_eq!(diameter(&g), None);
        assert!(!certificate(&g).connected);
    }

    #[test]
    fn complete_bipartite_girth_four() {
        assert_eq!(girth(&complete_bipartite(2, 7)), Some(4));
    }

    #[test]
    fn odd_cycle_witness_is_a_cycle() {
        let petersen_outer = cycle(7);
        let Bipartition::OddCycle(cyc) = is_bipartite(&petersen_outer) else {
            panic!("7-cycle is not bipartite");
        };
        assert_eq!(cyc.len() % 2, 1);
        for i in 0..cyc.len() {
            let (a, b) = (cyc[i], cyc[(i + 1) % cyc.len()]);
            assert!(petersen_outer.neighbors(a).contains(&b));
        }
    }

    #[test]
    fn cayley_cycle() {
        let g = GroupSpec::cyclic(6).unwrap();
        let graph = cayley_graph(&g, &[GroupElement::Cyclic(1), GroupElement::Cyclic(5)]).unwrap();
        assert_eq!(girth(&graph), Some(6));
        assert_eq!(graph.edge_count(), 6);
    }

    #[test]
    fn cayley_rejects_bad_connection_sets() {
        let g = GroupSpec::cyclic(6).unwrap();
        assert!(matches!(cayley_graph(&g, &[GroupElement::Cyclic(0)]), Err(Error::InvalidConnectionSet(_))));
        assert!(matches!(cayley_graph(&g, &[GroupElement::Cyclic(1)]), Err(Error::InvalidConnectionSet(_))));
    }

    #[test]
    fn trivial_subgroup_coset_graph_is_matching() {
        let g = GroupSpec::cyclic(2).unwrap();
        let trivial = g.subgroup_closure(&[]).unwrap();
        let graph = coset_graph(&g, &[trivial]).unwrap();
        let cert = certificate(&graph);
        assert_eq!((cert.vertices, cert.edges, cert.girth), (4, 2, None));
        assert!(coset_graph(&g, &[]).is_err());
    }

    #[test]
    fn link_graphs_are_complete_bipartite() {
        let g = GroupSpec::cyclic(6).unwrap();
        let p = g.subgroup_closure(&[GroupElement::Cyclic(3)]).unwrap();
        let q = g.subgroup_closure(&[GroupElement::Cyclic(2)]).unwrap();
        let k23 = link_graph(&g, &p, &q).unwrap();
        assert_eq!(certificate(&k23), certificate(&complete_bipartite(3, 2).with_coloring()));

        let g = GroupSpec::dihedral(7).unwrap();
        let p = g.subgroup_closure(&[g.element(&[1, 0]).unwrap()]).unwrap();
        let q = g.subgroup_closure(&[g.element(&[0, 1]).unwrap()]).unwrap();
        let cert = certificate(&link_graph(&g, &p, &q).unwrap());
        assert_eq!((cert.vertices, cert.edges, cert.girth), (9, 14, Some(4)));
        assert_eq!(cert.biregular_degrees(), Some((2, 7)));
    }

    #[test]
    fn link_graph_requires_trivial_intersection() {
        let g = GroupSpec::cyclic(4).unwrap();
        let p = g.subgroup_closure(&[GroupElement::Cyclic(2)]).unwrap();
        assert!(matches!(link_graph(&g, &p, &p), Err(Error::Precondition(_))));
    }

    #[test]
    fn subdivision_doubles_girth() {
        let sub = barycentric_subdivision(&cycle(6));
        assert_eq!(girth(&sub), Some(12));
        let edge = BipartiteGraph::unlabelled(2, [(0, 1)]).unwrap();
        let path = barycentric_subdivision(&edge);
        assert_eq!((path.vertex_count(), path.edge_count(), diameter(&path)), (3, 2, Some(2)));
    }

    #[test]
    fn dot_export_counts() {
        let dot = export_dot(&complete_bipartite(2, 3).with_coloring());
        assert_eq!(dot.lines().filter(|l| l.contains("[label=")).count(), 5);
        assert_eq!(dot.lines().filter(|l| l.contains(" -- ")).count(), 6);
        let empty = BipartiteGraph::unlabelled(0, []).unwrap();
        assert_eq!(export_dot(&empty), "graph G {\n}\n");
    }

    #[test]
    fn json_round_trip_validates() {
        let g = cycle(4).with_coloring();
        let json = serde_json::to_string(&g).unwrap();
        let back: BipartiteGraph = serde_json::from_str(&json).unwrap();
        back.validate().unwrap();
        assert_eq!(back, g);
        let broken = json.replacen("[1,3]", "[1]", 1);
        let bad: BipartiteGraph = serde_json::from_str(&broken).unwrap();
        assert!(bad.validate().is_err());
    }
}
