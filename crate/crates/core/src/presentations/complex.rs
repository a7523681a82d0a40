//! Triangles of finite groups glued along a common edge, and their vertex links.

use serde::{Deserialize, Serialize};

use crate::diffsets::{difference_set_for_order, is_prime_power, DifferenceSet};
use crate::graphs::{self, BipartiteGraph, GraphCertificate};
use crate::group::{GroupElement, GroupSpec, Subgroup};
use crate::polygons::{heisenberg_quadrangle_generators, recognize_polygon, PolygonCertificate};
use crate::word::Word;
use crate::Error;

use super::{check_family_inputs, check_pairing};

/// Link verification is skipped for link graphs larger than this by default.
pub const DEFAULT_MAX_LINK_VERTICES: usize = 5000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RimGroups {
    /// Cyclic of order `2p`.
    #[default]
    Cyclic,
    /// Dihedral of order `2p`.
    Dihedral,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexOptions {
    pub rim_groups: RimGroups,
    /// Permutes which reflection each rim edge at `a` receives; the edges at `b` stay put.
    pub edge_permutation: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexVertex {
    pub id: String,
    pub group: GroupSpec,
}

/// A cyclic edge group given by the image of its generator in each endpoint group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexEdge {
    pub endpoints: [usize; 2],
    pub order: u64,
    pub images: [GroupElement; 2],
    pub words: [Word; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexOfGroups {
    pub triangles: usize,
    /// `a`, `b`, then `c1..cm`.
    pub vertices: Vec<ComplexVertex>,
    /// `[ab]`, then `[a c_i]` for each `i`, then `[b c_i]`.
    pub edges: Vec<ComplexEdge>,
    /// Vertex triples `(a, b, c_i)`; every face group is trivial.
    pub faces: Vec<[usize; 3]>,
}

impl ComplexOfGroups {
    fn vertex(&self, i: usize) -> &ComplexVertex {
        &self.vertices[i]
    }

    /// Subgroups of vertex `v`'s group generated by the images of incident edge groups,
    /// in edge order, skipping trivial edge groups.
    fn incident_subgroups(&self, v: usize) -> Result<Vec<Subgroup>, Error> {
        let group = self.vertex(v).group;
        self.edges
            .iter()
            .filter(|e| e.order > 1)
            .filter_map(|e| e.endpoints.iter().position(|&x| x == v).map(|side| e.images[side]))
            .map(|g| group.subgroup_closure(&[g]))
            .collect()
    }

    fn check_embeddings(&self) -> Result<(), Error> {
        for e in &self.edges {
            for side in 0..2 {
                let vertex = self.vertex(e.endpoints[side]);
                let got = vertex.group.element_order(&e.images[side])?;
                if got != e.order {
                    return Err(Error::EmbeddingMismatch(format!(
                        "edge {}{} generator {} has order {got} in {} but the edge group has order {}",
                        self.vertex(e.endpoints[0]).id,
                        self.vertex(e.endpoints[1]).id,
                        e.words[side],
                        vertex.id,
                        e.order
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Builds the `p + 2` triangles of groups. Triangle `i` carries the `i`-th quadrangle
/// subgroup at `b` and the reflection `t r^sigma_j` at `a`, where `j` is
/// `edge_permutation[pairing[i]]`.
pub fn assemble_complex_e(
    p: u64,
    ds: &DifferenceSet,
    pairing: &[usize],
    options: &ComplexOptions,
) -> Result<ComplexOfGroups, Error> {
    check_family_inputs(p, ds)?;
    let m = (p + 2) as usize;
    check_pairing(pairing, m)?;
    let perm: Vec<usize> = match &options.edge_permutation {
        Some(perm) => {
            check_pairing(perm, m)?;
            perm.clone()
        }
        None => (0..m).collect(),
    };

    let ga = GroupSpec::dihedral(ds.modulus())?;
    let gb = GroupSpec::heisenberg(p)?;
    let (gc, c_order2, c_order_p) = match options.rim_groups {
        RimGroups::Cyclic => {
            let g = GroupSpec::cyclic(2 * p)?;
            (g, g.element(&[p])?, g.element(&[2])?)
        }
        RimGroups::Dihedral => {
            let g = GroupSpec::dihedral(p)?;
            (g, g.element(&[1, 0])?, g.element(&[0, 1])?)
        }
    };

    let mut vertices = vec![ComplexVertex { id: "a".into(), group: ga }, ComplexVertex { id: "b".into(), group: gb }];
    vertices.extend((1..=m).map(|i| ComplexVertex { id: format!("c{i}"), group: gc }));

    let word = |g: &GroupSpec, e: &GroupElement| g.display_word(e);
    let mut edges = vec![ComplexEdge {
        endpoints: [0, 1],
        order: 1,
        images: [ga.identity(), gb.identity()],
        words: [Word::identity(), Word::identity()],
    }];
    let quad = heisenberg_quadrangle_generators(p)?;
    for i in 0..m {
        let sigma = ds.residues()[perm[pairing[i]]];
        let refl = ga.element(&[1, sigma])?;
        edges.push(ComplexEdge {
            endpoints: [0, 2 + i],
            order: 2,
            images: [refl, c_order2],
            words: [word(&ga, &refl), word(&gc, &c_order2)],
        });
    }
    for (i, q) in quad.iter().enumerate() {
        edges.push(ComplexEdge {
            endpoints: [1, 2 + i],
            order: p,
            images: [*q, c_order_p],
            words: [word(&gb, q), word(&gc, &c_order_p)],
        });
    }
    let faces = (0..m).map(|i| [0, 1, 2 + i]).collect();
    let complex = ComplexOfGroups { triangles: m, vertices, edges, faces };
    complex.check_embeddings()?;
    Ok(complex)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkReport {
    pub vertex: String,
    /// Girth needed for the link condition at this vertex's angle.
    pub required_girth: u32,
    pub link_vertices: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<GraphCertificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polygon: Option<PolygonCertificate>,
    /// `girth >= required_girth`; false when skipped.
    pub satisfied: bool,
    pub skipped: bool,
}

impl LinkReport {
    fn evaluate(vertex: &str, required_girth: u32, graph: &BipartiteGraph, with_polygon: bool) -> Self {
        let cert = graphs::certificate(graph);
        let satisfied = cert.girth.is_some_and(|g| g >= required_girth);
        LinkReport {
            vertex: vertex.to_string(),
            required_girth,
            link_vertices: graph.vertex_count(),
            polygon: if with_polygon { recognize_polygon(graph).ok() } else { None },
            certificate: Some(cert),
            satisfied,
            skipped: false,
        }
    }

    fn skipped(vertex: &str, required_girth: u32, link_vertices: usize) -> Self {
        LinkReport {
            vertex: vertex.to_string(),
            required_girth,
            link_vertices,
            certificate: None,
            polygon: None,
            satisfied: false,
            skipped: true,
        }
    }
}

pub fn verify_links(complex: &ComplexOfGroups) -> Result<Vec<LinkReport>, Error> {
    verify_links_capped(complex, usize::MAX)
}

/// Link at `a`: coset graph w.r.t. the rim edge groups (girth 12 needed); at `b`: same
/// (girth 8); at each `c_i`: the graph `E_c/E_ac ⊔ E_c/E_bc` (girth 4). Links with more
/// than `max_link_vertices` vertices are reported as skipped. Vertices are checked
/// concurrently; reports come back in vertex order.
pub fn verify_links_capped(complex: &ComplexOfGroups, max_link_vertices: usize) -> Result<Vec<LinkReport>, Error> {
    complex.check_embeddings()?;
    let jobs: Vec<usize> = (0..complex.vertices.len()).collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> =
            jobs.iter().map(|&v| scope.spawn(move || link_report(complex, v, max_link_vertices))).collect();
        handles.into_iter().map(|h| h.join().expect("link worker panicked")).collect()
    })
}

fn link_report(complex: &ComplexOfGroups, v: usize, cap: usize) -> Result<LinkReport, Error> {
    let vertex = complex.vertex(v);
    let group = vertex.group;
    let order = group.order() as usize;
    let subgroups = complex.incident_subgroups(v)?;
    let required = match v {
        0 => 12,
        1 => 8,
        _ => 4,
    };
    if v < 2 {
        let size = order + subgroups.iter().map(|s| order / s.order()).sum::<usize>();
        if size > cap {
            return Ok(LinkReport::skipped(&vertex.id, required, size));
        }
        let graph = graphs::coset_graph(&group, &subgroups)?;
        Ok(LinkReport::evaluate(&vertex.id, required, &graph, v == 1))
    } else {
        let [pa, pb] = <[Subgroup; 2]>::try_from(subgroups)
            .map_err(|_| Error::Defect(format!("rim vertex {} should have two edge groups", vertex.id)))?;
        let size = order / pa.order() + order / pb.order();
        if size > cap {
            return Ok(LinkReport::skipped(&vertex.id, required, size));
        }
        let graph = graphs::link_graph(&group, &pa, &pb)?;
        Ok(LinkReport::evaluate(&vertex.id, required, &graph, false))
    }
}

/// Cone over a generalized polygon's incidence graph with dihedral groups on one side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwiatkowskiComplex {
    pub polygon: PolygonCertificate,
    pub t: u64,
    pub difference_set: DifferenceSet,
    /// Colour class carrying the dihedral groups.
    pub dihedral_class: u8,
    /// Group of each vertex of `L`: dihedral of order `2(t^2+t+1)` on the dihedral class,
    /// cyclic of order 2 on the other. The cone point's group is trivial.
    pub vertex_groups: Vec<GroupSpec>,
    /// For each edge `(u, v)` of `L` (u < v), the reflection generating its order-2
    /// group inside the dihedral endpoint.
    pub edge_reflections: Vec<((usize, usize), GroupElement)>,
    /// One report per dihedral-class vertex, in vertex order.
    pub links: Vec<LinkReport>,
}

impl SwiatkowskiComplex {
    pub fn all_links_satisfied(&self) -> bool {
        self.links.iter().all(|l| l.satisfied)
    }
}

/// Places `dihedral(t^2+t+1)` on every vertex of degree `t + 1` (class 1 when both
/// classes qualify), embedding the incident edge groups as `<t r^sigma>` for a
/// difference set of order `t`, and checks each such vertex's coset graph has girth 12.
pub fn swiatkowski_complex(l: &BipartiteGraph, t: u64) -> Result<SwiatkowskiComplex, Error> {
    let polygon =
        recognize_polygon(l).map_err(|r| Error::Precondition(format!("L is not a generalized polygon: {r:?}")))?;
    if !is_prime_power(t) {
        return Err(Error::Precondition(format!("t = {t} is not a prime power")));
    }
    let (s0, s1) = polygon.order;
    let dihedral_class = if s1 == t {
        1
    } else if s0 == t {
        0
    } else {
        return Err(Error::Precondition(format!(
            "no colour class of L has degree t + 1 = {} (order is ({s0}, {s1}))",
            t + 1
        )));
    };
    let ds = difference_set_for_order(t)?;
    let gd = GroupSpec::dihedral(ds.modulus())?;
    let g2 = GroupSpec::cyclic(2)?;
    let colored = l.clone().with_coloring();
    let coloring = colored.coloring().expect("polygons are bipartite").to_vec();

    let vertex_groups: Vec<GroupSpec> = coloring.iter().map(|&c| if c == dihedral_class { gd } else { g2 }).collect();
    let reflections: Vec<GroupElement> =
        ds.residues().iter().map(|&s| gd.element(&[1, s])).collect::<Result<_, _>>()?;

    let mut edge_reflections = Vec::with_capacity(l.edge_count());
    let mut links = Vec::new();
    for v in 0..l.vertex_count() {
        if coloring[v] != dihedral_class {
            continue;
        }
        let nbrs = l.neighbors(v);
        if nbrs.len() != reflections.len() {
            return Err(Error::Defect(format!("vertex {v} has degree {}", nbrs.len())));
        }
        for (k, &u) in nbrs.iter().enumerate() {
            edge_reflections.push(((u.min(v), u.max(v)), reflections[k]));
        }
        let subgroups: Vec<Subgroup> =
            nbrs.iter().enumerate().map(|(k, _)| gd.subgroup_closure(&[reflections[k]])).collect::<Result<_, _>>()?;
        let link = graphs::coset_graph(&gd, &subgroups)?;
        links.push(LinkReport::evaluate(&l.labels()[v].to_string(), 12, &link, false));
    }
    edge_reflections.sort_by_key(|(e, _)| *e);

    Ok(SwiatkowskiComplex { polygon, t, difference_set: ds, dihedral_class, vertex_groups, edge_reflections, links })
}
