//! Generalized polygons: recognition from incidence graphs, and the subgroup
//! criterion that makes a coset graph a generalized quadrangle.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::graphs::{self, BipartiteGraph, Bipartition, GraphCertificate};
use crate::group::{GroupElement, GroupSpec, Subgroup};
use crate::word::Word;
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolygonCertificate {
    /// `n` of the generalized n-gon: diameter `n`, girth `2n`.
    pub gonality: u32,
    /// `(s, t)`: colour class 0 has degree `s + 1`, class 1 degree `t + 1`.
    pub order: (u64, u64),
    pub graph: GraphCertificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum PolygonRejection {
    Disconnected,
    NotBipartite { odd_cycle: Vec<usize> },
    NotBiregular,
    Acyclic,
    GirthNotTwiceDiameter { girth: u32, diameter: u32 },
    GonalityTooSmall { gonality: u32 },
}

/// Certificate iff the graph is connected, bipartite, biregular, with girth = 2·diameter >= 6.
///
/// Uses the stored colouring when present, otherwise a BFS colouring rooted at vertex 0.
pub fn recognize_polygon(graph: &BipartiteGraph) -> Result<PolygonCertificate, PolygonRejection> {
    let colored = match graph.coloring() {
        Some(_) => graph.clone(),
        None => match graphs::is_bipartite(graph) {
            Bipartition::OddCycle(cycle) => return Err(PolygonRejection::NotBipartite { odd_cycle: cycle }),
            Bipartition::Coloring(_) => graph.clone().with_coloring(),
        },
    };
    let cert = graphs::certificate(&colored);
    if !cert.connected {
        return Err(PolygonRejection::Disconnected);
    }
    let (d0, d1) = cert.biregular_degrees().ok_or(PolygonRejection::NotBiregular)?;
    let girth = cert.girth.ok_or(PolygonRejection::Acyclic)?;
    let diameter = cert.diameter.expect("connected graphs have finite diameter");
    if girth != 2 * diameter {
        return Err(PolygonRejection::GirthNotTwiceDiameter { girth, diameter });
    }
    if diameter < 3 {
        return Err(PolygonRejection::GonalityTooSmall { gonality: diameter });
    }
    Ok(PolygonCertificate { gonality: diameter, order: (d0 as u64 - 1, d1 as u64 - 1), graph: cert })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KantorReport {
    /// `P_i ∩ P_j = {1}` for all `i != j`.
    pub pairwise_trivial: bool,
    /// `P_i P_j ∩ P_k = {1}` for all distinct `i, j, k` (and pairwise_trivial).
    pub triple_trivial: bool,
    /// `|G| = (1 + t)(1 + s t)`; `None` when subgroup orders differ.
    pub count_matches: Option<bool>,
    /// `(s, t) = (|I| - 1, |P| - 1)` when all orders agree.
    pub implied_order: Option<(u64, u64)>,
    pub group_order: u64,
    /// First offending index pair or triple, if any.
    pub witness: Option<Vec<usize>>,
}

/// Evaluates the three conditions by exhaustive set computation.
pub fn kantor_check(spec: &GroupSpec, subgroups: &[Subgroup]) -> Result<KantorReport, Error> {
    if subgroups.len() < 2 {
        return Err(Error::Precondition("need at least two subgroups".into()));
    }
    for s in subgroups {
        if s.ambient != *spec {
            return Err(Error::InvalidSubgroup(format!("subgroup of {} given for {spec}", s.ambient)));
        }
    }
    let id = spec.identity();
    let m = subgroups.len();
    let mut witness = None;

    let mut pairwise_trivial = true;
    'pairs: for i in 0..m {
        for j in i + 1..m {
            if subgroups[i].intersection(&subgroups[j]).len() != 1 {
                pairwise_trivial = false;
                witness = Some(vec![i, j]);
                break 'pairs;
            }
        }
    }

    let mut triples_ok = true;
    'triples: for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            let product: BTreeSet<GroupElement> = subgroups[i]
                .elements
                .iter()
                .flat_map(|a| subgroups[j].elements.iter().map(move |b| spec.mul(a, b)))
                .collect();
            for (k, pk) in subgroups.iter().enumerate() {
                if k == i || k == j {
                    continue;
                }
                if pk.elements.iter().any(|e| *e != id && product.contains(e)) {
                    triples_ok = false;
                    witness.get_or_insert_with(|| vec![i, j, k]);
                    break 'triples;
                }
            }
        }
    }

    let first = subgroups[0].order();
    let (count_matches, implied_order) = if subgroups.iter().all(|s| s.order() == first) {
        let s = (m - 1) as u64;
        let t = (first - 1) as u64;
        (Some(spec.order() == (1 + t) * (1 + s * t)), Some((s, t)))
    } else {
        (None, None)
    };

    Ok(KantorReport {
        pairwise_trivial,
        triple_trivial: pairwise_trivial && triples_ok,
        count_matches,
        implied_order,
        group_order: spec.order(),
        witness,
    })
}

/// The `p + 2` cyclic subgroups `<x>`, `<z>`, `<x^a y z^(-a/2)>` (`a = 0..p`) of the
/// Heisenberg group, in that order. `1/2` is the inverse of 2 mod `p`.
pub fn heisenberg_quadrangle_subgroups(p: u64) -> Result<Vec<Subgroup>, Error> {
    let spec = GroupSpec::heisenberg(p)?;
    heisenberg_quadrangle_generators(p)?.iter().map(|g| spec.subgroup_closure(std::slice::from_ref(g))).collect()
}

pub fn heisenberg_quadrangle_generators(p: u64) -> Result<Vec<GroupElement>, Error> {
    let spec = GroupSpec::heisenberg(p)?;
    let half = p.div_ceil(2);
    let mut gens = vec![spec.element(&[1, 0, 0])?, spec.element(&[0, 0, 1])?];
    for a in 0..p {
        let c = (p - (a * half) % p) % p;
        gens.push(spec.element(&[a, 1, c])?);
    }
    Ok(gens)
}

/// Words `x^a y^b z^c` for the quadrangle generators, exponents in `(-p/2, p/2]`.
pub fn heisenberg_quadrangle_words(p: u64) -> Result<Vec<Word>, Error> {
    let spec = GroupSpec::heisenberg(p)?;
    Ok(heisenberg_quadrangle_generators(p)?.iter().map(|g| spec.display_word(g)).collect())
}
