//! Fixtures shared by the benchmarks.

use kazhdan_core::graphs::{self, BipartiteGraph};
use kazhdan_core::polygons::heisenberg_quadrangle_subgroups;
use kazhdan_core::presentations::reflection_connection;
use kazhdan_core::{DifferenceSet, GroupSpec};

/// Incidence graph of the plane of order 8 as a dihedral Cayley graph.
pub fn plane_73() -> BipartiteGraph {
    let d = GroupSpec::dihedral(73).unwrap();
    graphs::cayley_graph(&d, &reflection_connection(&d, &DifferenceSet::mod_73()).unwrap()).unwrap()
}

/// GQ(p+1, p-1) as a Heisenberg coset graph.
pub fn quadrangle(p: u64) -> BipartiteGraph {
    let h = GroupSpec::heisenberg(p).unwrap();
    graphs::coset_graph(&h, &heisenberg_quadrangle_subgroups(p).unwrap()).unwrap()
}
