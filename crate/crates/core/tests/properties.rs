use std::collections::BTreeMap;

use kazhdan_core::diffsets::search_difference_set;
use kazhdan_core::graphs;
use kazhdan_core::pipeline::optimal_pairing;
use kazhdan_core::presentations::{
    assemble_complex_e, dihedral_reflection_subgroups, reflection_connection, verify_links, ComplexOptions, RimGroups,
    PAPER_PAIRING_P7,
};
use kazhdan_core::{DifferenceSet, GroupSpec, Word};
use proptest::prelude::*;
use proptest::sample::Index;

fn rim() -> impl Strategy<Value = RimGroups> {
    prop_oneof![Just(RimGroups::Cyclic), Just(RimGroups::Dihedral)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn links_hold_under_any_edge_permutation(
        p in prop_oneof![Just(3u64), Just(7u64)],
        perm in Just((0..9usize).collect::<Vec<_>>()).prop_shuffle(),
        rim_groups in rim(),
    ) {
        let (ds, pairing) = if p == 7 {
            (DifferenceSet::mod_73(), PAPER_PAIRING_P7.to_vec())
        } else {
            let ds = search_difference_set(4).unwrap();
            let pairing = optimal_pairing(3, &ds).unwrap();
            (ds, pairing)
        };
        let m = ds.residues().len();
        let perm: Vec<usize> = perm.into_iter().filter(|&i| i < m).collect();
        let options = ComplexOptions { rim_groups, edge_permutation: Some(perm) };
        let complex = assemble_complex_e(p, &ds, &pairing, &options).unwrap();
        let reports = verify_links(&complex).unwrap();
        prop_assert_eq!(reports.len(), 2 + m);
        for r in &reports {
            prop_assert!(r.satisfied, "{} failed", r.vertex);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coset_graph_is_subdivided_cayley_graph(q in 2u64..=5, shift in 0u64..40) {
        let ds = search_difference_set(q).unwrap();
        let ds = ds.translate(shift % ds.modulus());
        let d = GroupSpec::dihedral(ds.modulus()).unwrap();
        let cayley = graphs::cayley_graph(&d, &reflection_connection(&d, &ds).unwrap()).unwrap();
        let coset = graphs::coset_graph(&d, &dihedral_reflection_subgroups(&d, &ds).unwrap()).unwrap();
        prop_assert_eq!(cayley.edge_count() as u64, d.order() * (q + 1) / 2);
        prop_assert!((0..cayley.vertex_count()).all(|v| cayley.degree(v) as u64 == q + 1));
        prop_assert_eq!(graphs::certificate(&coset), graphs::certificate(&graphs::barycentric_subdivision(&cayley)));
        prop_assert_eq!(graphs::girth(&coset), Some(12));
    }

    #[test]
    fn heisenberg_relations(p in prop_oneof![Just(3u64), Just(5), Just(7), Just(11)], i in any::<Index>(), j in any::<Index>()) {
        let h = GroupSpec::heisenberg(p).unwrap();
        let n = h.order() as usize;
        let (g, k) = (h.element_at(i.index(n)), h.element_at(j.index(n)));
        let z = h.element(&[0, 0, 1]).unwrap();
        prop_assert_eq!(h.multiply(&g, &z).unwrap(), h.multiply(&z, &g).unwrap());
        prop_assert_eq!(h.pow(&g, p as i64).unwrap(), h.identity());
        let comm = h.multiply(
            &h.multiply(&g, &k).unwrap(),
            &h.multiply(&h.inverse(&g).unwrap(), &h.inverse(&k).unwrap()).unwrap(),
        ).unwrap();
        let x = h.element(&[1, 0, 0]).unwrap();
        let y = h.element(&[0, 1, 0]).unwrap();
        let xy = h.multiply(&h.multiply(&x, &y).unwrap(), &h.multiply(&h.inverse(&x).unwrap(), &h.inverse(&y).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(xy, z);
        // commutators are central
        prop_assert_eq!(h.multiply(&comm, &x).unwrap(), h.multiply(&x, &comm).unwrap());
    }

    #[test]
    fn evaluation_is_a_homomorphism(
        u in prop::collection::vec((0usize..3, -4i64..=4), 0..10),
        v in prop::collection::vec((0usize..3, -4i64..=4), 0..10),
        spec in prop_oneof![Just("heisenberg:5"), Just("dihedral:9"), Just("cyclic:12")],
    ) {
        let spec: GroupSpec = spec.parse().unwrap();
        let names = ["x", "y", "z"];
        let word = |w: &[(usize, i64)]| Word::from_pairs(w.iter().map(|&(g, e)| (names[g].to_string(), e)));
        let (u, v) = (word(&u), word(&v));
        let n = spec.order() as usize;
        let assignment: BTreeMap<String, _> =
            names.iter().enumerate().map(|(i, g)| (g.to_string(), spec.element_at((3 * i + 1) % n))).collect();
        let eu = spec.evaluate_word(&u, &assignment).unwrap();
        let ev = spec.evaluate_word(&v, &assignment).unwrap();
        prop_assert_eq!(spec.evaluate_word(&u.concat(&v), &assignment).unwrap(), spec.multiply(&eu, &ev).unwrap());
        prop_assert_eq!(spec.evaluate_word(&u.inverse(), &assignment).unwrap(), spec.inverse(&eu).unwrap());
    }
}

#[test]
fn sabotaged_set_breaks_link_at_a() {
    let bad = DifferenceSet::unverified(73, &[0, 1, 2, 3, 4, 5, 6, 7, 8]);
    for rim_groups in [RimGroups::Cyclic, RimGroups::Dihedral] {
        let options = ComplexOptions { rim_groups, edge_permutation: None };
        let complex = assemble_complex_e(7, &bad, &PAPER_PAIRING_P7, &options).unwrap();
        let reports = verify_links(&complex).unwrap();
        let a = &reports[0];
        assert_eq!(a.vertex, "a");
        assert!(!a.satisfied);
        assert!(a.certificate.as_ref().unwrap().girth.unwrap() < 12);
        assert!(reports[1..].iter().all(|r| r.satisfied));
    }
}
