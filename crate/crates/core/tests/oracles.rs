//! Library results checked against independent brute-force computations.

use std::collections::BTreeMap;

use kazhdan_core::diffsets::{search_difference_set, singer_difference_set, verify_difference_set};
use kazhdan_core::graphs::{self, BipartiteGraph};
use kazhdan_core::pipeline::{verify_paper, RunOptions};
use kazhdan_core::polygons::{heisenberg_quadrangle_subgroups, heisenberg_quadrangle_words};
use kazhdan_core::presentations::{
    abelianization_invariants, commutator_cost, dihedral_reflection_subgroups, emit_e_presentation, optimize_pairing,
    reflection_connection, PAPER_PAIRING_P7,
};
use kazhdan_core::spectra::normalized_laplacian_spectrum;
use kazhdan_core::{DifferenceSet, GroupElement, GroupSpec, Word};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const INF: u32 = u32::MAX / 4;

fn floyd_warshall(g: &BipartiteGraph) -> Vec<Vec<u32>> {
    let n = g.vertex_count();
    let mut d = vec![vec![INF; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0;
        for &u in g.neighbors(v) {
            row[u] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Shortest cycle through each edge: delete it and measure the detour.
fn brute_girth(g: &BipartiteGraph) -> Option<u32> {
    let n = g.vertex_count();
    let edges: Vec<_> = g.edges().collect();
    let mut best = INF;
    for &(u, v) in &edges {
        let rest = edges.iter().copied().filter(|&e| e != (u, v));
        let h = BipartiteGraph::unlabelled(n, rest).unwrap();
        let d = floyd_warshall(&h);
        best = best.min(d[u][v].saturating_add(1));
    }
    (best < INF).then_some(best)
}

fn brute_diameter(g: &BipartiteGraph) -> Option<u32> {
    let d = floyd_warshall(g);
    let max = d.iter().flatten().copied().max().unwrap_or(0);
    (max < INF).then_some(max)
}

fn small_corpus() -> Vec<(String, BipartiteGraph)> {
    let mut out = Vec::new();
    for q in [2, 3, 4] {
        let ds = search_difference_set(q).unwrap();
        let d = GroupSpec::dihedral(ds.modulus()).unwrap();
        out.push((format!("plane {q}"), graphs::cayley_graph(&d, &reflection_connection(&d, &ds).unwrap()).unwrap()));
    }
    let fano = search_difference_set(2).unwrap();
    let d7 = GroupSpec::dihedral(7).unwrap();
    out.push((
        "fano coset".into(),
        graphs::coset_graph(&d7, &dihedral_reflection_subgroups(&d7, &fano).unwrap()).unwrap(),
    ));
    for (n, a, b) in [(14, 7, 2), (6, 3, 2), (12, 6, 4)] {
        let c = GroupSpec::cyclic(n).unwrap();
        let pa = c.subgroup_closure(&[c.element(&[a]).unwrap()]).unwrap();
        let pb = c.subgroup_closure(&[c.element(&[b]).unwrap()]).unwrap();
        out.push((format!("link cyclic {n}"), graphs::link_graph(&c, &pa, &pb).unwrap()));
    }
    for n in [4, 5, 6, 9, 16] {
        let c = GroupSpec::cyclic(n).unwrap();
        let conn = [c.element(&[1]).unwrap(), c.element(&[n - 1]).unwrap()];
        out.push((format!("cycle {n}"), graphs::cayley_graph(&c, &conn).unwrap()));
    }
    let petersen =
        BipartiteGraph::unlabelled(10, (0..5).flat_map(|i| [(i, (i + 1) % 5), (i, i + 5), (i + 5, (i + 2) % 5 + 5)]))
            .unwrap();
    out.push(("petersen".into(), petersen));
    out.push(("path".into(), BipartiteGraph::unlabelled(4, [(0, 1), (1, 2), (2, 3)]).unwrap()));
    out.push(("two components".into(), BipartiteGraph::unlabelled(6, [(0, 1), (1, 2), (2, 0), (3, 4)]).unwrap()));
    let fano_plane = out[0].1.clone();
    out.push(("subdivided fano".into(), graphs::barycentric_subdivision(&fano_plane)));
    out
}

#[test]
fn girth_and_diameter_match_floyd_warshall() {
    let mut rng = StdRng::seed_from_u64(11);
    let mut corpus = small_corpus();
    for i in 0..40 {
        let n = rng.random_range(3..=20);
        let edges: Vec<_> =
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|_| rng.random_bool(0.2)).collect();
        corpus.push((format!("random {i}"), BipartiteGraph::unlabelled(n, edges).unwrap()));
    }
    for (name, g) in &corpus {
        assert!(g.vertex_count() <= 60, "{name}");
        assert_eq!(graphs::girth(g), brute_girth(g), "girth of {name}");
        assert_eq!(graphs::diameter(g), brute_diameter(g), "diameter of {name}");
    }
}

fn heisenberg_matrix(p: u64, g: &GroupElement) -> [[u64; 3]; 3] {
    let GroupElement::Heisenberg { a, b, c } = *g else { panic!("not heisenberg") };
    [[1, b, (p - c) % p], [0, 1, a], [0, 0, 1]]
}

fn mat_mul(p: u64, x: [[u64; 3]; 3], y: [[u64; 3]; 3]) -> [[u64; 3]; 3] {
    let mut z = [[0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            z[i][j] = (0..3).map(|k| x[i][k] * y[k][j]).sum::<u64>() % p;
        }
    }
    z
}

/// `t^e r^k` as the affine map `x -> s x + k` on Z/n, composed left to right.
fn dihedral_affine(g: &GroupElement) -> (i64, u64) {
    let GroupElement::Dihedral { flip, rot } = *g else { panic!("not dihedral") };
    (if flip == 1 { -1 } else { 1 }, rot)
}

fn affine_then(n: u64, f: (i64, u64), g: (i64, u64)) -> (i64, u64) {
    let k = (g.0 * f.1 as i64 + g.1 as i64).rem_euclid(n as i64) as u64;
    (f.0 * g.0, k)
}

fn check_associative(spec: &GroupSpec, triples: impl Iterator<Item = (GroupElement, GroupElement, GroupElement)>) {
    for (a, b, c) in triples {
        let left = spec.multiply(&spec.multiply(&a, &b).unwrap(), &c).unwrap();
        let right = spec.multiply(&a, &spec.multiply(&b, &c).unwrap()).unwrap();
        assert_eq!(left, right, "{spec}: ({a})({b})({c})");
    }
}

#[test]
fn exhaustive_associativity() {
    for spec in [GroupSpec::heisenberg(3).unwrap(), GroupSpec::dihedral(7).unwrap(), GroupSpec::cyclic(12).unwrap()] {
        let all: Vec<_> = spec.elements().collect();
        assert_eq!(all.len() as u64, spec.order());
        let mut triples = Vec::new();
        for a in &all {
            for b in &all {
                for c in &all {
                    triples.push((*a, *b, *c));
                }
            }
        }
        check_associative(&spec, triples.into_iter());
    }
}

#[test]
fn random_triples_associative() {
    let mut rng = StdRng::seed_from_u64(7);
    for spec in
        [GroupSpec::heisenberg(7).unwrap(), GroupSpec::dihedral(73).unwrap(), GroupSpec::heisenberg(31).unwrap()]
    {
        let n = spec.order() as usize;
        let triples: Vec<_> = (0..10_000)
            .map(|_| {
                let mut pick = || spec.element_at(rng.random_range(0..n));
                (pick(), pick(), pick())
            })
            .collect();
        check_associative(&spec, triples.into_iter());
    }
}

#[test]
fn heisenberg_matches_unitriangular_matrices() {
    for p in [3, 5, 7] {
        let h = GroupSpec::heisenberg(p).unwrap();
        let all: Vec<_> = h.elements().collect();
        for g in &all {
            for k in &all {
                let prod = heisenberg_matrix(p, &h.multiply(g, k).unwrap());
                assert_eq!(prod, mat_mul(p, heisenberg_matrix(p, g), heisenberg_matrix(p, k)));
            }
            let inv = heisenberg_matrix(p, &h.inverse(g).unwrap());
            assert_eq!(mat_mul(p, heisenberg_matrix(p, g), inv), [[1, 0, 0], [0, 1, 0], [0, 0, 1]]);
        }
    }
}

#[test]
fn dihedral_matches_affine_maps() {
    for n in [3, 7, 73] {
        let d = GroupSpec::dihedral(n).unwrap();
        let all: Vec<_> = d.elements().collect();
        for g in &all {
            for k in &all {
                let prod = dihedral_affine(&d.multiply(g, k).unwrap());
                assert_eq!(prod, affine_then(n, dihedral_affine(g), dihedral_affine(k)));
            }
        }
    }
}

/// Every nonzero difference counted directly.
fn differences_once(n: u64, set: &[u64]) -> bool {
    let mut counts = vec![0u32; n as usize];
    for &a in set {
        for &b in set {
            if a != b {
                counts[((a + n - b) % n) as usize] += 1;
            }
        }
    }
    counts[1..].iter().all(|&c| c == 1)
}

#[test]
fn difference_sets_against_counting() {
    let printed = [0, 1, 17, 39, 41, 44, 48, 54, 62];
    assert!(differences_once(73, &printed));
    assert!(verify_difference_set(73, &printed).valid);
    for q in [2, 3, 4, 5, 7, 8] {
        let ds = search_difference_set(q).unwrap();
        assert!(differences_once(ds.modulus(), ds.residues()), "search q = {q}");
    }
    for q in [2, 3, 4, 5, 7, 8, 11, 13, 16, 32] {
        let ds = singer_difference_set(q).unwrap();
        assert!(differences_once(ds.modulus(), ds.residues()), "singer q = {q}");
    }
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..200 {
        let mut set: Vec<u64> = (0..9).map(|_| rng.random_range(0..73)).collect();
        set.sort_unstable();
        set.dedup();
        assert_eq!(verify_difference_set(73, &set).valid, differences_once(73, &set), "{set:?}");
    }
}

fn exponent_rows(relators: &[Word], generators: &[String]) -> Vec<Vec<i128>> {
    relators
        .iter()
        .map(|r| {
            let mut sums: BTreeMap<&str, i128> = BTreeMap::new();
            for (g, e) in r.letters() {
                *sums.entry(g).or_default() += *e as i128;
            }
            generators.iter().map(|g| sums.get(g.as_str()).copied().unwrap_or(0)).collect()
        })
        .collect()
}

/// Fraction-free Gaussian elimination.
fn bareiss_det(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (k - 1..n)
        .flat_map(|last| {
            combinations(last, k - 1).into_iter().map(move |mut c| {
                c.push(last);
                c
            })
        })
        .collect()
}

#[test]
fn abelianization_order_from_maximal_minors() {
    let pres = emit_e_presentation(7, &DifferenceSet::mod_73(), &PAPER_PAIRING_P7).unwrap();
    let rows = exponent_rows(&pres.relators, &pres.generators);
    assert_eq!((rows.len(), rows[0].len()), (17, 5));
    let cols = rows[0].len();
    let g = combinations(rows.len(), cols)
        .into_iter()
        .map(|pick| bareiss_det(pick.iter().map(|&i| rows[i].clone()).collect()))
        .fold(0, gcd);
    assert_eq!(g, 98);
    let inv = abelianization_invariants(&pres);
    assert_eq!(inv.order(), Some(98));
    assert_eq!(inv.invariant_factors.iter().map(|&d| d as i128).product::<i128>(), g);
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for perm in permutations(n - 1) {
        for pos in 0..=perm.len() {
            let mut p = perm.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}

#[test]
fn pairing_optimum_matches_exhaustive_search() {
    for (p, ds) in [(7, DifferenceSet::mod_73()), (3, search_difference_set(4).unwrap())] {
        let z = Word::commutator(&Word::generator("x"), &Word::generator("y"));
        let words: Vec<Word> = heisenberg_quadrangle_words(p).unwrap().iter().map(|w| w.substitute("z", &z)).collect();
        let sigmas = ds.signed_representatives().values;
        let cost = |perm: &[usize]| {
            perm.iter().enumerate().map(|(i, &s)| commutator_cost(words[i].length(), sigmas[s])).max().unwrap()
        };
        let all = permutations(words.len());
        let best = all.iter().map(|perm| cost(perm)).min().unwrap();
        let least = all.iter().filter(|perm| cost(perm) == best).min().unwrap();
        let choice = optimize_pairing(&words, &sigmas).unwrap();
        assert_eq!(choice.max_cost, best, "p = {p}");
        assert_eq!(&choice.pairing, least, "p = {p}");
    }
}

fn parse_dot(text: &str) -> (Vec<String>, Vec<(usize, usize)>) {
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("graph G {"));
    for line in lines {
        let line = line.trim();
        if line == "}" {
            break;
        }
        let line = line.strip_suffix(';').expect("statement ends with ;");
        if let Some((u, v)) = line.split_once(" -- ") {
            let id = |s: &str| s.trim_start_matches('v').parse::<usize>().unwrap();
            edges.push((id(u), id(v)));
        } else {
            let (id, attrs) = line.split_once(' ').unwrap();
            assert_eq!(id, format!("v{}", nodes.len()));
            nodes.push(attrs.to_string());
        }
    }
    (nodes, edges)
}

#[test]
fn dot_round_trip_of_link_at_a() {
    let d = GroupSpec::dihedral(73).unwrap();
    let g = graphs::coset_graph(&d, &dihedral_reflection_subgroups(&d, &DifferenceSet::mod_73()).unwrap()).unwrap();
    let dot = graphs::export_dot(&g);
    assert_eq!(dot, graphs::export_dot(&g));
    let (nodes, edges) = parse_dot(&dot);
    assert_eq!(nodes.len(), 803);
    assert_eq!(nodes.iter().filter(|a| a.contains("shape=circle")).count(), 146);
    assert_eq!(nodes.iter().filter(|a| a.contains("shape=box")).count(), 657);
    let rebuilt = BipartiteGraph::unlabelled(nodes.len(), edges).unwrap();
    assert_eq!(graphs::certificate(&rebuilt), graphs::certificate(&g));
    for v in 0..g.vertex_count() {
        assert_eq!(rebuilt.neighbors(v), g.neighbors(v));
    }
}

#[test]
fn spectral_invariants() {
    let h = GroupSpec::heisenberg(3).unwrap();
    let mut corpus: Vec<_> = small_corpus().into_iter().map(|(_, g)| g).collect();
    corpus.push(graphs::coset_graph(&h, &heisenberg_quadrangle_subgroups(3).unwrap()).unwrap());
    for g in corpus {
        let spectrum = normalized_laplacian_spectrum(&g).unwrap();
        let n = g.vertex_count() as f64;
        let trace: f64 = spectrum.iter().sum();
        let nonisolated = (0..g.vertex_count()).filter(|&v| g.degree(v) > 0).count() as f64;
        assert!((trace - nonisolated).abs() < 1e-6 * n);
        let zeros = spectrum.iter().filter(|x| x.abs() < 1e-8).count();
        assert_eq!(zeros, graphs::connected_components(&g));
        assert!(spectrum.iter().all(|&x| (-1e-9..=2.0 + 1e-9).contains(&x)));
        if matches!(graphs::is_bipartite(&g), graphs::Bipartition::Coloring(_)) {
            for (a, b) in spectrum.iter().zip(spectrum.iter().rev()) {
                assert!((a + b - 2.0).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn pipeline_is_deterministic() {
    let options = RunOptions::default();
    let a = serde_json::to_string(&verify_paper(7, &options).unwrap()).unwrap();
    let b = serde_json::to_string(&verify_paper(7, &RunOptions { parallel: true, ..options }).unwrap()).unwrap();
    assert_eq!(a, b);
}
