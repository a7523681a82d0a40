//! End-to-end check runs: every finite certificate for one member `p` of the family.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::diffsets::{difference_set_for_order, verify_difference_set, DifferenceSet};
use crate::graphs::{self, BipartiteGraph};
use crate::group::{is_prime, GroupSpec};
use crate::polygons::{heisenberg_quadrangle_subgroups, heisenberg_quadrangle_words, kantor_check, recognize_polygon};
use crate::presentations::{
    abelianization_invariants, assemble_complex_e, dihedral_reflection_subgroups, eliminate_z, emit_e_presentation,
    optimize_pairing, reflection_connection, relator_stats, verify_links_capped, ComplexOptions, Presentation,
    RimGroups, DEFAULT_MAX_LINK_VERTICES, PAPER_PAIRING_P7,
};
use crate::spectra::{
    lambda_closed_forms, normalized_laplacian_gap, normalized_laplacian_spectrum, property_t_report,
    CLOSED_FORM_AGREEMENT, DEFAULT_TOLERANCE,
};
use crate::word::Word;
use crate::Error;

/// Largest graph handed to the dense eigensolver.
pub const MAX_DENSE_SPECTRUM: usize = 1200;

/// The 17 relators of the `p = 7` presentation as printed.
pub const RELATORS_P7: [&str; 17] = [
    "x^7",
    "y^7",
    "[x, y]z^{-1}",
    "[x, z]",
    "[y, z]",
    "t^2",
    "r^{73}",
    "trtr",
    "[x^{2}yz^{-1}, t]",
    "[xyz^3, tr]",
    "[x^{3}yz^{2}, tr^{17}]",
    "[x, tr^{-34}]",
    "[y, tr^{-32}]",
    "[z, tr^{-29}]",
    "[x^{-2}yz, tr^{-25}]",
    "[x^{-1}yz^{-3}, tr^{-19}]",
    "[x^{-3}yz^{-2}, tr^{-11}]",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub status: CheckStatus,
}

impl CheckResult {
    fn compare(name: &str, expected: impl ToString, observed: impl ToString) -> Self {
        let (expected, observed) = (expected.to_string(), observed.to_string());
        let status = if expected == observed { CheckStatus::Pass } else { CheckStatus::Fail };
        CheckResult { name: name.into(), expected, observed, status }
    }

    fn skip(name: &str, expected: impl ToString, why: impl ToString) -> Self {
        CheckResult {
            name: name.into(),
            expected: expected.to_string(),
            observed: format!("skipped: {}", why.to_string()),
            status: CheckStatus::Skip,
        }
    }

    fn error(name: &str, expected: impl ToString, err: &Error) -> Self {
        CheckResult {
            name: name.into(),
            expected: expected.to_string(),
            observed: format!("error: {err}"),
            status: CheckStatus::Fail,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub checks: Vec<CheckResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    /// Filled in only when timing is requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub max_link_vertices: usize,
    pub parallel: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { max_link_vertices: DEFAULT_MAX_LINK_VERTICES, parallel: false }
    }
}

/// Inputs shared by every check of a run.
struct Setup {
    p: u64,
    ds: DifferenceSet,
    pairing: Vec<usize>,
    exact_relators: bool,
    cap: usize,
}

/// The full certificate run; `p = 7` uses the mod-73 set and the published pairing.
pub fn verify_paper(p: u64, options: &RunOptions) -> Result<RunReport, Error> {
    check_prime(p)?;
    let (ds, pairing) = if p == 7 {
        (DifferenceSet::mod_73(), PAPER_PAIRING_P7.to_vec())
    } else {
        let ds = difference_set_for_order(p + 1)?;
        let pairing = optimal_pairing(p, &ds)?;
        (ds, pairing)
    };
    let setup = Setup { p, ds, pairing, exact_relators: p == 7, cap: options.max_link_vertices };
    Ok(run("verify-paper", setup, options, Vec::new()))
}

/// Generic family member: searched or Singer difference set, optimized pairing.
pub fn family(p: u64, options: &RunOptions) -> Result<RunReport, Error> {
    check_prime(p)?;
    let mut warnings = Vec::new();
    if !(p + 1).is_power_of_two() {
        warnings.push(format!("p = {p} is not a Mersenne prime; p + 1 = {} is not a power of 2", p + 1));
    }
    let ds = difference_set_for_order(p + 1)?;
    let pairing = optimal_pairing(p, &ds)?;
    let setup = Setup { p, ds, pairing, exact_relators: false, cap: options.max_link_vertices };
    Ok(run("family", setup, options, warnings))
}

fn check_prime(p: u64) -> Result<(), Error> {
    if p == 2 || !is_prime(p) {
        return Err(Error::Precondition(format!("p = {p} must be an odd prime")));
    }
    Ok(())
}

/// Pairing minimizing the longest commutator once `z` is written as `[x, y]`.
pub fn optimal_pairing(p: u64, ds: &DifferenceSet) -> Result<Vec<usize>, Error> {
    let z = Word::commutator(&Word::generator("x"), &Word::generator("y"));
    let words: Vec<Word> = heisenberg_quadrangle_words(p)?.iter().map(|w| w.substitute("z", &z)).collect();
    Ok(optimize_pairing(&words, &ds.signed_representatives().values)?.pairing)
}

type GraphBuilder = fn(&Setup) -> Result<BipartiteGraph, Error>;

type Check<'a> = Box<dyn Fn() -> Vec<CheckResult> + Send + Sync + 'a>;

fn run(command: &str, setup: Setup, options: &RunOptions, warnings: Vec<String>) -> RunReport {
    let s = &setup;
    let checks: Vec<Check> = vec![
        Box::new(move || check_difference_set(s)),
        Box::new(move || check_plane(s)),
        Box::new(move || check_link_at_a(s)),
        Box::new(move || check_quadrangle(s)),
        Box::new(move || check_rim_links(s)),
        Box::new(move || check_spectra(s)),
        Box::new(move || check_verdict(s)),
        Box::new(move || check_presentation(s)),
        Box::new(move || check_links(s)),
    ];
    let results: Vec<Vec<CheckResult>> = if options.parallel {
        std::thread::scope(|scope| {
            let handles: Vec<_> = checks.iter().map(|c| scope.spawn(c)).collect();
            handles.into_iter().map(|h| h.join().expect("check panicked")).collect()
        })
    } else {
        checks.iter().map(|c| c()).collect()
    };

    let mut inputs = BTreeMap::new();
    inputs.insert("p".to_string(), setup.p.to_string());
    inputs.insert("modulus".to_string(), setup.ds.modulus().to_string());
    inputs.insert("difference_set".to_string(), format!("{:?}", setup.ds.residues()));
    inputs.insert("pairing".to_string(), format!("{:?}", setup.pairing));
    inputs.insert("max_link_vertices".to_string(), setup.cap.to_string());
    RunReport {
        command: command.to_string(),
        inputs,
        checks: results.into_iter().flatten().collect(),
        warnings,
        wall_time_ms: None,
    }
}

fn plane_graph(s: &Setup) -> Result<BipartiteGraph, Error> {
    let d = GroupSpec::dihedral(s.ds.modulus())?;
    graphs::cayley_graph(&d, &reflection_connection(&d, &s.ds)?)
}

fn quadrangle_graph(s: &Setup) -> Result<BipartiteGraph, Error> {
    let h = GroupSpec::heisenberg(s.p)?;
    graphs::coset_graph(&h, &heisenberg_quadrangle_subgroups(s.p)?)
}

fn fmt_opt(v: Option<u32>) -> String {
    v.map_or("inf".to_string(), |x| x.to_string())
}

fn check_difference_set(s: &Setup) -> Vec<CheckResult> {
    let q = s.p + 1;
    let cert = verify_difference_set(s.ds.modulus(), s.ds.residues());
    vec![CheckResult::compare(
        "difference set",
        format!("valid, q={q}, n={}", q * q + q + 1),
        format!("{}, q={}, n={}", if cert.valid { "valid" } else { "invalid" }, cert.order, cert.modulus),
    )]
}

fn check_plane(s: &Setup) -> Vec<CheckResult> {
    let name = "plane incidence graph (Cayley)";
    let q = s.p + 1;
    let n = s.ds.modulus();
    let expected =
        format!("V={}, {}-regular, bipartite, girth 6, diameter 3, polygon n=3 (s,t)=({q},{q})", 2 * n, q + 1);
    if 2 * n as usize > s.cap {
        return vec![CheckResult::skip(name, expected, format!("{} vertices above cap", 2 * n))];
    }
    let graph = match plane_graph(s) {
        Ok(g) => g,
        Err(e) => return vec![CheckResult::error(name, expected, &e)],
    };
    let cert = graphs::certificate(&graph);
    let regular = cert.degrees.values().flat_map(|m| m.keys()).collect::<std::collections::BTreeSet<_>>();
    let degree = if regular.len() == 1 { regular.iter().next().unwrap().to_string() } else { "irregular".into() };
    let polygon = match recognize_polygon(&graph) {
        Ok(pc) => format!("polygon n={} (s,t)=({},{})", pc.gonality, pc.order.0, pc.order.1),
        Err(r) => format!("not a polygon: {r:?}"),
    };
    let observed = format!(
        "V={}, {degree}-regular, {}, girth {}, diameter {}, {polygon}",
        cert.vertices,
        if cert.bipartite { "bipartite" } else { "not bipartite" },
        fmt_opt(cert.girth),
        fmt_opt(cert.diameter),
    );
    vec![CheckResult::compare(name, expected, observed)]
}

fn check_link_at_a(s: &Setup) -> Vec<CheckResult> {
    let name = "link at a (dihedral coset graph)";
    let q = s.p + 1;
    let n = s.ds.modulus() as usize;
    let size = 2 * n + (q as usize + 1) * n;
    let expected = format!("V={size}, girth 12, certificate equals subdivided plane");
    if size > s.cap {
        return vec![CheckResult::skip(name, expected, format!("{size} vertices above cap"))];
    }
    let result = (|| -> Result<String, Error> {
        let d = GroupSpec::dihedral(s.ds.modulus())?;
        let coset = graphs::coset_graph(&d, &dihedral_reflection_subgroups(&d, &s.ds)?)?;
        let sub = graphs::barycentric_subdivision(&plane_graph(s)?);
        let a = graphs::certificate(&coset);
        let b = graphs::certificate(&sub);
        Ok(format!(
            "V={}, girth {}, certificate {} subdivided plane",
            a.vertices,
            fmt_opt(a.girth),
            if a == b { "equals" } else { "differs from" }
        ))
    })();
    match result {
        Ok(observed) => vec![CheckResult::compare(name, expected, observed)],
        Err(e) => vec![CheckResult::error(name, expected, &e)],
    }
}

fn check_quadrangle(s: &Setup) -> Vec<CheckResult> {
    let p = s.p;
    let name = "link at b (Heisenberg coset graph)";
    let size = (p * p * p + (p + 2) * p * p) as usize;
    let expected =
        format!("V={size}, degrees {{{}, {}}}, girth 8, diameter 4, polygon n=4 (s,t)=({},{})", p + 2, p, p + 1, p - 1);
    let mut out = Vec::new();
    let kantor_expected = format!("pairwise, triple, count all true; {} = {}*{}", p * p * p, p, 1 + (p + 1) * (p - 1));
    let kantor = (|| -> Result<String, Error> {
        let h = GroupSpec::heisenberg(p)?;
        let r = kantor_check(&h, &heisenberg_quadrangle_subgroups(p)?)?;
        let all = r.pairwise_trivial && r.triple_trivial && r.count_matches == Some(true);
        let (ss, t) = r.implied_order.unwrap_or((0, 0));
        Ok(format!(
            "pairwise, triple, count {}; {} = {}*{}",
            if all { "all true" } else { "not all true" },
            r.group_order,
            1 + t,
            1 + ss * t
        ))
    })();
    out.push(match kantor {
        Ok(observed) => CheckResult::compare("quadrangle subgroup criterion", kantor_expected, observed),
        Err(e) => CheckResult::error("quadrangle subgroup criterion", kantor_expected, &e),
    });
    if size > s.cap {
        out.push(CheckResult::skip(name, expected, format!("{size} vertices above cap")));
        return out;
    }
    out.push(match quadrangle_graph(s) {
        Ok(graph) => {
            let cert = graphs::certificate(&graph);
            let (d0, d1) = cert.biregular_degrees().unwrap_or((0, 0));
            let polygon = match recognize_polygon(&graph) {
                Ok(pc) => format!("polygon n={} (s,t)=({},{})", pc.gonality, pc.order.0, pc.order.1),
                Err(r) => format!("not a polygon: {r:?}"),
            };
            let observed = format!(
                "V={}, degrees {{{d0}, {d1}}}, girth {}, diameter {}, {polygon}",
                cert.vertices,
                fmt_opt(cert.girth),
                fmt_opt(cert.diameter)
            );
            CheckResult::compare(name, expected, observed)
        }
        Err(e) => CheckResult::error(name, expected, &e),
    });
    out
}

fn check_rim_links(s: &Setup) -> Vec<CheckResult> {
    let p = s.p;
    let expected = format!("K_2,{p} with girth 4 for cyclic and dihedral rim groups");
    let result = (|| -> Result<String, Error> {
        let cyc = GroupSpec::cyclic(2 * p)?;
        let dih = GroupSpec::dihedral(p)?;
        let cert_of = |g: &GroupSpec, a: &[u64], b: &[u64]| -> Result<_, Error> {
            let pa = g.subgroup_closure(&[g.element(a)?])?;
            let pb = g.subgroup_closure(&[g.element(b)?])?;
            Ok(graphs::certificate(&graphs::link_graph(g, &pa, &pb)?))
        };
        let c = cert_of(&cyc, &[p], &[2])?;
        let d = cert_of(&dih, &[1, 0], &[0, 1])?;
        let complete = c.edges == 2 * p as usize && c.vertices == p as usize + 2;
        let (d0, d1) = c.biregular_degrees().unwrap_or((0, 0));
        Ok(format!(
            "{} with girth {} for cyclic and {} rim groups",
            if complete { format!("K_{},{}", d1.min(d0), d1.max(d0)) } else { "not complete bipartite".into() },
            fmt_opt(c.girth),
            if c == d { "dihedral" } else { "different certificate for dihedral" }
        ))
    })();
    vec![match result {
        Ok(observed) => CheckResult::compare("rim links", expected, observed),
        Err(e) => CheckResult::error("rim links", expected, &e),
    }]
}

fn check_spectra(s: &Setup) -> Vec<CheckResult> {
    let (lp, lq) = lambda_closed_forms(s.p);
    let mut out = Vec::new();
    let graphs: [(&str, f64, GraphBuilder, usize); 2] = [
        ("spectral gap of plane", lp, plane_graph, 2 * s.ds.modulus() as usize),
        ("spectral gap of quadrangle", lq, quadrangle_graph, (s.p * s.p * s.p + (s.p + 2) * s.p * s.p) as usize),
    ];
    for (name, closed, build, size) in graphs {
        let expected = format!("|lambda - {closed:.9}| < {CLOSED_FORM_AGREEMENT:e}; spectrum symmetric about 1");
        if size > MAX_DENSE_SPECTRUM.min(s.cap) {
            out.push(CheckResult::skip(name, expected, format!("{size} vertices above dense limit")));
            continue;
        }
        let result = (|| -> Result<String, Error> {
            let graph = build(s)?;
            let gap = normalized_laplacian_gap(&graph, name, DEFAULT_TOLERANCE)?;
            let spectrum = normalized_laplacian_spectrum(&graph)?;
            let symmetric = spectrum.iter().zip(spectrum.iter().rev()).all(|(a, b)| (a + b - 2.0).abs() < 1e-8);
            let close = (gap.lambda - closed).abs() < CLOSED_FORM_AGREEMENT;
            Ok(format!(
                "|lambda - {closed:.9}| {} {CLOSED_FORM_AGREEMENT:e}; spectrum {}",
                if close { "<" } else { ">=" },
                if symmetric { "symmetric about 1" } else { "not symmetric" }
            ))
        })();
        out.push(match result {
            Ok(observed) => CheckResult::compare(name, expected, observed),
            Err(e) => CheckResult::error(name, expected, &e),
        });
    }
    out
}

fn check_verdict(s: &Setup) -> Vec<CheckResult> {
    let expected = format!("kazhdan={}", s.p >= 6);
    vec![match property_t_report(s.p, false) {
        Ok(v) => CheckResult::compare("spectral criterion verdict", expected, format!("kazhdan={}", v.kazhdan)),
        Err(e) => CheckResult::error("spectral criterion verdict", expected, &e),
    }]
}

fn check_presentation(s: &Setup) -> Vec<CheckResult> {
    let p = s.p;
    let pres = match emit_e_presentation(p, &s.ds, &s.pairing) {
        Ok(pres) => pres,
        Err(e) => return vec![CheckResult::error("presentation", "emitted", &e)],
    };
    let mut out = Vec::new();
    if s.exact_relators {
        let expected: Result<Vec<Word>, _> = RELATORS_P7.iter().map(|r| r.parse::<Word>()).collect();
        let same = expected.is_ok_and(|e| e == pres.relators);
        out.push(CheckResult::compare(
            "presentation reproduces published relators",
            "17 relators, identical",
            format!("{} relators, {}", pres.relators.len(), if same { "identical" } else { "different" }),
        ));
    } else {
        out.push(CheckResult::compare(
            "presentation relator count",
            format!("{} relators", 8 + p + 2),
            format!("{} relators", pres.relators.len()),
        ));
    }
    out.push(match eliminate_z(&pres) {
        Ok(reduced) => {
            let stats = relator_stats(&reduced);
            let count = format!("{} generators, {} relators", reduced.generators.len(), reduced.relators.len());
            if s.exact_relators {
                CheckResult::compare(
                    "z-elimination",
                    "4 generators, 16 relators, max length 73",
                    format!("{count}, max length {}", stats.max),
                )
            } else {
                CheckResult::compare("z-elimination", format!("4 generators, {} relators", 7 + p + 2), count)
            }
        }
        Err(e) => CheckResult::error("z-elimination", "z eliminated", &e),
    });
    out.push(abelianization_check(&pres, 2 * p * p));
    out
}

fn abelianization_check(pres: &Presentation, order: u64) -> CheckResult {
    let inv = abelianization_invariants(pres);
    CheckResult::compare(
        "abelianization",
        format!("finite of order {order}"),
        match inv.order() {
            Some(o) => format!("finite of order {o}"),
            None => format!("infinite, factors {:?}", inv.invariant_factors),
        },
    )
}

fn check_links(s: &Setup) -> Vec<CheckResult> {
    let mut out = Vec::new();
    for rim in [RimGroups::Cyclic, RimGroups::Dihedral] {
        let label = match rim {
            RimGroups::Cyclic => "cyclic",
            RimGroups::Dihedral => "dihedral",
        };
        let options = ComplexOptions { rim_groups: rim, edge_permutation: None };
        let reports = assemble_complex_e(s.p, &s.ds, &s.pairing, &options).and_then(|c| verify_links_capped(&c, s.cap));
        let reports = match reports {
            Ok(r) => r,
            Err(e) => {
                out.push(CheckResult::error(&format!("link condition ({label} rim)"), "satisfied", &e));
                continue;
            }
        };
        for r in reports {
            let name = format!("link condition at {} ({label} rim)", r.vertex);
            let expected = format!("girth >= {}", r.required_girth);
            out.push(if r.skipped {
                CheckResult::skip(&name, expected, format!("{} vertices above cap", r.link_vertices))
            } else {
                let girth = r.certificate.as_ref().and_then(|c| c.girth);
                let observed = if r.satisfied { expected.clone() } else { format!("girth {}", fmt_opt(girth)) };
                CheckResult::compare(&name, expected, observed)
            });
        }
    }
    out
}
