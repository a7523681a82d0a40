//! Group presentations for the triangle-of-groups family, Tietze elimination,
//! relator statistics and abelianization.

mod complex;
mod smith;

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub use complex::{
    assemble_complex_e, swiatkowski_complex, verify_links, verify_links_capped, ComplexEdge, ComplexOfGroups,
    ComplexOptions, ComplexVertex, LinkReport, RimGroups, SwiatkowskiComplex, DEFAULT_MAX_LINK_VERTICES,
};
pub use smith::smith_normal_form;

use crate::diffsets::DifferenceSet;
use crate::group::{is_prime, GroupElement, GroupSpec, Subgroup};
use crate::polygons::heisenberg_quadrangle_words;
use crate::word::Word;
use crate::Error;

/// Word-to-sigma assignment for `p = 7` and the mod-73 set: `pairing[i]` is the
/// index (into the sorted residues) of the reflection paired with quadrangle word `i`.
pub const PAPER_PAIRING_P7: [usize; 9] = [3, 5, 4, 1, 0, 2, 8, 6, 7];

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
}

impl Presentation {
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Result<Self, Error> {
        let pres = Presentation { generators, relators };
        pres.validate()?;
        Ok(pres)
    }

    pub fn validate(&self) -> Result<(), Error> {
        let gens: BTreeSet<&str> = self.generators.iter().map(String::as_str).collect();
        if gens.len() != self.generators.len() {
            return Err(Error::Parse("duplicate generator".into()));
        }
        for r in &self.relators {
            if let Some((g, _)) = r.letters().find(|(g, _)| !gens.contains(g)) {
                return Err(Error::Parse(format!("relator {r} uses undeclared generator {g}")));
            }
        }
        Ok(())
    }
}

/// `t r^sigma` for each residue, with `sigma` in `(-n/2, n/2]`.
pub fn reflection_words(ds: &DifferenceSet) -> Vec<Word> {
    ds.signed_representatives()
        .values
        .iter()
        .map(|&s| Word::from_pairs([("t".to_string(), 1), ("r".to_string(), s)]))
        .collect()
}

/// `{t r^sigma}` in the dihedral group of order `2n`.
pub fn reflection_connection(spec: &GroupSpec, ds: &DifferenceSet) -> Result<Vec<GroupElement>, Error> {
    if *spec != GroupSpec::Dihedral(ds.modulus()) {
        return Err(Error::Precondition(format!(
            "reflections of a mod-{} set live in dihedral:{}",
            ds.modulus(),
            ds.modulus()
        )));
    }
    ds.residues().iter().map(|&s| spec.element(&[1, s])).collect()
}

/// The order-2 subgroups `<t r^sigma>`.
pub fn dihedral_reflection_subgroups(spec: &GroupSpec, ds: &DifferenceSet) -> Result<Vec<Subgroup>, Error> {
    reflection_connection(spec, ds)?.iter().map(|g| spec.subgroup_closure(std::slice::from_ref(g))).collect()
}

fn check_pairing(pairing: &[usize], len: usize) -> Result<(), Error> {
    let distinct: BTreeSet<usize> = pairing.iter().copied().collect();
    if pairing.len() != len || distinct.len() != len || distinct.iter().any(|&j| j >= len) {
        return Err(Error::Precondition(format!("pairing {pairing:?} is not a bijection on {len} items")));
    }
    Ok(())
}

fn check_family_inputs(p: u64, ds: &DifferenceSet) -> Result<(), Error> {
    if p == 2 || !is_prime(p) {
        return Err(Error::Precondition(format!("p = {p} must be an odd prime")));
    }
    let q = p + 1;
    if ds.order() != q || ds.modulus() != q * q + q + 1 {
        return Err(Error::Precondition(format!(
            "difference set has order {} mod {}, need order {q} mod {}",
            ds.order(),
            ds.modulus(),
            q * q + q + 1
        )));
    }
    Ok(())
}

/// Generators `x, y, z, t, r`; relators `x^p, y^p, [x,y]z^-1, [x,z], [y,z], t^2, r^n, trtr`
/// followed by one commutator `[w_i, t r^sigma_j]` per pair, listed in residue order.
pub fn emit_e_presentation(p: u64, ds: &DifferenceSet, pairing: &[usize]) -> Result<Presentation, Error> {
    check_family_inputs(p, ds)?;
    let words = heisenberg_quadrangle_words(p)?;
    let reflections = reflection_words(ds);
    check_pairing(pairing, words.len())?;

    let pe = p as i64;
    let n = ds.modulus() as i64;
    let g = Word::generator;
    let mut relators = vec![
        Word::power_of("x", pe),
        Word::power_of("y", pe),
        Word::commutator(&g("x"), &g("y")).concat(&Word::power_of("z", -1)),
        Word::commutator(&g("x"), &g("z")),
        Word::commutator(&g("y"), &g("z")),
        Word::power_of("t", 2),
        Word::power_of("r", n),
        "trtr".parse()?,
    ];
    for (j, refl) in reflections.iter().enumerate() {
        let i = pairing.iter().position(|&s| s == j).expect("bijection");
        relators.push(Word::commutator(&words[i], refl));
    }
    Presentation::new(["x", "y", "z", "t", "r"].map(String::from).to_vec(), relators)
}

/// Tietze elimination of `gen` using the first relator in which it occurs exactly
/// once with exponent ±1.
pub fn eliminate_generator(pres: &Presentation, gen: &str) -> Result<Presentation, Error> {
    let (idx, syllable) = pres
        .relators
        .iter()
        .enumerate()
        .find_map(|(i, r)| {
            let hits: Vec<usize> =
                r.syllables().iter().enumerate().filter(|(_, (g, _))| g == gen).map(|(k, _)| k).collect();
            match hits.as_slice() {
                [k] if r.syllables()[*k].1.abs() == 1 => Some((i, *k)),
                _ => None,
            }
        })
        .ok_or_else(|| Error::NoDefiningRelator(gen.to_string()))?;
    let definer = &pres.relators[idx];
    let (prefix, suffix) = definer.split_at_syllable(syllable);
    // prefix g^e suffix = 1  =>  g^e = prefix^-1 suffix^-1
    let value = if definer.syllables()[syllable].1 == 1 {
        prefix.inverse().concat(&suffix.inverse())
    } else {
        suffix.concat(&prefix)
    };
    let relators =
        pres.relators.iter().enumerate().filter(|&(i, _)| i != idx).map(|(_, r)| r.substitute(gen, &value)).collect();
    let generators = pres.generators.iter().filter(|g| *g != gen).cloned().collect();
    Presentation::new(generators, relators)
}

/// Removes `z` via its defining relator `[x, y] z^-1`.
pub fn eliminate_z(pres: &Presentation) -> Result<Presentation, Error> {
    eliminate_generator(pres, "z")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelatorStats {
    pub lengths: Vec<u64>,
    pub max: u64,
    pub total: u64,
}

pub fn relator_stats(pres: &Presentation) -> RelatorStats {
    let lengths: Vec<u64> = pres.relators.iter().map(Word::length).collect();
    RelatorStats { max: lengths.iter().copied().max().unwrap_or(0), total: lengths.iter().sum(), lengths }
}

/// Length of `[w, t r^sigma]` before any cancellation.
pub fn commutator_cost(word_len: u64, sigma: i64) -> u64 {
    2 * word_len + 2 * (1 + sigma.unsigned_abs())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingChoice {
    pub pairing: Vec<usize>,
    pub max_cost: u64,
}

/// Bijection minimising the largest commutator length; ties go to the
/// lexicographically least assignment.
///
/// The optimum is found by threshold search with bipartite matching, then each
/// word greedily takes the smallest sigma index that still admits a perfect
/// matching under the optimum.
pub fn optimize_pairing(words: &[Word], sigmas: &[i64]) -> Result<PairingChoice, Error> {
    let m = words.len();
    if sigmas.len() != m {
        return Err(Error::Precondition(format!("{} words but {} reflections", m, sigmas.len())));
    }
    let cost: Vec<Vec<u64>> =
        words.iter().map(|w| sigmas.iter().map(|&s| commutator_cost(w.length(), s)).collect()).collect();
    let mut thresholds: Vec<u64> = cost.iter().flatten().copied().collect();
    thresholds.sort_unstable();
    thresholds.dedup();
    if m == 0 {
        return Ok(PairingChoice { pairing: vec![], max_cost: 0 });
    }
    let feasible = |limit: u64, fixed: &[usize]| has_perfect_matching(&cost, limit, fixed);
    let (mut lo, mut hi) = (0, thresholds.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(thresholds[mid], &[]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let limit = thresholds[lo];
    let mut fixed: Vec<usize> = Vec::with_capacity(m);
    for i in 0..m {
        let j = (0..m)
            .find(|&j| {
                if fixed.contains(&j) || cost[i][j] > limit {
                    return false;
                }
                fixed.push(j);
                let ok = feasible(limit, &fixed);
                fixed.pop();
                ok
            })
            .expect("a feasible completion exists at the optimal threshold");
        fixed.push(j);
    }
    Ok(PairingChoice { pairing: fixed, max_cost: limit })
}

/// Perfect matching with all used costs `<= limit`, rows `0..fixed.len()` pre-assigned.
fn has_perfect_matching(cost: &[Vec<u64>], limit: u64, fixed: &[usize]) -> bool {
    let m = cost.len();
    let mut owner: Vec<Option<usize>> = vec![None; m];
    for (i, &j) in fixed.iter().enumerate() {
        owner[j] = Some(i);
    }
    fn augment(
        i: usize,
        cost: &[Vec<u64>],
        limit: u64,
        frozen: usize,
        owner: &mut [Option<usize>],
        seen: &mut [bool],
    ) -> bool {
        for j in 0..cost.len() {
            if cost[i][j] > limit || seen[j] {
                continue;
            }
            seen[j] = true;
            match owner[j] {
                Some(k) if k < frozen => continue,
                Some(k) => {
                    if augment(k, cost, limit, frozen, owner, seen) {
                        owner[j] = Some(i);
                        return true;
                    }
                }
                None => {
                    owner[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    for i in fixed.len()..m {
        let mut seen = vec![false; m];
        if !augment(i, cost, limit, fixed.len(), &mut owner, &mut seen) {
            return false;
        }
    }
    true
}

/// Invariant factors of the abelianization: entries `> 1` of the Smith normal
/// form of the exponent-sum matrix, then one `0` per free rank.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianInvariants {
    pub invariant_factors: Vec<u64>,
}

impl AbelianInvariants {
    pub fn is_finite(&self) -> bool {
        !self.invariant_factors.contains(&0)
    }

    /// Order of the abelianization, `None` if infinite.
    pub fn order(&self) -> Option<u128> {
        self.is_finite().then(|| self.invariant_factors.iter().map(|&d| d as u128).product())
    }
}

/// Rows are relators, columns generators.
pub fn exponent_sum_matrix(pres: &Presentation) -> Vec<Vec<i64>> {
    pres.relators.iter().map(|r| pres.generators.iter().map(|g| r.exponent_sum(g)).collect()).collect()
}

pub fn abelianization_invariants(pres: &Presentation) -> AbelianInvariants {
    let matrix = exponent_sum_matrix(pres);
    let diagonal = smith_normal_form(&matrix, pres.generators.len());
    let rank = diagonal.iter().filter(|&&d| d != 0).count();
    let mut invariant_factors: Vec<u64> = diagonal.iter().filter(|&&d| d > 1).map(|&d| d as u64).collect();
    invariant_factors.extend(std::iter::repeat_n(0, pres.generators.len() - rank));
    AbelianInvariants { invariant_factors }
}

pub fn export_presentation(pres: &Presentation, format: &str) -> Result<String, Error> {
    let mut out = String::new();
    match format {
        "plain" => {
            writeln!(out, "# generators: {}", pres.generators.join(" ")).unwrap();
            for r in &pres.relators {
                writeln!(out, "{r}").unwrap();
            }
        }
        "cas" | "gap" => {
            let quoted: Vec<String> = pres.generators.iter().map(|g| format!("\"{g}\"")).collect();
            writeln!(out, "F := FreeGroup({});;", quoted.join(", ")).unwrap();
            for (i, g) in pres.generators.iter().enumerate() {
                writeln!(out, "{g} := F.{};;", i + 1).unwrap();
            }
            writeln!(out, "rels := [").unwrap();
            let body: Vec<String> = pres.relators.iter().map(|r| format!("  {}", cas_word(r))).collect();
            if !body.is_empty() {
                writeln!(out, "{}", body.join(",\n")).unwrap();
            }
            writeln!(out, "];;").unwrap();
            writeln!(out, "G := F / rels;;").unwrap();
        }
        other => return Err(Error::UnknownFormat(other.to_string())),
    }
    Ok(out)
}

fn cas_word(w: &Word) -> String {
    if w.is_identity() {
        return "One(F)".to_string();
    }
    w.letters().map(|(g, &e)| if e == 1 { g.to_string() } else { format!("{g}^{e}") }).collect::<Vec<_>>().join("*")
}

/// Parses the plain format: optional `# generators: ...` line, then one relator per line.
/// Without a generators line the alphabet is every generator used, in order of appearance.
pub fn parse_plain(text: &str) -> Result<Presentation, Error> {
    let mut generators: Option<Vec<String>> = None;
    let mut relators = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(list) = rest.trim().strip_prefix("generators:") {
                generators = Some(list.split_whitespace().map(String::from).collect());
            }
            continue;
        }
        relators.push(line.parse::<Word>()?);
    }
    let generators = generators.unwrap_or_else(|| {
        let mut seen = Vec::new();
        for r in &relators {
            for (g, _) in r.letters() {
                if !seen.iter().any(|s: &String| s == g) {
                    seen.push(g.to_string());
                }
            }
        }
        seen
    });
    Presentation::new(generators, relators)
}
