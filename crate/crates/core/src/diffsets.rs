//! Planar difference sets in cyclic groups `Z/nZ` with `n = q^2 + q + 1`.

use serde::{Deserialize, Serialize};

use crate::group::{is_prime, signed_residue};
use crate::Error;

/// A residue set of size `q + 1` in `Z/nZ`, `n = q^2 + q + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferenceSet {
    modulus: u64,
    residues: Vec<u64>,
    order: u64,
}

impl DifferenceSet {
    /// Verifies `residues` and wraps them.
    pub fn new(modulus: u64, residues: &[u64]) -> Result<Self, Error> {
        let cert = verify_difference_set(modulus, residues);
        if !cert.valid {
            return Err(Error::InvalidDifferenceSet(cert.summary()));
        }
        Ok(Self::unverified(modulus, residues))
    }

    /// Wraps residues without checking the difference property.
    ///
    /// Only for feeding deliberately broken inputs to downstream checks.
    pub fn unverified(modulus: u64, residues: &[u64]) -> Self {
        let mut residues: Vec<u64> = residues.iter().map(|r| r % modulus).collect();
        residues.sort_unstable();
        residues.dedup();
        let order = (residues.len() as u64).saturating_sub(1);
        DifferenceSet { modulus, residues, order }
    }

    /// The set `{0, 1, 17, 39, 41, 44, 48, 54, 62}` modulo 73.
    pub fn mod_73() -> Self {
        Self::new(73, &[0, 1, 17, 39, 41, 44, 48, 54, 62]).expect("known difference set")
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    /// Plane order `q = |residues| - 1`.
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn translate(&self, c: u64) -> Self {
        let shifted: Vec<u64> = self.residues.iter().map(|r| (r + c) % self.modulus).collect();
        Self::unverified(self.modulus, &shifted)
    }

    pub fn signed_representatives(&self) -> SignedRepresentatives {
        signed_representatives(self.modulus, &self.residues)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedRepresentatives {
    pub modulus: u64,
    pub values: Vec<i64>,
}

/// Maps each residue to its representative in `(-n/2, n/2]`, preserving order.
pub fn signed_representatives(modulus: u64, residues: &[u64]) -> SignedRepresentatives {
    SignedRepresentatives { modulus, values: residues.iter().map(|&r| signed_residue(r, modulus)).collect() }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferenceSetCertificate {
    pub valid: bool,
    pub modulus: u64,
    pub size: usize,
    /// `q = size - 1`.
    pub order: u64,
    /// Whether `modulus = q^2 + q + 1`.
    pub modulus_matches: bool,
    /// Residues listed more than once in the input (after reduction mod n).
    pub repeated: Vec<u64>,
    /// Nonzero residues with more than one representation, with their counts.
    pub duplicated: Vec<(u64, u32)>,
    /// Nonzero residues with no representation.
    pub missing: Vec<u64>,
}

impl DifferenceSetCertificate {
    pub fn summary(&self) -> String {
        if self.valid {
            return format!("valid ({}, {}, 1) difference set", self.modulus, self.size);
        }
        let mut parts = Vec::new();
        if self.size == 0 {
            parts.push("empty set".to_string());
        }
        if !self.modulus_matches {
            parts.push(format!("modulus {} != q^2+q+1 for q = {}", self.modulus, self.order));
        }
        if !self.repeated.is_empty() {
            parts.push(format!("repeated residues {:?}", self.repeated));
        }
        if !self.duplicated.is_empty() {
            parts.push(format!("differences hit more than once {:?}", self.duplicated));
        }
        if !self.missing.is_empty() {
            parts.push(format!("differences never hit {:?}", self.missing));
        }
        parts.join("; ")
    }
}

/// Tallies all differences `tau - sigma` (`sigma != tau`) and checks each nonzero residue appears once.
pub fn verify_difference_set(modulus: u64, residues: &[u64]) -> DifferenceSetCertificate {
    let n = modulus.max(1);
    let mut reduced: Vec<u64> = residues.iter().map(|r| r % n).collect();
    reduced.sort_unstable();
    let mut repeated: Vec<u64> = reduced.windows(2).filter(|w| w[0] == w[1]).map(|w| w[0]).collect();
    repeated.dedup();
    reduced.dedup();

    let size = reduced.len();
    let order = (size as u64).saturating_sub(1);
    let modulus_matches = size > 0 && modulus == order * order + order + 1;

    let mut tally = vec![0u32; n as usize];
    for &s in &reduced {
        for &t in &reduced {
            if s != t {
                tally[((t + n - s) % n) as usize] += 1;
            }
        }
    }
    let duplicated: Vec<(u64, u32)> =
        (1..n).filter(|&g| tally[g as usize] > 1).map(|g| (g, tally[g as usize])).collect();
    let missing: Vec<u64> = (1..n).filter(|&g| tally[g as usize] == 0).collect();

    DifferenceSetCertificate {
        valid: size > 0 && modulus_matches && repeated.is_empty() && duplicated.is_empty() && missing.is_empty(),
        modulus,
        size,
        order,
        modulus_matches,
        repeated,
        duplicated,
        missing,
    }
}

/// Outcome of an exhaustive backtracking search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub q: u64,
    pub modulus: u64,
    pub nodes: u64,
    pub found: Option<DifferenceSet>,
}

/// Backtracking search for the lexicographically least difference set of order `q`
/// containing 0 and 1.
pub fn search_difference_set(q: u64) -> Result<DifferenceSet, Error> {
    let outcome = search_exhaustive(q)?;
    outcome.found.ok_or(Error::DifferenceSetNotFound { q, nodes: outcome.nodes })
}

pub fn search_exhaustive(q: u64) -> Result<SearchOutcome, Error> {
    if q < 2 {
        return Err(Error::UnsupportedOrder(q));
    }
    let n = q * q + q + 1;
    if n > 1 << 20 {
        return Err(Error::UnsupportedOrder(q));
    }
    let k = (q + 1) as usize;
    let mut state = Backtrack { n, k, chosen: vec![0, 1], used: vec![false; n as usize], nodes: 0 };
    state.used[1] = true;
    state.used[(n - 1) as usize] = true;
    let found = if state.extend(2) { Some(DifferenceSet::new(n, &state.chosen)?) } else { None };
    Ok(SearchOutcome { q, modulus: n, nodes: state.nodes, found })
}

struct Backtrack {
    n: u64,
    k: usize,
    chosen: Vec<u64>,
    used: Vec<bool>,
    nodes: u64,
}

impl Backtrack {
    fn extend(&mut self, from: u64) -> bool {
        if self.chosen.len() == self.k {
            return true;
        }
        let remaining = (self.k - self.chosen.len()) as u64;
        let mut c = from;
        while c + remaining <= self.n {
            self.nodes += 1;
            if let Some(diffs) = self.new_differences(c) {
                for &d in &diffs {
                    self.used[d as usize] = true;
                }
                self.chosen.push(c);
                if self.extend(c + 1) {
                    return true;
                }
                self.chosen.pop();
                for &d in &diffs {
                    self.used[d as usize] = false;
                }
            }
            c += 1;
        }
        false
    }

    /// Differences `±(c - s)` introduced by adding `c`, or `None` if any repeats.
    fn new_differences(&self, c: u64) -> Option<Vec<u64>> {
        let n = self.n;
        let mut diffs = Vec::with_capacity(2 * self.chosen.len());
        for &s in &self.chosen {
            for d in [(c + n - s) % n, (s + n - c) % n] {
                if self.used[d as usize] || diffs.contains(&d) {
                    return None;
                }
                diffs.push(d);
            }
        }
        Some(diffs)
    }
}

/// Singer difference set from the trace-zero hyperplane of `GF(q^3)`.
///
/// Supports `q` prime and `q = 2^e` with `q <= 32`.
pub fn singer_difference_set(q: u64) -> Result<DifferenceSet, Error> {
    if q < 2 {
        return Err(Error::UnsupportedOrder(q));
    }
    let n = q.checked_mul(q).and_then(|qq| qq.checked_add(q + 1)).ok_or(Error::UnsupportedOrder(q))?;
    let residues = if is_prime(q) {
        if q > 1 << 16 {
            return Err(Error::UnsupportedOrder(q));
        }
        prime_field::trace_zero_exponents(q)?
    } else if q.is_power_of_two() && q <= 32 {
        binary_field::trace_zero_exponents(q.trailing_zeros())?
    } else {
        return Err(Error::UnsupportedOrder(q));
    };
    let cert = verify_difference_set(n, &residues);
    if !cert.valid {
        return Err(Error::Defect(format!("Singer set for q = {q}: {}", cert.summary())));
    }
    Ok(DifferenceSet::unverified(n, &residues))
}

/// Difference set of order `q`: backtracking search for `q <= 8`, Singer otherwise.
pub fn difference_set_for_order(q: u64) -> Result<DifferenceSet, Error> {
    if q <= 8 {
        search_difference_set(q)
    } else {
        singer_difference_set(q)
    }
}

pub(crate) fn is_prime_power(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let p = prime_factors(q)[0];
    let mut m = q;
    while m.is_multiple_of(p) {
        m /= p;
    }
    m == 1
}

fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            out.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// `GF(q^3)` for prime `q` as `F_q[a] / (a^3 + c2 a^2 + c1 a + c0)`.
mod prime_field {
    use super::prime_factors;
    use crate::Error;

    type Elem = [u64; 3];

    struct Cubic {
        q: u64,
        /// Low coefficients of the monic modulus.
        tail: [u64; 3],
    }

    impl Cubic {
        fn find(q: u64) -> Self {
            // Lexicographically first monic cubic without roots; a reducible
            // cubic always has a linear factor.
            for c2 in 0..q {
                for c1 in 0..q {
                    for c0 in 1..q {
                        let has_root = (0..q).any(|r| {
                            let v = (r * r % q * r + c2 * r % q * r + c1 * r + c0) % q;
                            v == 0
                        });
                        if !has_root {
                            return Cubic { q, tail: [c0, c1, c2] };
                        }
                    }
                }
            }
            unreachable!("every prime field has an irreducible cubic")
        }

        fn mul(&self, x: &Elem, y: &Elem) -> Elem {
            let q = self.q;
            let mut prod = [0u64; 5];
            for i in 0..3 {
                for j in 0..3 {
                    prod[i + j] = (prod[i + j] + x[i] * y[j]) % q;
                }
            }
            // a^3 = -(c2 a^2 + c1 a + c0)
            for deg in (3..5).rev() {
                let lead = prod[deg];
                if lead == 0 {
                    continue;
                }
                prod[deg] = 0;
                for (k, &c) in self.tail.iter().enumerate() {
                    let idx = deg - 3 + k;
                    prod[idx] = (prod[idx] + (q - c) * lead) % q;
                }
            }
            [prod[0], prod[1], prod[2]]
        }

        fn pow(&self, x: &Elem, mut e: u64) -> Elem {
            let mut base = *x;
            let mut acc = [1, 0, 0];
            while e > 0 {
                if e & 1 == 1 {
                    acc = self.mul(&acc, &base);
                }
                base = self.mul(&base, &base);
                e >>= 1;
            }
            acc
        }

        fn add(&self, x: &Elem, y: &Elem) -> Elem {
            [(x[0] + y[0]) % self.q, (x[1] + y[1]) % self.q, (x[2] + y[2]) % self.q]
        }
    }

    pub(super) fn trace_zero_exponents(q: u64) -> Result<Vec<u64>, Error> {
        let field = Cubic::find(q);
        let group_order = q * q * q - 1;
        let factors = prime_factors(group_order);
        let one = [1, 0, 0];
        let mut gamma = None;
        'search: for idx in 1..q * q * q {
            let cand = [idx % q, (idx / q) % q, idx / (q * q)];
            for &l in &factors {
                if field.pow(&cand, group_order / l) == one {
                    continue 'search;
                }
            }
            gamma = Some(cand);
            break;
        }
        let gamma = gamma.ok_or_else(|| Error::Defect(format!("no primitive element in GF({q}^3)")))?;

        let n = q * q + q + 1;
        let mut out = Vec::new();
        let mut power = one;
        for i in 0..n {
            let frob = field.pow(&power, q);
            let frob2 = field.pow(&frob, q);
            let trace = field.add(&field.add(&power, &frob), &frob2);
            if trace == [0, 0, 0] {
                out.push(i);
            }
            power = field.mul(&power, &gamma);
        }
        Ok(out)
    }
}

/// `GF(2^(3e))` as bit-packed polynomials over `GF(2)` modulo a primitive polynomial.
mod binary_field {
    use super::prime_factors;
    use crate::Error;

    fn degree(f: u64) -> u32 {
        63 - f.leading_zeros()
    }

    fn poly_mod(mut a: u64, m: u64) -> u64 {
        let dm = degree(m);
        while a != 0 && degree(a) >= dm {
            a ^= m << (degree(a) - dm);
        }
        a
    }

    fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
        let mut acc = 0u64;
        let mut a = a;
        let mut b = b;
        let dm = degree(m);
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a >> dm & 1 == 1 {
                a ^= m;
            }
        }
        acc
    }

    fn pow_mod(x: u64, mut e: u64, m: u64) -> u64 {
        let mut base = x;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(acc, base, m);
            }
            base = mul_mod(base, base, m);
            e >>= 1;
        }
        acc
    }

    fn irreducible(f: u64) -> bool {
        let d = degree(f);
        (2u64..1 << (d / 2 + 1)).filter(|g| degree(*g) >= 1 && degree(*g) <= d / 2).all(|g| poly_mod(f, g) != 0)
    }

    pub(super) fn trace_zero_exponents(e: u32) -> Result<Vec<u64>, Error> {
        let d = 3 * e;
        let group_order = (1u64 << d) - 1;
        let factors = prime_factors(group_order);
        let is_primitive = |f: u64| irreducible(f) && factors.iter().all(|&l| pow_mod(2, group_order / l, f) != 1);
        let modulus = ((1u64 << d) + 1..1u64 << (d + 1))
            .step_by(2)
            .find(|&f| is_primitive(f))
            .ok_or_else(|| Error::Defect(format!("no primitive polynomial of degree {d}")))?;
        let gamma = 2u64;

        let q = 1u64 << e;
        let n = q * q + q + 1;
        let mut out = Vec::new();
        let mut power = 1u64;
        for i in 0..n {
            let frob = pow_mod(power, q, modulus);
            let frob2 = pow_mod(frob, q, modulus);
            if power ^ frob ^ frob2 == 0 {
                out.push(i);
            }
            power = mul_mod(power, gamma, modulus);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent tally: for each nonzero g, count ordered pairs with t - s = g.
    fn representation_counts(n: u64, set: &[u64]) -> Vec<usize> {
        (0..n)
            .map(|g| {
                set.iter()
                    .flat_map(|&s| set.iter().map(move |&t| (s, t)))
                    .filter(|&(s, t)| s != t && (t + n - s) % n == g)
                    .count()
            })
            .collect()
    }

    #[test]
    fn mod_73_set_is_valid() {
        let cert = verify_difference_set(73, &[0, 1, 17, 39, 41, 44, 48, 54, 62]);
        assert!(cert.valid, "{}", cert.summary());
        assert_eq!(cert.order, 8);
    }

    #[test]
    fn fano_set() {
        let counts = representation_counts(7, &[0, 1, 3]);
        assert!(counts[1..].iter().all(|&c| c == 1));
        assert!(verify_difference_set(7, &[0, 1, 3]).valid);
    }

    #[test]
    fn consecutive_residues_fail() {
        let cert = verify_difference_set(7, &[0, 1, 2]);
        assert!(!cert.valid);
        assert_eq!(representation_counts(7, &[0, 1, 2])[1], 2);
        assert!(cert.duplicated.contains(&(1, 2)));
        assert!(cert.missing.contains(&3));
    }

    #[test]
    fn wrong_modulus_and_repeats_reported() {
        let cert = verify_difference_set(8, &[0, 1, 3]);
        assert!(!cert.valid && !cert.modulus_matches);
        let cert = verify_difference_set(7, &[0, 1, 3, 7]);
        assert!(!cert.valid);
        assert_eq!(cert.repeated, vec![0]);
        assert!(!verify_difference_set(7, &[]).valid);
    }

    #[test]
    fn search_small_orders() {
        assert_eq!(search_difference_set(2).unwrap().residues(), &[0, 1, 3]);
        for q in [3, 4, 5, 7, 8] {
            let ds = search_difference_set(q).unwrap();
            assert_eq!(ds.modulus(), q * q + q + 1);
            let counts = representation_counts(ds.modulus(), ds.residues());
            assert!(counts[1..].iter().all(|&c| c == 1), "q = {q}");
        }
    }

    #[test]
    fn search_reports_absence_for_order_six() {
        let outcome = search_exhaustive(6).unwrap();
        assert!(outcome.found.is_none());
        assert!(outcome.nodes > 0);
        assert!(matches!(search_difference_set(6), Err(Error::DifferenceSetNotFound { q: 6, .. })));
    }

    #[test]
    fn singer_sets_verify() {
        for q in [2, 3, 4, 5, 7, 8, 11, 13, 16, 32] {
            let ds = singer_difference_set(q).unwrap();
            let counts = representation_counts(ds.modulus(), ds.residues());
            assert!(counts[1..].iter().all(|&c| c == 1), "q = {q}");
            assert_eq!(ds.residues().len() as u64, q + 1);
        }
        assert_eq!(singer_difference_set(32).unwrap().modulus(), 1057);
    }

    #[test]
    fn singer_rejects_unsupported_orders() {
        for q in [1, 6, 9, 64] {
            assert!(matches!(singer_difference_set(q), Err(Error::UnsupportedOrder(_))), "{q}");
        }
    }

    #[test]
    fn singer_and_search_equivalent_for_fano() {
        let a = singer_difference_set(2).unwrap();
        let b = search_difference_set(2).unwrap();
        let equivalent = (1..7u64).any(|m| {
            (0..7u64).any(|c| {
                let mut img: Vec<u64> = a.residues().iter().map(|r| (m * r + c) % 7).collect();
                img.sort_unstable();
                img == b.residues()
            })
        });
        assert!(equivalent);
    }

    #[test]
    fn signed_representatives_match_display() {
        let s = signed_representatives(73, &[39, 41, 44]);
        assert_eq!(s.values, vec![-34, -32, -29]);
        assert_eq!(signed_representatives(73, &[0, 1]).values, vec![0, 1]);
        assert_eq!(signed_representatives(73, &[62]).values, vec![-11]);
        assert_eq!(
            DifferenceSet::mod_73().signed_representatives().values,
            vec![0, 1, 17, -34, -32, -29, -25, -19, -11]
        );
    }

    #[test]
    fn translates_remain_valid() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(73);
        let ds = DifferenceSet::mod_73();
        for _ in 0..5 {
            let c = rng.random_range(0..73);
            assert!(verify_difference_set(73, ds.translate(c).residues()).valid);
        }
    }

    #[test]
    fn prime_powers() {
        let pp: Vec<u64> = (1..30).filter(|&q| is_prime_power(q)).collect();
        assert_eq!(pp, vec![2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29]);
    }
}
