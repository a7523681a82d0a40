//! Normal-form arithmetic in cyclic, dihedral and Heisenberg groups.
//!
//! Elements are stored as exact coordinate tuples:
//!
//! * cyclic `Z/nZ`: `k`
//! * dihedral of order `2n`: `(e, k)` standing for `t^e r^k`
//! * Heisenberg group over `F_p`: `(a, b, c)` standing for `x^a y^b z^c`, with
//!   `z = x y x^-1 y^-1` central.
//!
//! The derived `Ord` on [`GroupElement`] is lexicographic on those tuples and is
//! the canonical element order used everywhere else in the crate.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::word::Word;
use crate::Error;

/// One of the three group families, with its size parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupSpec {
    Cyclic(u64),
    /// Dihedral group of order `2n`, `n` the rotation order.
    Dihedral(u64),
    /// Heisenberg group of order `p^3` over the prime field `F_p`, `p` odd.
    Heisenberg(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Cyclic(u64),
    Dihedral { flip: u64, rot: u64 },
    Heisenberg { a: u64, b: u64, c: u64 },
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl GroupSpec {
    pub fn cyclic(n: u64) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::InvalidGroup("cyclic group needs n >= 1".into()));
        }
        Ok(GroupSpec::Cyclic(n))
    }

    pub fn dihedral(n: u64) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::InvalidGroup("dihedral group needs n >= 1".into()));
        }
        Ok(GroupSpec::Dihedral(n))
    }

    pub fn heisenberg(p: u64) -> Result<Self, Error> {
        if p == 2 || !is_prime(p) {
            return Err(Error::InvalidGroup(format!("Heisenberg group needs an odd prime, got {p}")));
        }
        Ok(GroupSpec::Heisenberg(p))
    }

    pub fn order(&self) -> u64 {
        match *self {
            GroupSpec::Cyclic(n) => n,
            GroupSpec::Dihedral(n) => 2 * n,
            GroupSpec::Heisenberg(p) => p * p * p,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            GroupSpec::Cyclic(_) => "cyclic",
            GroupSpec::Dihedral(_) => "dihedral",
            GroupSpec::Heisenberg(_) => "heisenberg",
        }
    }

    fn modulus(&self) -> u64 {
        match *self {
            GroupSpec::Cyclic(n) | GroupSpec::Dihedral(n) | GroupSpec::Heisenberg(n) => n,
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self {
            GroupSpec::Cyclic(_) => GroupElement::Cyclic(0),
            GroupSpec::Dihedral(_) => GroupElement::Dihedral { flip: 0, rot: 0 },
            GroupSpec::Heisenberg(_) => GroupElement::Heisenberg { a: 0, b: 0, c: 0 },
        }
    }

    /// Builds an element from raw coordinates, checking ranges.
    pub fn element(&self, coords: &[u64]) -> Result<GroupElement, Error> {
        let g = match (self, coords) {
            (GroupSpec::Cyclic(_), &[k]) => GroupElement::Cyclic(k),
            (GroupSpec::Dihedral(_), &[flip, rot]) => GroupElement::Dihedral { flip, rot },
            (GroupSpec::Heisenberg(_), &[a, b, c]) => GroupElement::Heisenberg { a, b, c },
            _ => {
                return Err(Error::InvalidElement(format!(
                    "{} group expects {} coordinates, got {:?}",
                    self.kind(),
                    match self {
                        GroupSpec::Cyclic(_) => 1,
                        GroupSpec::Dihedral(_) => 2,
                        GroupSpec::Heisenberg(_) => 3,
                    },
                    coords
                )))
            }
        };
        self.check(&g)?;
        Ok(g)
    }

    /// Reduces signed coordinates into range; handy for writing `x^-2 y z`.
    pub fn element_signed(&self, coords: &[i64]) -> Result<GroupElement, Error> {
        let n = self.modulus() as i64;
        let reduced: Vec<u64> = match self {
            GroupSpec::Dihedral(_) if coords.len() == 2 => {
                vec![coords[0].rem_euclid(2) as u64, coords[1].rem_euclid(n) as u64]
            }
            _ => coords.iter().map(|&c| c.rem_euclid(n) as u64).collect(),
        };
        self.element(&reduced)
    }

    pub fn check(&self, g: &GroupElement) -> Result<(), Error> {
        let ok = match (*self, *g) {
            (GroupSpec::Cyclic(n), GroupElement::Cyclic(k)) => k < n,
            (GroupSpec::Dihedral(n), GroupElement::Dihedral { flip, rot }) => flip < 2 && rot < n,
            (GroupSpec::Heisenberg(p), GroupElement::Heisenberg { a, b, c }) => a < p && b < p && c < p,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidElement(format!("{g} is not an element of {self}")))
        }
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement, Error> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.mul(g, h))
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement, Error> {
        self.check(g)?;
        Ok(self.inv(g))
    }

    /// Unchecked product; callers guarantee both operands belong to `self`.
    pub(crate) fn mul(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        match (*self, *g, *h) {
            (GroupSpec::Cyclic(n), GroupElement::Cyclic(x), GroupElement::Cyclic(y)) => {
                GroupElement::Cyclic((x + y) % n)
            }
            (
                GroupSpec::Dihedral(n),
                GroupElement::Dihedral { flip: e1, rot: k1 },
                GroupElement::Dihedral { flip: e2, rot: k2 },
            ) => {
                // t^e1 r^k1 t^e2 r^k2 = t^(e1+e2) r^((-1)^e2 k1 + k2)
                let k1 = if e2 == 1 { (n - k1) % n } else { k1 };
                GroupElement::Dihedral { flip: e1 ^ e2, rot: (k1 + k2) % n }
            }
            (
                GroupSpec::Heisenberg(p),
                GroupElement::Heisenberg { a, b, c },
                GroupElement::Heisenberg { a: a2, b: b2, c: c2 },
            ) => {
                // moving x^a2 left past y^b costs z^(-a2 b)
                let cross = (a2 * b) % p;
                GroupElement::Heisenberg { a: (a + a2) % p, b: (b + b2) % p, c: (c + c2 + p - cross) % p }
            }
            _ => unreachable!("element family does not match group {self}"),
        }
    }

    pub(crate) fn inv(&self, g: &GroupElement) -> GroupElement {
        match (*self, *g) {
            (GroupSpec::Cyclic(n), GroupElement::Cyclic(k)) => GroupElement::Cyclic((n - k) % n),
            (GroupSpec::Dihedral(n), GroupElement::Dihedral { flip, rot }) => {
                if flip == 1 {
                    *g
                } else {
                    GroupElement::Dihedral { flip: 0, rot: (n - rot) % n }
                }
            }
            (GroupSpec::Heisenberg(p), GroupElement::Heisenberg { a, b, c }) => {
                let ab = (a * b) % p;
                GroupElement::Heisenberg { a: (p - a) % p, b: (p - b) % p, c: (2 * p - c - ab) % p }
            }
            _ => unreachable!("element family does not match group {self}"),
        }
    }

    pub fn pow(&self, g: &GroupElement, exp: i64) -> Result<GroupElement, Error> {
        self.check(g)?;
        Ok(self.pow_unchecked(g, exp))
    }

    pub(crate) fn pow_unchecked(&self, g: &GroupElement, exp: i64) -> GroupElement {
        let mut base = if exp < 0 { self.inv(g) } else { *g };
        let mut e = exp.unsigned_abs();
        let mut acc = self.identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Least `m >= 1` with `g^m = 1`.
    pub fn element_order(&self, g: &GroupElement) -> Result<u64, Error> {
        self.check(g)?;
        let id = self.identity();
        let mut acc = *g;
        let mut m = 1;
        while acc != id {
            acc = self.mul(&acc, g);
            m += 1;
        }
        Ok(m)
    }

    /// Position of `g` in the canonical enumeration of the group.
    pub fn index_of(&self, g: &GroupElement) -> usize {
        let idx = match (*self, *g) {
            (GroupSpec::Cyclic(_), GroupElement::Cyclic(k)) => k,
            (GroupSpec::Dihedral(n), GroupElement::Dihedral { flip, rot }) => flip * n + rot,
            (GroupSpec::Heisenberg(p), GroupElement::Heisenberg { a, b, c }) => (a * p + b) * p + c,
            _ => unreachable!("element family does not match group {self}"),
        };
        idx as usize
    }

    pub fn element_at(&self, index: usize) -> GroupElement {
        let i = index as u64;
        match *self {
            GroupSpec::Cyclic(_) => GroupElement::Cyclic(i),
            GroupSpec::Dihedral(n) => GroupElement::Dihedral { flip: i / n, rot: i % n },
            GroupSpec::Heisenberg(p) => GroupElement::Heisenberg { a: i / (p * p), b: (i / p) % p, c: i % p },
        }
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order() as usize).map(move |i| self.element_at(i))
    }

    /// Left-to-right product of the assigned generator powers.
    pub fn evaluate_word(
        &self,
        word: &Word,
        assignment: &BTreeMap<String, GroupElement>,
    ) -> Result<GroupElement, Error> {
        let mut acc = self.identity();
        for (gen, exp) in word.letters() {
            let g = assignment.get(gen).ok_or_else(|| Error::UnassignedGenerator(gen.to_string()))?;
            self.check(g)?;
            acc = self.mul(&acc, &self.pow_unchecked(g, *exp));
        }
        Ok(acc)
    }

    /// Smallest subgroup containing `gens`.
    pub fn subgroup_closure(&self, gens: &[GroupElement]) -> Result<Subgroup, Error> {
        for g in gens {
            self.check(g)?;
        }
        let id = self.identity();
        let mut seen: BTreeSet<GroupElement> = BTreeSet::from([id]);
        let mut frontier = vec![id];
        while let Some(h) = frontier.pop() {
            for g in gens {
                let next = self.mul(&h, g);
                if seen.insert(next) {
                    frontier.push(next);
                }
            }
        }
        Ok(Subgroup { ambient: *self, generators: gens.to_vec(), elements: seen.into_iter().collect() })
    }

    /// Left cosets `gH`, each with its least member as representative, listed by representative.
    pub fn left_cosets(&self, subgroup: &Subgroup) -> Result<Vec<Coset>, Error> {
        subgroup.validate()?;
        if subgroup.ambient != *self {
            return Err(Error::InvalidSubgroup(format!("subgroup lives in {}, not {self}", subgroup.ambient)));
        }
        let order = self.order() as usize;
        let mut assigned = vec![false; order];
        let mut cosets = Vec::with_capacity(order / subgroup.order());
        for i in 0..order {
            if assigned[i] {
                continue;
            }
            let rep = self.element_at(i);
            let mut members: Vec<GroupElement> = subgroup.elements.iter().map(|h| self.mul(&rep, h)).collect();
            members.sort_unstable();
            for m in &members {
                assigned[self.index_of(m)] = true;
            }
            cosets.push(Coset { representative: rep, members });
        }
        Ok(cosets)
    }

    /// Human-readable word for an element in the family's standard generators,
    /// with exponents in the symmetric range `(-n/2, n/2]`.
    pub fn display_word(&self, g: &GroupElement) -> Word {
        let m = self.modulus();
        let mut letters = Vec::new();
        match *g {
            GroupElement::Cyclic(k) => letters.push(("g", signed_residue(k, m))),
            GroupElement::Dihedral { flip, rot } => {
                letters.push(("t", flip as i64));
                letters.push(("r", signed_residue(rot, m)));
            }
            GroupElement::Heisenberg { a, b, c } => {
                letters.push(("x", signed_residue(a, m)));
                letters.push(("y", signed_residue(b, m)));
                letters.push(("z", signed_residue(c, m)));
            }
        }
        Word::from_pairs(letters.into_iter().map(|(g, e)| (g.to_string(), e)))
    }
}

/// Representative of `k mod m` in `(-m/2, m/2]`.
pub fn signed_residue(k: u64, m: u64) -> i64 {
    let k = (k % m) as i64;
    let m = m as i64;
    if 2 * k > m {
        k - m
    } else {
        k
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind(), self.modulus())
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    /// Parses `cyclic:14`, `dihedral:73` or `heisenberg:7`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let (kind, param) =
            s.split_once(':').ok_or_else(|| Error::InvalidGroup(format!("expected kind:param, got {s:?}")))?;
        let n: u64 = param.trim().parse().map_err(|_| Error::InvalidGroup(format!("bad group parameter {param:?}")))?;
        match kind.trim() {
            "cyclic" => GroupSpec::cyclic(n),
            "dihedral" => GroupSpec::dihedral(n),
            "heisenberg" => GroupSpec::heisenberg(n),
            other => Err(Error::InvalidGroup(format!("unknown group kind {other:?}"))),
        }
    }
}

impl GroupElement {
    pub fn kind(&self) -> &'static str {
        match self {
            GroupElement::Cyclic(_) => "cyclic",
            GroupElement::Dihedral { .. } => "dihedral",
            GroupElement::Heisenberg { .. } => "heisenberg",
        }
    }

    pub fn coords(&self) -> Vec<u64> {
        match *self {
            GroupElement::Cyclic(k) => vec![k],
            GroupElement::Dihedral { flip, rot } => vec![flip, rot],
            GroupElement::Heisenberg { a, b, c } => vec![a, b, c],
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coords: Vec<String> = self.coords().iter().map(u64::to_string).collect();
        write!(f, "({})", coords.join(","))
    }
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    kind: String,
    coords: Vec<u64>,
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ElementRepr { kind: self.kind().to_string(), coords: self.coords() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = ElementRepr::deserialize(deserializer)?;
        match (repr.kind.as_str(), repr.coords.as_slice()) {
            ("cyclic", &[k]) => Ok(GroupElement::Cyclic(k)),
            ("dihedral", &[flip, rot]) => Ok(GroupElement::Dihedral { flip, rot }),
            ("heisenberg", &[a, b, c]) => Ok(GroupElement::Heisenberg { a, b, c }),
            (kind, coords) => Err(D::Error::custom(format!("bad element kind/coords: {kind} {coords:?}"))),
        }
    }
}

impl Serialize for GroupSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// A subgroup with its full, canonically sorted element list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subgroup {
    pub ambient: GroupSpec,
    pub generators: Vec<GroupElement>,
    pub elements: Vec<GroupElement>,
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.elements.binary_search(g).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    /// Checks identity membership, closure under products and inverses, and Lagrange.
    pub fn validate(&self) -> Result<(), Error> {
        let g = &self.ambient;
        let bad = |why: &str| Err(Error::InvalidSubgroup(why.to_string()));
        if self.elements.windows(2).any(|w| w[0] >= w[1]) {
            return bad("elements are not strictly sorted");
        }
        for e in &self.elements {
            g.check(e)?;
        }
        if !self.contains(&g.identity()) {
            return bad("identity missing");
        }
        for a in &self.elements {
            if !self.contains(&g.inv(a)) {
                return bad("not closed under inverses");
            }
            for b in &self.elements {
                if !self.contains(&g.mul(a, b)) {
                    return bad("not closed under multiplication");
                }
            }
        }
        if !g.order().is_multiple_of(self.order() as u64) {
            return bad("order does not divide the group order");
        }
        Ok(())
    }

    pub fn intersection(&self, other: &Subgroup) -> Vec<GroupElement> {
        self.elements.iter().filter(|e| other.contains(e)).copied().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coset {
    pub representative: GroupElement,
    pub members: Vec<GroupElement>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: u64) -> GroupSpec {
        GroupSpec::dihedral(n).unwrap()
    }
    fn h(p: u64) -> GroupSpec {
        GroupSpec::heisenberg(p).unwrap()
    }

    #[test]
    fn dihedral_t_times_tr_is_r() {
        let g = d(73);
        let t = g.element(&[1, 0]).unwrap();
        let tr = g.element(&[1, 1]).unwrap();
        assert_eq!(g.multiply(&t, &tr).unwrap(), g.element(&[0, 1]).unwrap());
    }

    #[test]
    fn heisenberg_yx_is_xyz_inverse() {
        let g = h(7);
        let y = g.element(&[0, 1, 0]).unwrap();
        let x = g.element(&[1, 0, 0]).unwrap();
        assert_eq!(g.multiply(&y, &x).unwrap(), g.element(&[1, 1, 6]).unwrap());
    }

    #[test]
    fn cyclic_addition() {
        let g = GroupSpec::cyclic(14).unwrap();
        let nine = g.element(&[9]).unwrap();
        assert_eq!(g.multiply(&nine, &nine).unwrap(), GroupElement::Cyclic(4));
    }

    #[test]
    fn inverses() {
        let g = d(73);
        let refl = g.element(&[1, 17]).unwrap();
        assert_eq!(g.inverse(&refl).unwrap(), refl);

        let g = h(7);
        assert_eq!(g.inverse(&g.element(&[1, 0, 0]).unwrap()).unwrap(), g.element(&[6, 0, 0]).unwrap());
        assert_eq!(g.inverse(&g.element(&[1, 1, 0]).unwrap()).unwrap(), g.element(&[6, 6, 6]).unwrap());
    }

    #[test]
    fn out_of_range_coordinates_rejected() {
        assert!(matches!(d(73).element(&[2, 0]), Err(Error::InvalidElement(_))));
        assert!(matches!(d(73).element(&[0, 73]), Err(Error::InvalidElement(_))));
        assert!(matches!(h(7).element(&[0, 0, 7]), Err(Error::InvalidElement(_))));
        let foreign = GroupElement::Cyclic(1);
        assert!(d(5).multiply(&foreign, &foreign).is_err());
    }

    #[test]
    fn heisenberg_needs_odd_prime() {
        assert!(GroupSpec::heisenberg(2).is_err());
        assert!(GroupSpec::heisenberg(9).is_err());
        assert!("heisenberg:7".parse::<GroupSpec>().is_ok());
        assert!("quaternion:2".parse::<GroupSpec>().is_err());
    }

    #[test]
    fn element_orders() {
        let g = d(73);
        assert_eq!(g.element_order(&g.element(&[0, 1]).unwrap()).unwrap(), 73);
        assert_eq!(g.element_order(&g.element(&[1, 0]).unwrap()).unwrap(), 2);
        let g = h(7);
        let id = g.identity();
        for e in g.elements().filter(|e| *e != id) {
            assert_eq!(g.element_order(&e).unwrap(), 7);
        }
    }

    #[test]
    fn closures_have_expected_orders() {
        let g = d(73);
        let s = g.subgroup_closure(&[g.element(&[1, 17]).unwrap()]).unwrap();
        assert_eq!(s.order(), 2);

        let g = h(7);
        let w = g.element(&[2, 1, 6]).unwrap();
        assert_eq!(g.subgroup_closure(&[w]).unwrap().order(), 7);
        let xy = [g.element(&[1, 0, 0]).unwrap(), g.element(&[0, 1, 0]).unwrap()];
        let full = g.subgroup_closure(&xy).unwrap();
        assert_eq!(full.order(), 343);
        full.validate().unwrap();
    }

    #[test]
    fn coset_counts() {
        let g = d(73);
        let t = g.subgroup_closure(&[g.element(&[1, 0]).unwrap()]).unwrap();
        assert_eq!(g.left_cosets(&t).unwrap().len(), 73);

        let g = h(7);
        let z = g.subgroup_closure(&[g.element(&[0, 0, 1]).unwrap()]).unwrap();
        assert_eq!(g.left_cosets(&z).unwrap().len(), 49);
    }

    #[test]
    fn cosets_partition_heisenberg_3() {
        let g = h(3);
        let x = g.subgroup_closure(&[g.element(&[1, 0, 0]).unwrap()]).unwrap();
        let cosets = g.left_cosets(&x).unwrap();
        assert_eq!(cosets.len(), 9);
        let mut seen = BTreeSet::new();
        for c in &cosets {
            assert_eq!(c.members.len(), 3);
            assert_eq!(c.members[0], c.representative);
            for m in &c.members {
                assert!(seen.insert(*m), "{m} in two cosets");
                // m^-1 rep must lie in the subgroup
                assert!(x.contains(&g.mul(&g.inv(&c.representative), m)));
            }
        }
        assert_eq!(seen.len(), 27);
    }

    #[test]
    fn non_closed_subgroup_rejected() {
        let g = d(5);
        let bogus =
            Subgroup { ambient: g, generators: vec![], elements: vec![g.identity(), g.element(&[0, 1]).unwrap()] };
        assert!(matches!(g.left_cosets(&bogus), Err(Error::InvalidSubgroup(_))));
    }

    #[test]
    fn display_words_use_signed_exponents() {
        let g = h(7);
        let e = g.element_signed(&[-2, 1, 1]).unwrap();
        assert_eq!(g.display_word(&e).to_string(), "x^-2yz");
        let g = d(73);
        assert_eq!(g.display_word(&g.element(&[1, 39]).unwrap()).to_string(), "tr^-34");
        assert_eq!(g.display_word(&g.element(&[1, 0]).unwrap()).to_string(), "t");
    }

    #[test]
    fn element_json_shape() {
        let e = GroupElement::Heisenberg { a: 1, b: 2, c: 3 };
        let json = serde_json::to_string(&e).unwrap();
        assert_eq!(json, r#"{"kind":"heisenberg","coords":[1,2,3]}"#);
        let back: GroupElement = serde_json::from_str(&json).unwrap();
        assert_eq!(back, e);
    }
}
