//! The Galois group of C(X(N)) / C(X(1)) as the finite matrix group
//! SL_2(Z/N) / {+-1}, together with its subgroup lattice and its right
//! action on index vectors.
//!
//! Elements are stored as a canonical representative of the pair
//! `{sigma, -sigma}`: the lexicographically smaller of the two entry tuples.
//! All group operations land back in canonical form, so equality of values
//! is equality in the quotient group.

use crate::siegel::IndexVector;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("matrix [{0}, {1}; {2}, {3}] has determinant != 1 mod {4}")]
    NotUnimodular(u32, u32, u32, u32, u32),
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u32, u32),
    #[error("ambient group of order {size} exceeds the subgroup-enumeration bound {bound}")]
    AmbientTooLarge { size: usize, bound: usize },
    #[error("ambient element list is not closed under multiplication")]
    AmbientNotClosed,
}

/// Largest ambient group order accepted by [`enumerate_subgroups`].  The
/// sweeps in this crate stay at or below |SL_2(Z/5)/{+-1}| = 60.
pub const SUBGROUP_ENUMERATION_BOUND: usize = 60;

/// An element of SL_2(Z/N) / {+-1}, canonically represented.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement {
    level: u32,
    a: u32,
    b: u32,
    c: u32,
    d: u32,
}

impl GroupElement {
    /// Canonical element for the matrix `[a, b; c, d]` (entries taken mod N).
    /// Errors when the determinant is not 1 mod N.
    pub fn new(level: u32, a: i64, b: i64, c: i64, d: i64) -> Result<GroupElement, GroupError> {
        assert!(level >= 2, "level must be at least 2");
        let n = level as i64;
        let (a, b, c, d) = (
            a.rem_euclid(n) as u32,
            b.rem_euclid(n) as u32,
            c.rem_euclid(n) as u32,
            d.rem_euclid(n) as u32,
        );
        let nn = level as u64;
        let det = (a as u64 * d as u64 % nn + nn - b as u64 * c as u64 % nn) % nn;
        if det != 1 % nn {
            return Err(GroupError::NotUnimodular(a, b, c, d, level));
        }
        Ok(Self::canonical(level, a, b, c, d))
    }

    fn canonical(level: u32, a: u32, b: u32, c: u32, d: u32) -> GroupElement {
        let neg = |x: u32| (level - x) % level;
        let pos = (a, b, c, d);
        let min = (neg(a), neg(b), neg(c), neg(d)).min(pos);
        GroupElement {
            level,
            a: min.0,
            b: min.1,
            c: min.2,
            d: min.3,
        }
    }

    pub fn identity(level: u32) -> GroupElement {
        GroupElement {
            level,
            a: 1 % level,
            b: 0,
            c: 0,
            d: 1 % level,
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Entries `[a, b, c, d]` of the canonical representative.
    pub fn entries(&self) -> [u32; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.level)
    }

    pub fn multiply(&self, rhs: &GroupElement) -> GroupElement {
        assert_eq!(self.level, rhs.level, "group level mismatch");
        let n = self.level as u64;
        let m = |x: u64| (x % n) as u32;
        let a = m(self.a as u64 * rhs.a as u64 + self.b as u64 * rhs.c as u64);
        let b = m(self.a as u64 * rhs.b as u64 + self.b as u64 * rhs.d as u64);
        let c = m(self.c as u64 * rhs.a as u64 + self.d as u64 * rhs.c as u64);
        let d = m(self.c as u64 * rhs.b as u64 + self.d as u64 * rhs.d as u64);
        Self::canonical(self.level, a, b, c, d)
    }

    pub fn inverse(&self) -> GroupElement {
        // [a, b; c, d]^-1 = [d, -b; -c, a] when the determinant is 1.
        let n = self.level;
        let neg = |x: u32| (n - x) % n;
        Self::canonical(n, self.d, neg(self.b), neg(self.c), self.a)
    }

    /// Right action on row indices: `v -> sigma^T v` (mod N, up to sign).
    /// Composition is contravariant-free: acting by `sigma` then `rho`
    /// equals acting by `sigma * rho`.
    pub fn act_on_index(&self, v: &IndexVector) -> IndexVector {
        assert_eq!(self.level, v.level(), "level mismatch in index action");
        let n = self.level as u64;
        let (va, vb) = (v.a() as u64, v.b() as u64);
        let wa = ((self.a as u64 * va + self.c as u64 * vb) % n) as u32;
        let wb = ((self.b as u64 * va + self.d as u64 * vb) % n) as u32;
        IndexVector::new(self.level, wa, wb).expect("action preserves nonzero vectors")
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}; {}, {}] mod {}",
            self.a, self.b, self.c, self.d, self.level
        )
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{},{}]", self.a, self.b, self.c, self.d)
    }
}

/// Named congruence families, as subsets of SL_2(Z/N) / {+-1}.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Family {
    /// Image of +-Gamma(N): the identity only.
    Principal,
    /// Image of +-Gamma_1(N): upper unitriangular up to sign.
    Gamma1,
    /// Image of Gamma^0(N): vanishing upper-right entry.
    Gamma0Upper,
}

impl Family {
    pub fn contains(&self, g: &GroupElement) -> bool {
        let n = g.level;
        let [a, b, c, d] = g.entries();
        match self {
            Family::Principal => g.is_identity(),
            Family::Gamma1 => {
                let one = 1 % n;
                let neg_one = (n - one) % n;
                (c == 0 && a == one && d == one) || (c == 0 && a == neg_one && d == neg_one)
            }
            Family::Gamma0Upper => {
                let _ = (a, d);
                b == 0
            }
        }
    }
}

/// Order of SL_2(Z/N) / {+-1} from the multiplicative formula
/// `N^3 * prod_{p | N} (1 - 1/p^2)`, halved for N > 2.
pub fn group_order_formula(level: u32) -> u64 {
    let n = level as u64;
    let mut order = n * n * n;
    let mut rem = n;
    let mut p = 2u64;
    while p * p <= rem {
        if rem % p == 0 {
            while rem % p == 0 {
                rem /= p;
            }
            order = order / (p * p) * (p * p - 1);
        }
        p += 1;
    }
    if rem > 1 {
        order = order / (rem * rem) * (rem * rem - 1);
    }
    if level > 2 {
        order /= 2;
    }
    order
}

/// All elements of SL_2(Z/N) / {+-1}, sorted canonically.
pub fn enumerate_group(level: u32) -> Vec<GroupElement> {
    assert!(level >= 2, "level must be at least 2");
    let n = level as u64;
    let mut set = BTreeSet::new();
    for a in 0..level {
        for b in 0..level {
            for c in 0..level {
                for d in 0..level {
                    let det = (a as u64 * d as u64 % n + n - b as u64 * c as u64 % n) % n;
                    if det == 1 % n {
                        set.insert(GroupElement::canonical(level, a, b, c, d));
                    }
                }
            }
        }
    }
    set.into_iter().collect()
}

/// Elements of the given family inside the full group, sorted.
pub fn enumerate_family(level: u32, family: Family) -> Vec<GroupElement> {
    enumerate_group(level)
        .into_iter()
        .filter(|g| family.contains(g))
        .collect()
}

/// A subgroup of SL_2(Z/N) / {+-1}: a closed, sorted element list plus a
/// small generating set kept for reporting (not guaranteed minimal).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subgroup {
    level: u32,
    elements: Vec<GroupElement>,
    generators: Vec<GroupElement>,
}

impl Subgroup {
    pub fn trivial(level: u32) -> Subgroup {
        Subgroup {
            level,
            elements: vec![GroupElement::identity(level)],
            generators: Vec::new(),
        }
    }

    /// Closure of the generators under multiplication.
    pub fn generated_by(level: u32, generators: &[GroupElement]) -> Subgroup {
        for g in generators {
            assert_eq!(g.level(), level, "generator level mismatch");
        }
        let mut elements = BTreeSet::new();
        elements.insert(GroupElement::identity(level));
        let mut queue: VecDeque<GroupElement> = elements.iter().copied().collect();
        while let Some(x) = queue.pop_front() {
            for g in generators {
                let y = x.multiply(g);
                if elements.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        // Generators of a finite group closed under products always yield
        // inverses by iteration, so the closure above is the subgroup.
        Subgroup {
            level,
            elements: elements.into_iter().collect(),
            generators: generators.to_vec(),
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.elements.binary_search(g).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }
}

/// Every subgroup of the ambient group, by incremental closure: grow each
/// known subgroup by one outside element and close.  The ambient list must
/// be a group itself; sizes above [`SUBGROUP_ENUMERATION_BOUND`] are
/// refused.  Output is sorted by (order, element list), so the trivial
/// subgroup comes first and the ambient group last.
pub fn enumerate_subgroups(
    level: u32,
    ambient: &[GroupElement],
) -> Result<Vec<Subgroup>, GroupError> {
    if ambient.len() > SUBGROUP_ENUMERATION_BOUND {
        return Err(GroupError::AmbientTooLarge {
            size: ambient.len(),
            bound: SUBGROUP_ENUMERATION_BOUND,
        });
    }
    let ambient_set: BTreeSet<GroupElement> = ambient.iter().copied().collect();
    for x in ambient {
        if x.level() != level {
            return Err(GroupError::LevelMismatch(level, x.level()));
        }
        for y in ambient {
            if !ambient_set.contains(&x.multiply(y)) {
                return Err(GroupError::AmbientNotClosed);
            }
        }
    }

    let trivial = Subgroup::trivial(level);
    let mut found: BTreeMap<Vec<GroupElement>, Vec<GroupElement>> = BTreeMap::new();
    found.insert(trivial.elements.clone(), Vec::new());
    let mut queue: VecDeque<Vec<GroupElement>> = VecDeque::new();
    queue.push_back(trivial.elements.clone());
    while let Some(current) = queue.pop_front() {
        let current_set: BTreeSet<GroupElement> = current.iter().copied().collect();
        let gens = found[&current].clone();
        for g in ambient {
            if current_set.contains(g) {
                continue;
            }
            let mut next_gens = gens.clone();
            next_gens.push(*g);
            let sub = Subgroup::generated_by(level, &next_gens);
            if !found.contains_key(&sub.elements) {
                found.insert(sub.elements.clone(), next_gens);
                queue.push_back(sub.elements);
            }
        }
    }

    let mut subs: Vec<Subgroup> = found
        .into_iter()
        .map(|(elements, generators)| Subgroup {
            level,
            elements,
            generators,
        })
        .collect();
    subs.sort_by_key(|s| (s.order(), s.elements.clone()));
    Ok(subs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(level: u32) -> GroupElement {
        GroupElement::new(level, 0, -1, 1, 0).unwrap()
    }

    fn t(level: u32) -> GroupElement {
        GroupElement::new(level, 1, 1, 0, 1).unwrap()
    }

    #[test]
    fn group_orders_match_the_multiplicative_formula() {
        let expect = [(2u32, 6u64), (3, 12), (4, 24), (5, 60), (6, 72)];
        for (n, order) in expect {
            assert_eq!(group_order_formula(n), order, "formula at N={n}");
            assert_eq!(enumerate_group(n).len() as u64, order, "enumeration at N={n}");
        }
    }

    #[test]
    fn canonical_representative_is_sign_stable() {
        let g1 = GroupElement::new(5, 1, 4, 0, 1).unwrap();
        let g2 = GroupElement::new(5, 4, 1, 0, 4).unwrap(); // the negation
        assert_eq!(g1, g2);
        assert_eq!(g1.entries(), [1, 4, 0, 1]);
    }

    #[test]
    fn non_unimodular_matrices_are_refused() {
        assert!(matches!(
            GroupElement::new(4, 2, 0, 0, 2),
            Err(GroupError::NotUnimodular(..))
        ));
        // det = 4 = -1 mod 5: not in SL_2 even up to sign (only +1 counts;
        // -sigma has the same determinant).
        assert!(GroupElement::new(5, 2, 0, 0, 2).is_err());
    }

    #[test]
    fn negative_entries_reduce_correctly() {
        let g = GroupElement::new(7, -1, 0, 0, -1).unwrap();
        assert!(g.is_identity());
    }

    #[test]
    fn multiplication_inverse_and_torsion() {
        for n in 2u32..=5 {
            let id = GroupElement::identity(n);
            for g in enumerate_group(n) {
                assert_eq!(g.multiply(&g.inverse()), id, "right inverse at N={n}");
                assert_eq!(g.inverse().multiply(&g), id, "left inverse at N={n}");
            }
            // S^2 = -I = I in the quotient; (ST)^3 = I.
            assert_eq!(s(n).multiply(&s(n)), id, "S^2 at N={n}");
            let st = s(n).multiply(&t(n));
            assert_eq!(st.multiply(&st).multiply(&st), id, "(ST)^3 at N={n}");
        }
    }

    #[test]
    fn membership_in_named_families() {
        for n in 2u32..=6 {
            assert!(Family::Gamma1.contains(&t(n)), "T in Gamma1 at N={n}");
            assert!(
                !Family::Gamma0Upper.contains(&t(n)),
                "T not upper-zero at N={n}"
            );
            assert!(
                !Family::Gamma1.contains(&s(n)),
                "S not unitriangular at N={n}"
            );
            // The lower-triangular transvection has a zero upper-right entry
            // but a nonzero lower-left one.
            let low = GroupElement::new(n, 1, 0, 1, 1).unwrap();
            assert!(Family::Gamma0Upper.contains(&low), "L in upper-zero at N={n}");
            assert!(!Family::Gamma1.contains(&low), "L not unitriangular at N={n}");
            assert!(Family::Principal.contains(&GroupElement::identity(n)));
            assert!(!Family::Principal.contains(&low));
        }
    }

    #[test]
    fn gamma0_meets_gamma1_in_the_identity_only() {
        // The upper-zero family intersects the unitriangular family exactly
        // in the principal class, for every level in range.
        for n in 2u32..=6 {
            for g in enumerate_group(n) {
                let both = Family::Gamma0Upper.contains(&g) && Family::Gamma1.contains(&g);
                assert_eq!(both, g.is_identity(), "intersection at N={n}: {g:?}");
            }
        }
    }

    #[test]
    fn subgroup_generation_examples() {
        // <T> at N=4 is cyclic of order 4; <S> of order 2.
        let ct = Subgroup::generated_by(4, &[t(4)]);
        assert_eq!(ct.order(), 4);
        let cs = Subgroup::generated_by(4, &[s(4)]);
        assert_eq!(cs.order(), 2);
        assert!(cs.contains(&s(4)));
        assert!(!cs.contains(&t(4)));
        assert!(Subgroup::trivial(4).is_trivial());
    }

    #[test]
    fn subgroup_lattice_of_s3_and_a4() {
        // N=2: the quotient is S_3 with subgroup orders {1, 2, 2, 2, 3, 6}.
        let g2 = enumerate_group(2);
        let subs2 = enumerate_subgroups(2, &g2).unwrap();
        let orders2: Vec<usize> = subs2.iter().map(|s| s.order()).collect();
        assert_eq!(orders2, vec![1, 2, 2, 2, 3, 6]);

        // N=3: the quotient is A_4 with 10 subgroups.
        let g3 = enumerate_group(3);
        let subs3 = enumerate_subgroups(3, &g3).unwrap();
        let orders3: Vec<usize> = subs3.iter().map(|s| s.order()).collect();
        assert_eq!(orders3, vec![1, 2, 2, 2, 3, 3, 3, 3, 4, 12]);
    }

    #[test]
    fn subgroup_lattice_satisfies_lagrange_and_reaches_extremes() {
        for n in 2u32..=4 {
            let g = enumerate_group(n);
            let subs = enumerate_subgroups(n, &g).unwrap();
            let total = g.len();
            assert_eq!(subs.first().unwrap().order(), 1);
            assert_eq!(subs.last().unwrap().order(), total);
            for s in &subs {
                assert_eq!(total % s.order(), 0, "Lagrange at N={n}");
                // Closure sanity: elements times elements stay inside.
                for x in s.elements() {
                    for y in s.elements() {
                        assert!(s.contains(&x.multiply(y)));
                    }
                }
                // Generators regenerate the same subgroup.
                let regen = Subgroup::generated_by(n, s.generators());
                if s.order() == 1 {
                    assert!(regen.is_trivial());
                } else {
                    assert_eq!(regen.elements(), s.elements());
                }
            }
        }
    }

    #[test]
    fn subgroup_enumeration_bound_is_enforced() {
        let g6 = enumerate_group(6); // order 72 > 60
        assert!(matches!(
            enumerate_subgroups(6, &g6),
            Err(GroupError::AmbientTooLarge { size: 72, bound: 60 })
        ));
    }

    #[test]
    fn ambient_closure_is_validated() {
        let n = 3;
        let bad = vec![GroupElement::identity(n), s(n).multiply(&t(n))];
        assert_eq!(
            enumerate_subgroups(n, &bad.clone()).unwrap_err(),
            GroupError::AmbientNotClosed
        );
    }

    #[test]
    fn index_action_examples() {
        let v01 = IndexVector::new(2, 0, 1).unwrap();
        let v10 = IndexVector::new(2, 1, 0).unwrap();
        // T fixes (0,1) and sends (1,0) to (1,1).
        assert_eq!(t(2).act_on_index(&v01), v01);
        assert_eq!(t(2).act_on_index(&v10), IndexVector::new(2, 1, 1).unwrap());
        // S swaps the two basis vectors (up to sign).
        assert_eq!(s(2).act_on_index(&v01), v10);
        assert_eq!(s(2).act_on_index(&v10), v01);
    }

    #[test]
    fn index_action_composes_through_multiplication() {
        for n in [2u32, 3] {
            let group = enumerate_group(n);
            let vectors: Vec<IndexVector> = (0..n)
                .flat_map(|a| (0..n).map(move |b| (a, b)))
                .filter(|&(a, b)| a != 0 || b != 0)
                .map(|(a, b)| IndexVector::new(n, a, b).unwrap())
                .collect();
            for sg in &group {
                for rh in &group {
                    let prod = sg.multiply(rh);
                    for v in &vectors {
                        assert_eq!(
                            rh.act_on_index(&sg.act_on_index(v)),
                            prod.act_on_index(v),
                            "cocycle at N={n}, sigma={sg:?}, rho={rh:?}, v={v:?}"
                        );
                    }
                }
            }
        }
    }
}
