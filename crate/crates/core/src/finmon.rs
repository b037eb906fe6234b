//! Finite monoids given by multiplication tables, their actions, and monoids
//! of self-maps of a finite set.
//!
//! Composition of self-maps is read right to left: `(s * t)(x) = s(t(x))`,
//! so a [`SelfMapMonoid`] acts on its carrier from the left.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::{saturating_pow, Limits};
use crate::error::{Error, Result};

/// A self-map of `{0, .., n-1}` stored as its value array.
///
/// The derived ordering is lexicographic on the value array, which is the
/// canonical element order used by every enumeration in this crate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SelfMap(Vec<usize>);

impl SelfMap {
    pub fn new(values: Vec<usize>) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::EmptyInput("self-map on an empty carrier"));
        }
        if let Some(&v) = values.iter().find(|&&v| v >= n) {
            return Err(Error::OutOfRange { index: v, size: n });
        }
        Ok(SelfMap(values))
    }

    pub fn identity(n: usize) -> Self {
        SelfMap((0..n).collect())
    }

    pub fn constant(n: usize, c: usize) -> Self {
        SelfMap(vec![c; n])
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.0[x]
    }

    pub fn carrier_size(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[usize] {
        &self.0
    }

    /// `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn compose(&self, other: &SelfMap) -> SelfMap {
        SelfMap(other.0.iter().map(|&y| self.0[y]).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.0.len()];
        self.0
            .iter()
            .all(|&v| !std::mem::replace(&mut seen[v], true))
    }

    /// Preimage of a point set given as a bitmask.
    pub fn preimage_mask(&self, set: u64) -> u64 {
        self.0
            .iter()
            .enumerate()
            .filter(|&(_, &v)| set >> v & 1 == 1)
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    /// Position of this map in the lexicographic list of all `n^n` maps.
    pub fn rank(&self) -> usize {
        let n = self.0.len();
        self.0.iter().fold(0, |acc, &v| acc * n + v)
    }

    /// Inverse of [`SelfMap::rank`].
    pub fn unrank(n: usize, mut rank: usize) -> SelfMap {
        let mut values = vec![0; n];
        for slot in values.iter_mut().rev() {
            *slot = rank % n;
            rank /= n;
        }
        SelfMap(values)
    }
}

impl fmt::Display for SelfMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// A finite monoid presented by its multiplication table.
///
/// `table[x][y]` is the product `x * y` (row = left factor).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MonoidJson", into = "MonoidJson")]
pub struct FiniteMonoid {
    size: usize,
    identity: usize,
    table: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct MonoidJson {
    size: usize,
    identity: usize,
    table: Vec<Vec<usize>>,
}

impl TryFrom<MonoidJson> for FiniteMonoid {
    type Error = Error;

    fn try_from(raw: MonoidJson) -> Result<Self> {
        if raw.table.len() != raw.size {
            return Err(Error::MalformedTable(format!(
                "size is {} but the table has {} rows",
                raw.size,
                raw.table.len()
            )));
        }
        validate_monoid(raw.table, raw.identity)
    }
}

impl From<FiniteMonoid> for MonoidJson {
    fn from(m: FiniteMonoid) -> Self {
        MonoidJson {
            size: m.size,
            identity: m.identity,
            table: m.rows(),
        }
    }
}

/// Checks shape, identity and associativity of a table and wraps it.
pub fn validate_monoid(table: Vec<Vec<usize>>, identity: usize) -> Result<FiniteMonoid> {
    let m = FiniteMonoid::from_rows_unchecked(table, identity)?;
    if let Some(x) = m.identity_violation() {
        return Err(Error::IdentityViolation { x });
    }
    if let Some((x, y, z)) = m.associativity_violation() {
        return Err(Error::AssociativityViolation { x, y, z });
    }
    Ok(m)
}

impl FiniteMonoid {
    /// Shape and range checks only.
    fn from_rows_unchecked(rows: Vec<Vec<usize>>, identity: usize) -> Result<Self> {
        let size = rows.len();
        if size == 0 {
            return Err(Error::MalformedTable("empty table".into()));
        }
        if identity >= size {
            return Err(Error::OutOfRange {
                index: identity,
                size,
            });
        }
        let mut table = Vec::with_capacity(size * size);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != size {
                return Err(Error::MalformedTable(format!(
                    "row {i} has {} entries, expected {size}",
                    row.len()
                )));
            }
            if let Some(&v) = row.iter().find(|&&v| v >= size) {
                return Err(Error::OutOfRange { index: v, size });
            }
            table.extend(row);
        }
        Ok(FiniteMonoid {
            size,
            identity,
            table,
        })
    }

    fn identity_violation(&self) -> Option<usize> {
        (0..self.size).find(|&x| self.mul(self.identity, x) != x || self.mul(x, self.identity) != x)
    }

    fn associativity_violation(&self) -> Option<(usize, usize, usize)> {
        for x in 0..self.size {
            for y in 0..self.size {
                let xy = self.mul(x, y);
                for z in 0..self.size {
                    if self.mul(xy, z) != self.mul(x, self.mul(y, z)) {
                        return Some((x, y, z));
                    }
                }
            }
        }
        None
    }

    /// The trivial one-element monoid.
    pub fn trivial() -> Self {
        FiniteMonoid {
            size: 1,
            identity: 0,
            table: vec![0],
        }
    }

    /// Turns a semigroup table into a monoid by adjoining a fresh identity
    /// with index `size`.
    pub fn adjoin_identity(semigroup: Vec<Vec<usize>>) -> Result<Self> {
        let n = semigroup.len();
        let rows = semigroup
            .into_iter()
            .enumerate()
            .map(|(x, mut row)| {
                row.push(x);
                row
            })
            .chain(std::iter::once((0..=n).collect()))
            .collect();
        validate_monoid(rows, n)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x * self.size + y]
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table
            .chunks(self.size)
            .map(<[usize]>::to_vec)
            .collect()
    }

    /// The opposite monoid: `x *op y = y * x`.
    pub fn opposite(&self) -> FiniteMonoid {
        let n = self.size;
        let mut table = vec![0; n * n];
        for x in 0..n {
            for y in 0..n {
                table[x * n + y] = self.mul(y, x);
            }
        }
        FiniteMonoid {
            size: n,
            identity: self.identity,
            table,
        }
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.size).all(|x| (0..x).all(|y| self.mul(x, y) == self.mul(y, x)))
    }

    /// True iff `subset` contains the identity and is closed under products.
    pub fn is_submonoid(&self, subset: &[usize]) -> bool {
        let mut member = vec![false; self.size];
        for &x in subset {
            match member.get_mut(x) {
                Some(slot) => *slot = true,
                None => return false,
            }
        }
        member[self.identity]
            && subset
                .iter()
                .all(|&x| subset.iter().all(|&y| member[self.mul(x, y)]))
    }

    /// Left translation `x ↦ s * x`.
    pub fn left_translation(&self, s: usize) -> SelfMap {
        SelfMap(self.table[s * self.size..(s + 1) * self.size].to_vec())
    }

    /// Right translation `x ↦ x * s`.
    pub fn right_translation(&self, s: usize) -> SelfMap {
        SelfMap((0..self.size).map(|x| self.mul(x, s)).collect())
    }

    /// The Cayley representation `s ↦ (x ↦ s x)` into the self-maps of the
    /// carrier.
    pub fn cayley_embed(&self) -> CayleyEmbedding {
        let maps: Vec<SelfMap> = (0..self.size).map(|s| self.left_translation(s)).collect();
        let image = SelfMapMonoid::from_elements(self.size, maps.iter().cloned().collect());
        let element_map = maps
            .iter()
            .map(|h| image.index_of(h).expect("image contains every translation"))
            .collect();
        CayleyEmbedding { image, element_map }
    }
}

/// Result of [`FiniteMonoid::cayley_embed`].
#[derive(Debug, Clone)]
pub struct CayleyEmbedding {
    /// The translation maps, in canonical order.
    pub image: SelfMapMonoid,
    /// `element_map[s]` is the index in `image` of the translation by `s`.
    pub element_map: Vec<usize>,
}

/// A monoid of self-maps of `{0, .., n-1}` closed under composition.
///
/// Elements are kept in canonical (lexicographic) order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfMapMonoid {
    carrier_size: usize,
    elements: Vec<SelfMap>,
}

impl SelfMapMonoid {
    /// Wraps a set of maps that is already known to be a monoid.
    pub(crate) fn from_elements(carrier_size: usize, elements: BTreeSet<SelfMap>) -> Self {
        SelfMapMonoid {
            carrier_size,
            elements: elements.into_iter().collect(),
        }
    }

    /// Checks identity membership and closure, then wraps the maps.
    pub fn new(carrier_size: usize, maps: impl IntoIterator<Item = SelfMap>) -> Result<Self> {
        let set: BTreeSet<SelfMap> = maps.into_iter().collect();
        if let Some(bad) = set.iter().find(|m| m.carrier_size() != carrier_size) {
            return Err(Error::DimensionMismatch {
                expected: carrier_size,
                got: bad.carrier_size(),
            });
        }
        let monoid = SelfMapMonoid::from_elements(carrier_size, set);
        if monoid.index_of(&SelfMap::identity(carrier_size)).is_none() {
            return Err(Error::MalformedTable("identity map missing".into()));
        }
        for a in &monoid.elements {
            for b in &monoid.elements {
                if monoid.index_of(&a.compose(b)).is_none() {
                    return Err(Error::MalformedTable(format!(
                        "{a} ∘ {b} is not in the set"
                    )));
                }
            }
        }
        Ok(monoid)
    }

    /// The submonoid generated by `generators` (identity included).
    pub fn generated_by(
        carrier_size: usize,
        generators: &[SelfMap],
        limits: &Limits,
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        let id = SelfMap::identity(carrier_size);
        seen.insert(id.clone());
        queue.push_back(id);
        while let Some(m) = queue.pop_front() {
            for g in generators {
                if g.carrier_size() != carrier_size {
                    return Err(Error::DimensionMismatch {
                        expected: carrier_size,
                        got: g.carrier_size(),
                    });
                }
                let next = g.compose(&m);
                if seen.insert(next.clone()) {
                    limits.check(seen.len() as u128)?;
                    queue.push_back(next);
                }
            }
        }
        Ok(SelfMapMonoid::from_elements(carrier_size, seen))
    }

    pub fn carrier_size(&self) -> usize {
        self.carrier_size
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[SelfMap] {
        &self.elements
    }

    pub fn get(&self, i: usize) -> &SelfMap {
        &self.elements[i]
    }

    pub fn index_of(&self, map: &SelfMap) -> Option<usize> {
        self.elements.binary_search(map).ok()
    }

    pub fn contains(&self, map: &SelfMap) -> bool {
        self.index_of(map).is_some()
    }

    /// Index of `elements[i] ∘ elements[j]`.
    pub fn compose_index(&self, i: usize, j: usize) -> usize {
        self.index_of(&self.elements[i].compose(&self.elements[j]))
            .expect("self-map monoid is closed under composition")
    }

    /// Materializes the multiplication table.
    pub fn to_finite_monoid(&self, limits: &Limits) -> Result<FiniteMonoid> {
        let n = self.elements.len();
        limits.check((n as u128).saturating_mul(n as u128))?;
        let identity = self
            .index_of(&SelfMap::identity(self.carrier_size))
            .expect("self-map monoid contains the identity");
        let rows = (0..n)
            .map(|i| (0..n).map(|j| self.compose_index(i, j)).collect())
            .collect();
        validate_monoid(rows, identity)
    }

    /// The natural left action on the carrier.
    pub fn natural_action(&self, limits: &Limits) -> Result<MonoidAction> {
        let monoid = self.to_finite_monoid(limits)?;
        let act = self.elements.iter().map(|m| m.values().to_vec()).collect();
        MonoidAction::new(monoid, self.carrier_size, act)
    }
}

/// All `n^n` self-maps of an `n`-point set in lexicographic order.
pub fn full_selfmap_monoid(n: usize, limits: &Limits) -> Result<SelfMapMonoid> {
    if n == 0 {
        return Err(Error::EmptyInput("carrier size must be positive"));
    }
    limits.check(saturating_pow(n as u128, n as u32))?;
    let count = n.pow(n as u32);
    Ok(SelfMapMonoid {
        carrier_size: n,
        elements: (0..count).map(|r| SelfMap::unrank(n, r)).collect(),
    })
}

/// A left action of a finite monoid on a finite set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ActionJson", into = "ActionJson")]
pub struct MonoidAction {
    monoid: FiniteMonoid,
    carrier_size: usize,
    act: Vec<SelfMap>,
}

#[derive(Serialize, Deserialize)]
struct ActionJson {
    monoid: FiniteMonoid,
    carrier_size: usize,
    act: Vec<Vec<usize>>,
}

impl TryFrom<ActionJson> for MonoidAction {
    type Error = Error;

    fn try_from(raw: ActionJson) -> Result<Self> {
        MonoidAction::new(raw.monoid, raw.carrier_size, raw.act)
    }
}

impl From<MonoidAction> for ActionJson {
    fn from(a: MonoidAction) -> Self {
        ActionJson {
            monoid: a.monoid,
            carrier_size: a.carrier_size,
            act: a.act.into_iter().map(|m| m.0).collect(),
        }
    }
}

impl MonoidAction {
    /// `act[s][x]` is the image of `x` under `s`.
    pub fn new(monoid: FiniteMonoid, carrier_size: usize, act: Vec<Vec<usize>>) -> Result<Self> {
        if act.len() != monoid.size() {
            return Err(Error::DimensionMismatch {
                expected: monoid.size(),
                got: act.len(),
            });
        }
        let act = act
            .into_iter()
            .map(|row| {
                if row.len() != carrier_size {
                    return Err(Error::DimensionMismatch {
                        expected: carrier_size,
                        got: row.len(),
                    });
                }
                SelfMap::new(row)
            })
            .collect::<Result<Vec<_>>>()?;
        if !act[monoid.identity()].is_identity() {
            return Err(Error::ActionViolation(
                "identity does not act trivially".into(),
            ));
        }
        for s in 0..monoid.size() {
            for t in 0..monoid.size() {
                if act[monoid.mul(s, t)] != act[s].compose(&act[t]) {
                    return Err(Error::ActionViolation(format!(
                        "({s} * {t})(x) differs from {s}({t}(x))"
                    )));
                }
            }
        }
        Ok(MonoidAction {
            monoid,
            carrier_size,
            act,
        })
    }

    /// The left action of a monoid on itself.
    pub fn regular(monoid: &FiniteMonoid) -> MonoidAction {
        let act = (0..monoid.size())
            .map(|s| monoid.left_translation(s))
            .collect();
        MonoidAction {
            monoid: monoid.clone(),
            carrier_size: monoid.size(),
            act,
        }
    }

    pub fn monoid(&self) -> &FiniteMonoid {
        &self.monoid
    }

    pub fn carrier_size(&self) -> usize {
        self.carrier_size
    }

    pub fn translation(&self, s: usize) -> &SelfMap {
        &self.act[s]
    }

    pub fn translations(&self) -> &[SelfMap] {
        &self.act
    }

    #[inline]
    pub fn apply(&self, s: usize, x: usize) -> usize {
        self.act[s].apply(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2() -> FiniteMonoid {
        validate_monoid(vec![vec![0, 1], vec![1, 0]], 0).unwrap()
    }

    fn semilattice() -> FiniteMonoid {
        validate_monoid(vec![vec![0, 1], vec![1, 1]], 0).unwrap()
    }

    #[test]
    fn validates_small_tables() {
        assert_eq!(validate_monoid(vec![vec![0]], 0).unwrap().size(), 1);
        assert!(z2().is_commutative());
        assert_eq!(semilattice().mul(1, 1), 1);
    }

    #[test]
    fn reports_violations() {
        assert_eq!(
            validate_monoid(vec![vec![0, 1], vec![1, 1]], 1),
            Err(Error::IdentityViolation { x: 0 })
        );
        // identity 0, but 1*1 = 2, 2*1 = 0, 1*2 = 1: (1*1)*1 = 0 vs 1*(1*1) = 1
        let bad = vec![vec![0, 1, 2], vec![1, 2, 1], vec![2, 0, 2]];
        assert!(matches!(
            validate_monoid(bad, 0),
            Err(Error::AssociativityViolation { .. })
        ));
        assert!(matches!(
            validate_monoid(vec![vec![0, 2], vec![1, 0]], 0),
            Err(Error::OutOfRange { .. })
        ));
        assert!(validate_monoid(vec![vec![0, 1]], 0).is_err());
    }

    #[test]
    fn opposite_of_commutative_is_itself() {
        assert_eq!(z2().opposite(), z2());
        assert_eq!(semilattice().opposite(), semilattice());
    }

    #[test]
    fn opposite_reverses_selfmap_composition() {
        let full = full_selfmap_monoid(2, &Limits::default()).unwrap();
        let m = full.to_finite_monoid(&Limits::default()).unwrap();
        let op = m.opposite();
        assert_ne!(m, op);
        for i in 0..4 {
            for j in 0..4 {
                let reversed = full.get(j).compose(full.get(i));
                assert_eq!(full.get(op.mul(i, j)), &reversed);
            }
        }
        assert_eq!(op.opposite(), m);
    }

    #[test]
    fn full_selfmap_counts_and_closure() {
        let limits = Limits::default();
        assert_eq!(full_selfmap_monoid(1, &limits).unwrap().len(), 1);
        assert_eq!(full_selfmap_monoid(2, &limits).unwrap().len(), 4);
        let three = full_selfmap_monoid(3, &limits).unwrap();
        assert_eq!(three.len(), 27);
        assert!(three.contains(&SelfMap::identity(3)));
        for a in three.elements() {
            for b in three.elements() {
                assert!(three.contains(&a.compose(b)));
            }
        }
        assert!(three.elements().windows(2).all(|w| w[0] < w[1]));
        assert!(matches!(
            full_selfmap_monoid(9, &limits),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn rank_roundtrip() {
        for r in 0..256 {
            assert_eq!(SelfMap::unrank(4, r).rank(), r);
        }
    }

    #[test]
    fn cayley_images() {
        let trivial = FiniteMonoid::trivial().cayley_embed();
        assert_eq!(trivial.image.elements(), &[SelfMap::identity(1)]);

        let z2 = z2().cayley_embed();
        assert_eq!(
            z2.image.elements(),
            &[SelfMap(vec![0, 1]), SelfMap(vec![1, 0])]
        );

        let m = semilattice();
        let emb = m.cayley_embed();
        assert_eq!(emb.image.len(), 2);
        for s in 0..2 {
            for t in 0..2 {
                let lhs = emb.image.get(emb.element_map[m.mul(s, t)]);
                let rhs = emb
                    .image
                    .get(emb.element_map[s])
                    .compose(emb.image.get(emb.element_map[t]));
                assert_eq!(lhs, &rhs);
            }
        }
    }

    #[test]
    fn submonoid_checks() {
        let m = semilattice();
        assert!(m.is_submonoid(&[0, 1]));
        assert!(m.is_submonoid(&[0]));
        // 1 is idempotent but not the identity
        assert!(!m.is_submonoid(&[1]));
        assert!(!m.is_submonoid(&[5]));
    }

    #[test]
    fn adjoining_identity() {
        // left-zero semigroup on two elements
        let m = FiniteMonoid::adjoin_identity(vec![vec![0, 0], vec![1, 1]]).unwrap();
        assert_eq!(m.size(), 3);
        assert_eq!(m.identity(), 2);
        assert_eq!(m.mul(0, 1), 0);
    }

    #[test]
    fn action_validation() {
        let m = z2();
        assert!(MonoidAction::new(m.clone(), 3, vec![vec![0, 1, 2], vec![1, 0, 2]]).is_ok());
        assert!(MonoidAction::new(m.clone(), 3, vec![vec![0, 1, 2], vec![1, 2, 0]]).is_err());
        assert!(MonoidAction::new(m, 3, vec![vec![1, 0, 2], vec![1, 0, 2]]).is_err());
    }

    #[test]
    fn generated_submonoid() {
        let shift = SelfMap::new(vec![1, 2, 2]).unwrap();
        let g = SelfMapMonoid::generated_by(3, &[shift], &Limits::default()).unwrap();
        assert_eq!(g.len(), 3);
        assert!(g.to_finite_monoid(&Limits::default()).is_ok());
    }

    #[test]
    fn json_schema() {
        let m = semilattice();
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(text, r#"{"size":2,"identity":0,"table":[[0,1],[1,1]]}"#);
        let back: FiniteMonoid = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
        let bad: std::result::Result<FiniteMonoid, _> =
            serde_json::from_str(r#"{"size":2,"identity":1,"table":[[0,1],[1,1]]}"#);
        assert!(bad.is_err());
    }
}
