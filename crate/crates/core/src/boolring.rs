//! Finite Boolean rings presented by their atoms.
//!
//! An element is a subset of the atoms stored as a bitmask (bit `a` is atom
//! `a`). Addition is symmetric difference and multiplication intersection.
//! Textual bitstrings put atom 0 leftmost.

use serde::{Deserialize, Serialize};

use crate::config::{saturating_pow, Limits};
use crate::error::{Error, Result};

/// Largest supported atom count.
pub const MAX_ATOMS: usize = 63;

/// The Boolean ring of all subsets of `atoms` atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoolRing {
    atoms: usize,
}

impl BoolRing {
    pub fn new(atoms: usize) -> Result<Self> {
        if atoms == 0 || atoms > MAX_ATOMS {
            return Err(Error::Config(format!(
                "atom count must be in 1..={MAX_ATOMS}, got {atoms}"
            )));
        }
        Ok(BoolRing { atoms })
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn zero(&self) -> u64 {
        0
    }

    pub fn one(&self) -> u64 {
        (1u64 << self.atoms) - 1
    }

    pub fn atom(&self, a: usize) -> u64 {
        debug_assert!(a < self.atoms);
        1 << a
    }

    #[inline]
    pub fn add(&self, x: u64, y: u64) -> u64 {
        x ^ y
    }

    #[inline]
    pub fn mul(&self, x: u64, y: u64) -> u64 {
        x & y
    }

    pub fn cardinality(&self) -> u64 {
        1 << self.atoms
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.cardinality()
    }

    pub fn contains(&self, x: u64) -> bool {
        x & !self.one() == 0
    }

    pub fn to_bitstring(&self, x: u64) -> String {
        to_bitstring(x, self.atoms)
    }

    pub fn parse_bitstring(&self, s: &str) -> Result<u64> {
        let (x, len) = parse_bitstring(s)?;
        if len != self.atoms {
            return Err(Error::DimensionMismatch {
                expected: self.atoms,
                got: len,
            });
        }
        Ok(x)
    }
}

pub fn to_bitstring(x: u64, len: usize) -> String {
    (0..len)
        .map(|i| if x >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Parses a `0`/`1` string (index 0 leftmost) into a mask and its length.
pub fn parse_bitstring(s: &str) -> Result<(u64, usize)> {
    if s.len() > MAX_ATOMS {
        return Err(Error::Parse(format!("bitstring longer than {MAX_ATOMS}")));
    }
    let mut x = 0;
    for (i, c) in s.chars().enumerate() {
        match c {
            '0' => {}
            '1' => x |= 1 << i,
            other => return Err(Error::Parse(format!("bad bit {other:?} in {s:?}"))),
        }
    }
    Ok((x, s.len()))
}

#[inline]
fn parity(x: u64) -> bool {
    x.count_ones() & 1 == 1
}

/// An additive endomorphism of a Boolean ring, i.e. a square matrix over
/// the two-element field acting on bit-vectors.
///
/// Row `i` holds the coefficients of output coordinate `i`:
/// `(σ x)_i = parity(row_i & x)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "GroupEndoJson", into = "GroupEndoJson")]
pub struct GroupEndo {
    atoms: usize,
    rows: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct GroupEndoJson {
    matrix: Vec<String>,
}

impl TryFrom<GroupEndoJson> for GroupEndo {
    type Error = Error;

    fn try_from(raw: GroupEndoJson) -> Result<Self> {
        let atoms = raw.matrix.len();
        let ring = BoolRing::new(atoms)?;
        let rows = raw
            .matrix
            .iter()
            .map(|r| ring.parse_bitstring(r))
            .collect::<Result<_>>()?;
        Ok(GroupEndo { atoms, rows })
    }
}

impl From<GroupEndo> for GroupEndoJson {
    fn from(g: GroupEndo) -> Self {
        GroupEndoJson {
            matrix: g.rows.iter().map(|&r| to_bitstring(r, g.atoms)).collect(),
        }
    }
}

impl GroupEndo {
    pub fn from_rows(ring: &BoolRing, rows: Vec<u64>) -> Result<Self> {
        if rows.len() != ring.atoms() {
            return Err(Error::DimensionMismatch {
                expected: ring.atoms(),
                got: rows.len(),
            });
        }
        if rows.iter().any(|&r| !ring.contains(r)) {
            return Err(Error::InvalidEndomorphism("row wider than the ring".into()));
        }
        Ok(GroupEndo {
            atoms: ring.atoms(),
            rows,
        })
    }

    pub fn identity(ring: &BoolRing) -> Self {
        GroupEndo {
            atoms: ring.atoms(),
            rows: (0..ring.atoms()).map(|i| 1 << i).collect(),
        }
    }

    pub fn zero(ring: &BoolRing) -> Self {
        GroupEndo {
            atoms: ring.atoms(),
            rows: vec![0; ring.atoms()],
        }
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn apply(&self, x: u64) -> u64 {
        self.rows
            .iter()
            .enumerate()
            .filter(|&(_, &r)| parity(r & x))
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    /// Column `j`, i.e. the image of the basis vector `e_j`.
    pub fn column(&self, j: usize) -> u64 {
        self.apply(1 << j)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GroupEndo) -> GroupEndo {
        debug_assert_eq!(self.atoms, other.atoms);
        // row_i(AB) = Σ_k A[i][k] · row_k(B)
        let rows = self
            .rows
            .iter()
            .map(|&a| {
                (0..self.atoms)
                    .filter(|&k| a >> k & 1 == 1)
                    .fold(0, |acc, k| acc ^ other.rows[k])
            })
            .collect();
        GroupEndo {
            atoms: self.atoms,
            rows,
        }
    }

    pub fn transpose(&self) -> GroupEndo {
        let rows = (0..self.atoms).map(|j| self.column(j)).collect();
        GroupEndo {
            atoms: self.atoms,
            rows,
        }
    }

    /// Whether this additive map is also multiplicative and unital.
    pub fn is_ring_endo(&self, ring: &BoolRing) -> bool {
        self.apply(ring.one()) == ring.one()
            && ring.elements().all(|x| {
                ring.elements()
                    .all(|y| self.apply(x & y) == self.apply(x) & self.apply(y))
            })
    }
}

/// A unital ring endomorphism, stored by the images of the atoms.
///
/// The images are pairwise disjoint and cover the whole ring, so they form
/// an ordered partition of the atoms with possibly empty parts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RingEndoJson", into = "RingEndoJson")]
pub struct RingEndo {
    atoms: usize,
    images: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct RingEndoJson {
    atom_images: Vec<String>,
}

impl TryFrom<RingEndoJson> for RingEndo {
    type Error = Error;

    fn try_from(raw: RingEndoJson) -> Result<Self> {
        let ring = BoolRing::new(raw.atom_images.len())?;
        let images = raw
            .atom_images
            .iter()
            .map(|s| ring.parse_bitstring(s))
            .collect::<Result<_>>()?;
        RingEndo::new(&ring, images)
    }
}

impl From<RingEndo> for RingEndoJson {
    fn from(e: RingEndo) -> Self {
        RingEndoJson {
            atom_images: e.images.iter().map(|&x| to_bitstring(x, e.atoms)).collect(),
        }
    }
}

impl RingEndo {
    pub fn new(ring: &BoolRing, images: Vec<u64>) -> Result<Self> {
        if images.len() != ring.atoms() {
            return Err(Error::DimensionMismatch {
                expected: ring.atoms(),
                got: images.len(),
            });
        }
        if let Some(reason) = ring_endo_violation(ring, &images) {
            return Err(Error::InvalidEndomorphism(reason));
        }
        Ok(RingEndo {
            atoms: ring.atoms(),
            images,
        })
    }

    pub fn identity(ring: &BoolRing) -> Self {
        RingEndo {
            atoms: ring.atoms(),
            images: (0..ring.atoms()).map(|a| 1 << a).collect(),
        }
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn atom_images(&self) -> &[u64] {
        &self.images
    }

    /// Image of an arbitrary element: the sum of the images of its atoms.
    pub fn apply(&self, x: u64) -> u64 {
        (0..self.atoms)
            .filter(|&a| x >> a & 1 == 1)
            .fold(0, |acc, a| acc ^ self.images[a])
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &RingEndo) -> RingEndo {
        RingEndo {
            atoms: self.atoms,
            images: other.images.iter().map(|&x| self.apply(x)).collect(),
        }
    }

    /// The same map viewed as an additive endomorphism.
    pub fn as_group_endo(&self) -> GroupEndo {
        // column a of the matrix is images[a]
        let rows = (0..self.atoms)
            .map(|i| {
                self.images
                    .iter()
                    .enumerate()
                    .filter(|&(_, &img)| img >> i & 1 == 1)
                    .fold(0, |acc, (a, _)| acc | 1 << a)
            })
            .collect();
        GroupEndo {
            atoms: self.atoms,
            rows,
        }
    }
}

fn ring_endo_violation(ring: &BoolRing, images: &[u64]) -> Option<String> {
    let mut union = 0;
    for (a, &x) in images.iter().enumerate() {
        if !ring.contains(x) {
            return Some(format!("image of atom {a} is wider than the ring"));
        }
        if union & x != 0 {
            return Some(format!("image of atom {a} overlaps an earlier image"));
        }
        union |= x;
    }
    (union != ring.one()).then(|| "images do not sum to one".to_string())
}

/// All unital ring endomorphisms, found by filtering every assignment of
/// ring elements to the atoms.
pub fn enumerate_ring_endos(ring: &BoolRing, limits: &Limits) -> Result<Vec<RingEndo>> {
    let n = ring.atoms();
    let card = ring.cardinality();
    limits.check(saturating_pow(card as u128, n as u32))?;
    let mut out = Vec::new();
    let mut images = vec![0u64; n];
    loop {
        if ring_endo_violation(ring, &images).is_none() {
            out.push(RingEndo {
                atoms: n,
                images: images.clone(),
            });
        }
        // odometer over card^n assignments
        let mut i = n;
        loop {
            if i == 0 {
                out.sort();
                return Ok(out);
            }
            i -= 1;
            images[i] += 1;
            if images[i] < card {
                break;
            }
            images[i] = 0;
        }
    }
}

/// All `2^(n²)` additive endomorphisms in canonical order.
pub fn enumerate_group_endos(ring: &BoolRing, limits: &Limits) -> Result<Vec<GroupEndo>> {
    let n = ring.atoms();
    let bits = (n * n) as u32;
    if bits >= 64 {
        return Err(Error::ResourceLimit {
            requested: saturating_pow(2, bits),
            limit: limits.max_enum,
        });
    }
    limits.check(1u128 << bits)?;
    let mask = ring.one();
    let mut out: Vec<GroupEndo> = (0..1u64 << bits)
        .map(|code| GroupEndo {
            atoms: n,
            rows: (0..n).map(|i| code >> (i * n) & mask).collect(),
        })
        .collect();
    out.sort();
    Ok(out)
}

/// A group homomorphism `B → Z₂`, written as the bit-vector `w` with
/// `f(χ) = parity(w & χ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Functional(pub u64);

impl Functional {
    #[inline]
    pub fn eval(&self, chi: u64) -> bool {
        parity(self.0 & chi)
    }
}

/// The Pontryagin dual `Hom(B, Z₂)` of a finite Boolean ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DualGroup {
    ring: BoolRing,
}

pub fn pontryagin_dual(ring: &BoolRing) -> DualGroup {
    DualGroup { ring: *ring }
}

impl DualGroup {
    pub fn ring(&self) -> &BoolRing {
        &self.ring
    }

    pub fn functionals(&self) -> impl Iterator<Item = Functional> {
        self.ring.elements().map(Functional)
    }

    pub fn len(&self) -> usize {
        self.ring.cardinality() as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The evaluation pairing `w(χ, f) = f(χ)`.
    pub fn pairing(&self, chi: u64, f: Functional) -> bool {
        f.eval(chi)
    }

    /// `f(1) = 1` and `f(χψ) = f(χ) f(ψ)` for all `χ, ψ`.
    pub fn is_ring_hom(&self, f: Functional) -> bool {
        f.eval(self.ring.one())
            && self.ring.elements().all(|x| {
                self.ring
                    .elements()
                    .all(|y| f.eval(x & y) == (f.eval(x) && f.eval(y)))
            })
    }

    /// The image of `χ` in the double dual, as the set of functionals
    /// taking value 1 on it (bit `w` set iff `f_w(χ) = 1`).
    pub fn double_dual(&self, chi: u64) -> Vec<bool> {
        self.functionals().map(|f| f.eval(chi)).collect()
    }
}

/// The functionals that are unital ring homomorphisms, found by filtering
/// all of `Hom(B, Z₂)`.
pub fn ring_homs_to_z2(ring: &BoolRing) -> Vec<Functional> {
    let dual = pontryagin_dual(ring);
    dual.functionals()
        .filter(|&f| dual.is_ring_hom(f))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(n: usize) -> BoolRing {
        BoolRing::new(n).unwrap()
    }

    #[test]
    fn boolean_ring_laws() {
        let b = ring(3);
        for x in b.elements() {
            assert_eq!(b.mul(x, x), x);
            assert_eq!(b.add(x, x), b.zero());
            assert_eq!(b.mul(x, b.one()), x);
        }
        assert!(BoolRing::new(0).is_err());
        assert!(BoolRing::new(64).is_err());
    }

    #[test]
    fn bitstrings() {
        let b = ring(4);
        assert_eq!(b.to_bitstring(0b0001), "1000");
        assert_eq!(b.parse_bitstring("0110").unwrap(), 0b0110);
        assert!(b.parse_bitstring("011").is_err());
        assert!(b.parse_bitstring("01a0").is_err());
    }

    /// Candidate assignments filtered by the invariants; independent of the
    /// odometer in `enumerate_ring_endos`.
    fn brute_force_ring_endo_count(n: usize) -> usize {
        let b = ring(n);
        let card = b.cardinality();
        (0..card.pow(n as u32))
            .filter(|&code| {
                let images: Vec<u64> = (0..n).map(|a| code / card.pow(a as u32) % card).collect();
                let g = GroupEndo::from_rows(&b, {
                    (0..n)
                        .map(|i| {
                            (0..n)
                                .filter(|&a| images[a] >> i & 1 == 1)
                                .fold(0, |acc, a| acc | 1 << a)
                        })
                        .collect()
                })
                .unwrap();
                g.is_ring_endo(&b)
            })
            .count()
    }

    #[test]
    fn ring_endo_counts() {
        let limits = Limits::default();
        assert_eq!(enumerate_ring_endos(&ring(1), &limits).unwrap().len(), 1);
        assert_eq!(brute_force_ring_endo_count(2), 4);
        assert_eq!(enumerate_ring_endos(&ring(2), &limits).unwrap().len(), 4);
        assert_eq!(brute_force_ring_endo_count(3), 27);
        assert_eq!(enumerate_ring_endos(&ring(3), &limits).unwrap().len(), 27);
        assert_eq!(enumerate_ring_endos(&ring(4), &limits).unwrap().len(), 256);
    }

    #[test]
    fn ring_endos_form_a_monoid() {
        let b = ring(3);
        let endos = enumerate_ring_endos(&b, &Limits::default()).unwrap();
        assert!(endos.contains(&RingEndo::identity(&b)));
        for x in &endos {
            assert!(x.as_group_endo().is_ring_endo(&b));
            for y in &endos {
                assert!(endos.binary_search(&x.compose(y)).is_ok());
                assert_eq!(
                    x.compose(y).as_group_endo(),
                    x.as_group_endo().compose(&y.as_group_endo())
                );
            }
        }
    }

    #[test]
    fn ring_endo_rejections() {
        let b = ring(2);
        assert!(RingEndo::new(&b, vec![0b11, 0b01]).is_err());
        assert!(RingEndo::new(&b, vec![0b01, 0b00]).is_err());
        assert!(RingEndo::new(&b, vec![0b11, 0b00]).is_ok());
    }

    #[test]
    fn group_endo_counts() {
        let limits = Limits::default();
        assert_eq!(enumerate_group_endos(&ring(1), &limits).unwrap().len(), 2);
        assert_eq!(enumerate_group_endos(&ring(2), &limits).unwrap().len(), 16);
        let three = enumerate_group_endos(&ring(3), &limits).unwrap();
        assert_eq!(three.len(), 512);
        assert!(three.windows(2).all(|w| w[0] < w[1]));
        assert!(matches!(
            enumerate_group_endos(&ring(5), &limits),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn group_endo_action_is_additive() {
        let b = ring(3);
        for g in enumerate_group_endos(&b, &Limits::default()).unwrap() {
            for x in b.elements() {
                for y in b.elements() {
                    assert_eq!(g.apply(x ^ y), g.apply(x) ^ g.apply(y));
                }
            }
        }
    }

    #[test]
    fn dual_group_and_pairing() {
        assert_eq!(pontryagin_dual(&ring(1)).len(), 2);
        let b = ring(2);
        let dual = pontryagin_dual(&b);
        assert_eq!(dual.len(), 4);
        // pairing matrix over atoms has full rank: the dual basis
        let m: Vec<u64> = (0..2)
            .map(|a| {
                dual.functionals()
                    .filter(|&f| dual.pairing(b.atom(a), f))
                    .fold(0, |acc, f| acc | 1 << f.0)
            })
            .collect();
        assert_ne!(m[0], 0);
        assert_ne!(m[1], 0);
        assert_ne!(m[0], m[1]);
    }

    #[test]
    fn double_dual_is_bijective() {
        for n in 1..=4 {
            let b = ring(n);
            let dual = pontryagin_dual(&b);
            let mut images: Vec<Vec<bool>> = b.elements().map(|x| dual.double_dual(x)).collect();
            images.sort();
            images.dedup();
            assert_eq!(images.len() as u64, b.cardinality());
        }
    }

    #[test]
    fn ring_homs_are_atom_evaluations() {
        assert_eq!(ring_homs_to_z2(&ring(1)), vec![Functional(1)]);
        let b = ring(3);
        let homs = ring_homs_to_z2(&b);
        assert_eq!(homs, vec![Functional(1), Functional(2), Functional(4)]);
        for f in &homs {
            assert_eq!((0..3).filter(|&a| f.eval(b.atom(a))).count(), 1);
        }
        assert!(!pontryagin_dual(&b).is_ring_hom(Functional(0)));
    }

    #[test]
    fn json_schemas() {
        let b = ring(3);
        let e = RingEndo::new(&b, vec![0b011, 0b000, 0b100]).unwrap();
        let text = serde_json::to_string(&e).unwrap();
        assert_eq!(text, r#"{"atom_images":["110","000","001"]}"#);
        assert_eq!(serde_json::from_str::<RingEndo>(&text).unwrap(), e);
        let g = e.as_group_endo();
        let text = serde_json::to_string(&g).unwrap();
        assert_eq!(serde_json::from_str::<GroupEndo>(&text).unwrap(), g);
        assert!(serde_json::from_str::<RingEndo>(r#"{"atom_images":["11","11"]}"#).is_err());
    }
}
