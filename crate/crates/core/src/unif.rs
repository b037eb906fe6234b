//! Bases of non-archimedean pre-uniformities on finite sets: families of
//! equivalence relations, their saturation under a monoid action, and the
//! covering combinators (stars, wedges, refinement, order).

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finmon::{MonoidAction, SelfMap};
use crate::ultra::Partition;

/// Largest carrier for bitmask-based covers.
pub const MAX_COVER_POINTS: usize = 64;

/// A set of equivalence relations on one carrier, in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FamilyJson", into = "FamilyJson")]
pub struct PartitionFamily {
    carrier_size: usize,
    members: BTreeSet<Partition>,
}

#[derive(Serialize, Deserialize)]
struct FamilyJson {
    carrier_size: usize,
    members: Vec<Partition>,
}

impl TryFrom<FamilyJson> for PartitionFamily {
    type Error = Error;

    fn try_from(raw: FamilyJson) -> Result<Self> {
        PartitionFamily::new(raw.carrier_size, raw.members)
    }
}

impl From<PartitionFamily> for FamilyJson {
    fn from(f: PartitionFamily) -> Self {
        FamilyJson {
            carrier_size: f.carrier_size,
            members: f.members.into_iter().collect(),
        }
    }
}

impl PartitionFamily {
    pub fn new(carrier_size: usize, members: impl IntoIterator<Item = Partition>) -> Result<Self> {
        let members: BTreeSet<Partition> = members.into_iter().collect();
        if let Some(p) = members.iter().find(|p| p.carrier_size() != carrier_size) {
            return Err(Error::CarrierMismatch {
                left: carrier_size,
                right: p.carrier_size(),
            });
        }
        Ok(PartitionFamily {
            carrier_size,
            members,
        })
    }

    pub fn carrier_size(&self) -> usize {
        self.carrier_size
    }

    pub fn members(&self) -> impl Iterator<Item = &Partition> {
        self.members.iter()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, p: &Partition) -> bool {
        self.members.contains(p)
    }

    pub fn is_subset(&self, other: &PartitionFamily) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn is_meet_closed(&self) -> bool {
        self.members.iter().all(|a| {
            self.members
                .iter()
                .all(|b| self.contains(&a.meet(b).expect("same carrier")))
        })
    }

    /// Closed under `ε ↦ s⁻¹ε` for every translation of `action`.
    pub fn is_saturated_under(&self, action: &MonoidAction) -> bool {
        action.translations().iter().all(|s| {
            self.members
                .iter()
                .all(|p| preimage_partition(s, p).is_ok_and(|q| self.contains(&q)))
        })
    }

    /// The meet of all members, or the full relation for an empty family.
    pub fn meet_all(&self) -> Partition {
        self.members
            .iter()
            .fold(Partition::indiscrete(self.carrier_size), |acc, p| {
                acc.meet(p).expect("same carrier")
            })
    }
}

/// `s⁻¹ε = {(x, y) : (s x, s y) ∈ ε}`.
pub fn preimage_partition(s: &SelfMap, p: &Partition) -> Result<Partition> {
    if s.carrier_size() != p.carrier_size() {
        return Err(Error::CarrierMismatch {
            left: s.carrier_size(),
            right: p.carrier_size(),
        });
    }
    Ok(Partition::from_labels(
        &s.values()
            .iter()
            .map(|&y| p.class_of(y))
            .collect::<Vec<_>>(),
    ))
}

/// The least family containing `gamma` that is closed under preimages by
/// every translation of `action` and under pairwise meets.
pub fn saturate(action: &MonoidAction, gamma: &PartitionFamily) -> Result<PartitionFamily> {
    if action.carrier_size() != gamma.carrier_size() {
        return Err(Error::CarrierMismatch {
            left: action.carrier_size(),
            right: gamma.carrier_size(),
        });
    }
    let mut family: BTreeSet<Partition> = BTreeSet::new();
    let mut queue: VecDeque<Partition> = gamma.members.iter().cloned().collect();
    // each member, when first inserted, contributes its preimages and its
    // meets with everything already present
    while let Some(p) = queue.pop_front() {
        if family.contains(&p) {
            continue;
        }
        for s in action.translations() {
            let q = preimage_partition(s, &p)?;
            if !family.contains(&q) {
                queue.push_back(q);
            }
        }
        for q in &family {
            let m = p.meet(q)?;
            if !family.contains(&m) {
                queue.push_back(m);
            }
        }
        family.insert(p);
    }
    Ok(PartitionFamily {
        carrier_size: gamma.carrier_size,
        members: family,
    })
}

/// What boundedness and equiuniformity reduce to on a finite discrete
/// monoid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundednessReport {
    pub monoid_size: usize,
    pub carrier_size: usize,
    pub saturated: bool,
    pub bounded: bool,
    pub note: String,
}

/// Reports saturation of `family` under `action`. Boundedness is reported
/// as holding with an explicit note: on a finite discrete monoid every
/// point has the neighborhood `{s₀}`, so the condition is vacuous.
pub fn boundedness_report(action: &MonoidAction, family: &PartitionFamily) -> BoundednessReport {
    BoundednessReport {
        monoid_size: action.monoid().size(),
        carrier_size: action.carrier_size(),
        saturated: family.is_saturated_under(action),
        bounded: true,
        note: "vacuous: the discrete monoid has the singleton neighborhood {s0} at every s0"
            .to_string(),
    }
}

/// The partition `ε_f = {(x, y) : f(x) = f(y)}` of a two-valued function.
pub fn kernel_partition(f: &[bool]) -> Partition {
    Partition::from_labels(f)
}

/// Meet of the kernel partitions of a family of two-valued functions.
pub fn kernel_meet(carrier_size: usize, functions: &[Vec<bool>]) -> Result<Partition> {
    functions
        .iter()
        .try_fold(Partition::indiscrete(carrier_size), |acc, f| {
            acc.meet(&kernel_partition(f))
        })
}

/// A cover of `{0, .., n-1}` by nonempty, possibly overlapping blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "CoverJson", into = "CoverJson")]
pub struct Cover {
    carrier_size: usize,
    blocks: BTreeSet<u64>,
}

#[derive(Serialize, Deserialize)]
struct CoverJson {
    blocks: Vec<Vec<usize>>,
}

impl TryFrom<CoverJson> for Cover {
    type Error = Error;

    fn try_from(raw: CoverJson) -> Result<Self> {
        let n = raw.blocks.iter().flatten().max().map_or(0, |&m| m + 1);
        let blocks = raw
            .blocks
            .iter()
            .map(|b| points_to_mask(n, b))
            .collect::<Result<Vec<_>>>()?;
        Cover::new(n, blocks)
    }
}

impl From<Cover> for CoverJson {
    fn from(c: Cover) -> Self {
        CoverJson {
            blocks: c.blocks.iter().map(|&b| mask_to_points(b)).collect(),
        }
    }
}

pub fn points_to_mask(n: usize, points: &[usize]) -> Result<u64> {
    points.iter().try_fold(0u64, |acc, &x| {
        if x >= n || x >= MAX_COVER_POINTS {
            Err(Error::OutOfRange { index: x, size: n })
        } else {
            Ok(acc | 1 << x)
        }
    })
}

pub fn mask_to_points(mask: u64) -> Vec<usize> {
    (0..MAX_COVER_POINTS)
        .filter(|&x| mask >> x & 1 == 1)
        .collect()
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl Cover {
    pub fn new(carrier_size: usize, blocks: impl IntoIterator<Item = u64>) -> Result<Self> {
        if carrier_size == 0 || carrier_size > MAX_COVER_POINTS {
            return Err(Error::InvalidCover(format!(
                "carrier size must be in 1..={MAX_COVER_POINTS}"
            )));
        }
        let full = full_mask(carrier_size);
        let blocks: BTreeSet<u64> = blocks.into_iter().collect();
        if blocks.contains(&0) {
            return Err(Error::InvalidCover("empty block".into()));
        }
        if blocks.iter().any(|&b| b & !full != 0) {
            return Err(Error::InvalidCover("block leaves the carrier".into()));
        }
        if blocks.iter().fold(0, |acc, &b| acc | b) != full {
            return Err(Error::InvalidCover(
                "blocks do not cover the carrier".into(),
            ));
        }
        Ok(Cover {
            carrier_size,
            blocks,
        })
    }

    pub fn from_partition(p: &Partition) -> Result<Self> {
        Cover::new(p.carrier_size(), p.class_masks())
    }

    /// The one-block cover `{X}`.
    pub fn whole(carrier_size: usize) -> Result<Self> {
        Cover::new(carrier_size, [full_mask(carrier_size)])
    }

    pub fn carrier_size(&self) -> usize {
        self.carrier_size
    }

    pub fn blocks(&self) -> impl Iterator<Item = u64> + '_ {
        self.blocks.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    fn same_carrier(&self, other: &Cover) -> Result<()> {
        if self.carrier_size != other.carrier_size {
            return Err(Error::CarrierMismatch {
                left: self.carrier_size,
                right: other.carrier_size,
            });
        }
        Ok(())
    }
}

/// `P ∧ Q = {A ∩ B : A ∈ P, B ∈ Q}`, empty intersections dropped.
pub fn cover_wedge(p: &Cover, q: &Cover) -> Result<Cover> {
    p.same_carrier(q)?;
    let blocks = p
        .blocks()
        .flat_map(|a| q.blocks().map(move |b| a & b))
        .filter(|&x| x != 0);
    Cover::new(p.carrier_size, blocks)
}

/// `st(A, P)`: union of the blocks of `P` meeting `A`.
pub fn star(a: u64, p: &Cover) -> u64 {
    p.blocks().filter(|&u| u & a != 0).fold(0, |acc, u| acc | u)
}

/// `P* = {st(A, P) : A ∈ P}`.
pub fn cover_star(p: &Cover) -> Cover {
    Cover::new(p.carrier_size, p.blocks().map(|a| star(a, p))).expect("stars cover the carrier")
}

/// `A ≻ P`: the set `A` lies in some block of `P`.
pub fn subset_refines(a: u64, p: &Cover) -> bool {
    p.blocks().any(|u| a & !u == 0)
}

/// `Q ≻ P`: every block of `Q` lies in some block of `P`.
pub fn refines(q: &Cover, p: &Cover) -> Result<bool> {
    q.same_carrier(p)?;
    Ok(q.blocks().all(|a| subset_refines(a, p)))
}

/// `P ≻* Q`, i.e. `P* ≻ Q`.
pub fn star_refines(p: &Cover, q: &Cover) -> Result<bool> {
    refines(&cover_star(p), q)
}

/// `ord_x(P)`: number of blocks containing `x`.
pub fn order_at(p: &Cover, x: usize) -> usize {
    p.blocks().filter(|&b| b >> x & 1 == 1).count()
}

/// `ord(P) = max_x ord_x(P)`.
pub fn cover_order(p: &Cover) -> usize {
    (0..p.carrier_size)
        .map(|x| order_at(p, x))
        .max()
        .unwrap_or(0)
}
