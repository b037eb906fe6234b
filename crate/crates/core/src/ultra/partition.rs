use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An equivalence relation on `{0, .., n-1}`.
///
/// Classes are numbered by first occurrence, so equal relations have equal
/// `class_id` arrays and the derived ordering is canonical.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "PartitionJson", into = "PartitionJson")]
pub struct Partition {
    class_id: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct PartitionJson {
    classes: Vec<Vec<usize>>,
}

impl TryFrom<PartitionJson> for Partition {
    type Error = Error;

    fn try_from(raw: PartitionJson) -> Result<Self> {
        let n = raw.classes.iter().map(Vec::len).sum();
        Partition::from_classes(n, &raw.classes)
    }
}

impl From<Partition> for PartitionJson {
    fn from(p: Partition) -> Self {
        PartitionJson {
            classes: p.classes(),
        }
    }
}

impl Partition {
    /// Normalizes arbitrary labels into first-occurrence numbering.
    pub fn from_labels<T: PartialEq>(labels: &[T]) -> Self {
        let mut reps: Vec<&T> = Vec::new();
        let class_id = labels
            .iter()
            .map(|l| match reps.iter().position(|r| *r == l) {
                Some(i) => i,
                None => {
                    reps.push(l);
                    reps.len() - 1
                }
            })
            .collect();
        Partition { class_id }
    }

    /// Like [`Partition::from_labels`] but hashing, for large carriers.
    pub fn from_keys<K: std::hash::Hash + Eq>(keys: impl IntoIterator<Item = K>) -> Self {
        let mut ids = std::collections::HashMap::new();
        let class_id = keys
            .into_iter()
            .map(|k| {
                let next = ids.len();
                *ids.entry(k).or_insert(next)
            })
            .collect();
        Partition { class_id }
    }

    pub fn from_classes(n: usize, classes: &[Vec<usize>]) -> Result<Self> {
        let mut labels = vec![usize::MAX; n];
        for (c, class) in classes.iter().enumerate() {
            if class.is_empty() {
                return Err(Error::InvalidPartition("empty class".into()));
            }
            for &x in class {
                match labels.get_mut(x) {
                    None => return Err(Error::OutOfRange { index: x, size: n }),
                    Some(slot) if *slot != usize::MAX => {
                        return Err(Error::InvalidPartition(format!("point {x} listed twice")))
                    }
                    Some(slot) => *slot = c,
                }
            }
        }
        if let Some(x) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::InvalidPartition(format!("point {x} is in no class")));
        }
        Ok(Partition::from_labels(&labels))
    }

    /// Builds the partition of a relation given as a predicate, checking that
    /// it is reflexive, symmetric and transitive.
    pub fn from_relation(n: usize, related: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let mut label = vec![usize::MAX; n];
        let mut reps: Vec<usize> = Vec::new();
        for (x, slot) in label.iter_mut().enumerate() {
            if !related(x, x) {
                return Err(Error::InvalidPartition(format!("not reflexive at {x}")));
            }
            *slot = match reps.iter().position(|&r| related(r, x)) {
                Some(c) => c,
                None => {
                    reps.push(x);
                    reps.len() - 1
                }
            };
        }
        // the labelling is a partition; it equals the relation iff every pair
        // agrees with it
        for x in 0..n {
            for y in 0..n {
                let same = label[x] == label[y];
                if same != related(x, y) {
                    let (rx, ry) = (reps[label[x]], reps[label[y]]);
                    return Err(if related(y, x) != related(x, y) {
                        Error::InvalidPartition(format!("not symmetric at ({x}, {y})"))
                    } else if same {
                        Error::NotTransitive { x, y: rx, z: y }
                    } else if label[y] < label[x] {
                        Error::NotTransitive { x: ry, y, z: x }
                    } else {
                        Error::NotTransitive { x: rx, y: x, z: y }
                    });
                }
            }
        }
        Ok(Partition { class_id: label })
    }

    pub fn discrete(n: usize) -> Self {
        Partition {
            class_id: (0..n).collect(),
        }
    }

    pub fn indiscrete(n: usize) -> Self {
        Partition {
            class_id: vec![0; n],
        }
    }

    pub fn carrier_size(&self) -> usize {
        self.class_id.len()
    }

    pub fn class_ids(&self) -> &[usize] {
        &self.class_id
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.class_id[x]
    }

    #[inline]
    pub fn related(&self, x: usize, y: usize) -> bool {
        self.class_id[x] == self.class_id[y]
    }

    pub fn num_classes(&self) -> usize {
        self.class_id.iter().max().map_or(0, |&m| m + 1)
    }

    /// Classes as sorted point lists, ordered by smallest member.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_classes()];
        for (x, &c) in self.class_id.iter().enumerate() {
            out[c].push(x);
        }
        out
    }

    /// Class bitmasks (carrier of at most 64 points).
    pub fn class_masks(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.num_classes()];
        for (x, &c) in self.class_id.iter().enumerate() {
            out[c] |= 1 << x;
        }
        out
    }

    pub fn is_discrete(&self) -> bool {
        self.num_classes() == self.carrier_size()
    }

    pub fn is_indiscrete(&self) -> bool {
        self.num_classes() <= 1
    }

    /// Intersection of the two relations.
    pub fn meet(&self, other: &Partition) -> Result<Partition> {
        self.same_carrier(other)?;
        Ok(Partition::from_keys(
            self.class_id.iter().zip(&other.class_id),
        ))
    }

    /// Whether `self ⊆ other` as relations.
    pub fn refines(&self, other: &Partition) -> bool {
        self.carrier_size() == other.carrier_size()
            && self.class_masks().iter().all(|&m| {
                let x = m.trailing_zeros() as usize;
                (0..self.carrier_size()).all(|y| m >> y & 1 == 0 || other.related(x, y))
            })
    }

    fn same_carrier(&self, other: &Partition) -> Result<()> {
        if self.carrier_size() != other.carrier_size() {
            return Err(Error::CarrierMismatch {
                left: self.carrier_size(),
                right: other.carrier_size(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, class) in self.classes().iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{class:?}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_is_canonical() {
        let a = Partition::from_labels(&[7, 3, 7, 1]);
        let b = Partition::from_classes(4, &[vec![3], vec![1], vec![0, 2]]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.class_ids(), &[0, 1, 0, 2]);
        assert_eq!(a.classes(), vec![vec![0, 2], vec![1], vec![3]]);
    }

    #[test]
    fn rejects_bad_classes() {
        assert!(Partition::from_classes(3, &[vec![0, 1]]).is_err());
        assert!(Partition::from_classes(2, &[vec![0, 1], vec![1]]).is_err());
        assert!(Partition::from_classes(2, &[vec![0, 2]]).is_err());
    }

    #[test]
    fn relation_checks() {
        let p = Partition::from_relation(4, |x, y| x % 2 == y % 2).unwrap();
        assert_eq!(p.classes(), vec![vec![0, 2], vec![1, 3]]);
        let chain = Partition::from_relation(3, |x, y| x.abs_diff(y) <= 1);
        assert!(matches!(chain, Err(Error::NotTransitive { .. })));
        assert!(Partition::from_relation(2, |x, y| x <= y).is_err());
    }

    #[test]
    fn meet_and_refinement() {
        let a = Partition::from_labels(&[0, 0, 1, 1]);
        let b = Partition::from_labels(&[0, 1, 1, 1]);
        let m = a.meet(&b).unwrap();
        assert_eq!(m.classes(), vec![vec![0], vec![1], vec![2, 3]]);
        assert!(m.refines(&a) && m.refines(&b));
        assert!(!a.refines(&b));
        assert!(Partition::discrete(4).refines(&a));
        assert!(a.refines(&Partition::indiscrete(4)));
    }

    #[test]
    fn json_is_sorted_classes() {
        let p = Partition::from_labels(&[1, 0, 1]);
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(text, r#"{"classes":[[0,2],[1]]}"#);
        assert_eq!(serde_json::from_str::<Partition>(&text).unwrap(), p);
    }
}
