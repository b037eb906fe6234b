//! The free vector space over a finite ultrametric space with coefficients
//! in the two-element trivially valued field, and its Kantorovich
//! ultra-norm.
//!
//! A vector is its support. The space `M` is extended by a base point `0̄`
//! at distance 1 from every point; `0̄` is the zero vector.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::finmon::SelfMap;
use crate::ultra::{Dist, UltraPseudometric};

/// Points of `M` usable as vector coordinates.
pub const MAX_POINTS: usize = 63;

/// `(M, d)` together with its normalization `min(d, 1)` on `M ∪ {0̄}`.
#[derive(Debug, Clone)]
pub struct NaSpace {
    metric: UltraPseudometric,
    normalized: UltraPseudometric,
}

/// An endpoint in a representation `v = Σ (x_i − y_i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Endpoint {
    Point(usize),
    Zero,
}

impl Serialize for Endpoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Endpoint::Point(x) => s.serialize_u64(*x as u64),
            Endpoint::Zero => s.serialize_str("zero"),
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Point(x) => write!(f, "{x}"),
            Endpoint::Zero => write!(f, "0̄"),
        }
    }
}

/// A vector of the free space, i.e. a finite subset of `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FreeVector {
    support: u64,
}

impl FreeVector {
    pub const ZERO: FreeVector = FreeVector { support: 0 };

    pub fn from_mask(support: u64) -> Self {
        FreeVector { support }
    }

    pub fn from_points(points: &[usize]) -> Self {
        FreeVector {
            support: points.iter().fold(0, |acc, &x| acc ^ 1 << x),
        }
    }

    pub fn support(&self) -> u64 {
        self.support
    }

    pub fn points(&self) -> Vec<usize> {
        (0..64).filter(|&x| self.support >> x & 1 == 1).collect()
    }

    pub fn len(&self) -> usize {
        self.support.count_ones() as usize
    }

    pub fn is_zero(&self) -> bool {
        self.support == 0
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }
}

impl std::ops::Add for FreeVector {
    type Output = FreeVector;

    // coefficients live in the two-element field, so sums cancel pairwise
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: FreeVector) -> FreeVector {
        FreeVector {
            support: self.support ^ rhs.support,
        }
    }
}

/// Norm of a vector with a pairing realizing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormWitness {
    #[serde(serialize_with = "serialize_dist")]
    pub norm: Dist,
    pub pairing: Vec<(Endpoint, Endpoint)>,
}

fn serialize_dist<S: Serializer>(d: &Dist, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::ultra::format_dist(d))
}

impl NaSpace {
    pub fn new(metric: UltraPseudometric) -> Result<Self> {
        if metric.carrier_size() > MAX_POINTS {
            return Err(Error::ResourceLimit {
                requested: metric.carrier_size() as u128,
                limit: MAX_POINTS as u128,
            });
        }
        let normalized = metric.truncate(Dist::one());
        Ok(NaSpace { metric, normalized })
    }

    pub fn points(&self) -> usize {
        self.metric.carrier_size()
    }

    pub fn metric(&self) -> &UltraPseudometric {
        &self.metric
    }

    /// The normalized distance on `M ∪ {0̄}`.
    pub fn distance(&self, a: Endpoint, b: Endpoint) -> Dist {
        match (a, b) {
            (Endpoint::Zero, Endpoint::Zero) => Dist::zero(),
            (Endpoint::Zero, _) | (_, Endpoint::Zero) => Dist::one(),
            (Endpoint::Point(x), Endpoint::Point(y)) => self.normalized.get(x, y),
        }
    }

    fn check_vector(&self, v: &FreeVector) -> Result<()> {
        let n = self.points();
        if n < 64 && v.support >> n != 0 {
            return Err(Error::OutOfRange {
                index: 63 - v.support.leading_zeros() as usize,
                size: n,
            });
        }
        Ok(())
    }

    /// `‖v‖`: the least achievable maximum pair distance over perfect
    /// pairings of the support, padded with `0̄` when its size is odd.
    pub fn kantorovich_norm(&self, v: &FreeVector, limits: &Limits) -> Result<NormWitness> {
        self.check_vector(v)?;
        if v.len() > limits.max_support {
            return Err(Error::ResourceLimit {
                requested: v.len() as u128,
                limit: limits.max_support as u128,
            });
        }
        let mut endpoints: Vec<Endpoint> = v.points().into_iter().map(Endpoint::Point).collect();
        if endpoints.len() % 2 == 1 {
            endpoints.push(Endpoint::Zero);
        }
        let mut search = PairingSearch {
            space: self,
            best: None,
            current: Vec::new(),
        };
        search.run(&mut endpoints, Dist::zero());
        Ok(search.best.unwrap_or(NormWitness {
            norm: Dist::zero(),
            pairing: Vec::new(),
        }))
    }

    /// The linear extension `f̄` of a 1-Lipschitz `f`, with `f̄(0̄) = 0̄`.
    /// Images that collide cancel.
    pub fn lipschitz_linear_extend(&self, f: &SelfMap, v: &FreeVector) -> Result<FreeVector> {
        if f.carrier_size() != self.points() {
            return Err(Error::DimensionMismatch {
                expected: self.points(),
                got: f.carrier_size(),
            });
        }
        if let Some((x, y)) = self.metric.lipschitz_violation(f.values()) {
            return Err(Error::NotLipschitz { x, y });
        }
        self.check_vector(v)?;
        Ok(FreeVector {
            support: v
                .points()
                .into_iter()
                .fold(0, |acc, x| acc ^ 1 << f.apply(x)),
        })
    }
}

struct PairingSearch<'a> {
    space: &'a NaSpace,
    best: Option<NormWitness>,
    current: Vec<(Endpoint, Endpoint)>,
}

impl PairingSearch<'_> {
    fn run(&mut self, remaining: &mut Vec<Endpoint>, cost: Dist) {
        if let Some(best) = &self.best {
            if cost >= best.norm {
                return;
            }
        }
        if remaining.is_empty() {
            self.best = Some(NormWitness {
                norm: cost,
                pairing: self.current.clone(),
            });
            return;
        }
        // pair the first endpoint with each of the others
        let first = remaining.remove(0);
        for i in 0..remaining.len() {
            let partner = remaining.remove(i);
            let edge = self.space.distance(first, partner);
            self.current.push((first, partner));
            self.run(remaining, cost.max(edge));
            self.current.pop();
            remaining.insert(i, partner);
        }
        remaining.insert(0, first);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ultra::{d_from_chain, enumerate_theta, MonotoneChain, Partition};
    use num_rational::Ratio;

    fn r(p: i64, q: i64) -> Dist {
        Ratio::new(p, q)
    }

    fn space() -> NaSpace {
        // {0,1} close, {2} apart, 3 on its own at distance 1
        let chain = MonotoneChain::new(4, vec![Partition::from_labels(&[0, 0, 1, 2])]).unwrap();
        NaSpace::new(d_from_chain(&chain)).unwrap()
    }

    /// Minimum over every set of distinct edges on `M ∪ {0̄}` whose odd-degree
    /// points in `M` are exactly the support. Independent of the pairing
    /// search and not restricted to pairings.
    fn edge_subset_norm(space: &NaSpace, v: &FreeVector) -> Dist {
        let n = space.points();
        let ends: Vec<Endpoint> = (0..n)
            .map(Endpoint::Point)
            .chain(std::iter::once(Endpoint::Zero))
            .collect();
        let edges: Vec<(usize, usize)> = (0..=n)
            .flat_map(|a| (a + 1..=n).map(move |b| (a, b)))
            .collect();
        let mut best: Option<Dist> = None;
        for subset in 0u32..1 << edges.len() {
            let mut odd = 0u64;
            let mut cost = Dist::zero();
            for (k, &(a, b)) in edges.iter().enumerate() {
                if subset >> k & 1 == 1 {
                    odd ^= 1 << a | 1 << b;
                    cost = cost.max(space.distance(ends[a], ends[b]));
                }
            }
            if odd & ((1 << n) - 1) == v.support() && best.is_none_or(|b| cost < b) {
                best = Some(cost);
            }
        }
        best.expect("some representation exists")
    }

    #[test]
    fn norm_of_zero_and_singletons() {
        let s = space();
        let limits = Limits::default();
        assert_eq!(
            s.kantorovich_norm(&FreeVector::ZERO, &limits).unwrap().norm,
            r(0, 1)
        );
        for x in 0..4 {
            let w = s
                .kantorovich_norm(&FreeVector::from_points(&[x]), &limits)
                .unwrap();
            assert_eq!(w.norm, r(1, 1));
            assert_eq!(w.pairing, vec![(Endpoint::Point(x), Endpoint::Zero)]);
        }
    }

    #[test]
    fn pair_norm_extends_metric() {
        let s = space();
        let limits = Limits::default();
        for x in 0..4 {
            for y in x + 1..4 {
                let v = FreeVector::from_points(&[x, y]);
                assert_eq!(
                    s.kantorovich_norm(&v, &limits).unwrap().norm,
                    s.metric().get(x, y)
                );
            }
        }
        assert_eq!(
            s.kantorovich_norm(&FreeVector::from_points(&[0, 1]), &limits)
                .unwrap()
                .norm,
            r(1, 2)
        );
    }

    #[test]
    fn pairing_matches_edge_subset_oracle() {
        let s = space();
        let limits = Limits::default();
        for mask in 0..16 {
            let v = FreeVector::from_mask(mask);
            assert_eq!(
                s.kantorovich_norm(&v, &limits).unwrap().norm,
                edge_subset_norm(&s, &v),
                "support {mask:04b}"
            );
        }
    }

    #[test]
    fn norm_is_ultra() {
        let s = space();
        let limits = Limits::default();
        let norm = |v| {
            s.kantorovich_norm(&FreeVector::from_mask(v), &limits)
                .unwrap()
                .norm
        };
        for u in 0..16 {
            for v in 0..16 {
                assert!(norm(u ^ v) <= norm(u).max(norm(v)));
            }
        }
    }

    #[test]
    fn metric_is_normalized() {
        let big = UltraPseudometric::discrete(2).truncate(r(5, 1));
        let wide =
            UltraPseudometric::from_rows(vec![vec![r(0, 1), r(3, 1)], vec![r(3, 1), r(0, 1)]])
                .unwrap();
        let s = NaSpace::new(wide).unwrap();
        let v = FreeVector::from_points(&[0, 1]);
        assert_eq!(
            s.kantorovich_norm(&v, &Limits::default()).unwrap().norm,
            r(1, 1)
        );
        assert_eq!(big, UltraPseudometric::discrete(2));
    }

    #[test]
    fn support_limit() {
        let s = NaSpace::new(UltraPseudometric::discrete(10)).unwrap();
        let v = FreeVector::from_mask(0b11_1111_1111);
        assert!(matches!(
            s.kantorovich_norm(&v, &Limits::default()),
            Err(Error::ResourceLimit { .. })
        ));
        let bad = FreeVector::from_mask(1 << 12);
        assert!(s.kantorovich_norm(&bad, &Limits::default()).is_err());
    }

    #[test]
    fn linear_extension_examples() {
        let s = space();
        let v = FreeVector::from_points(&[0, 2]);
        assert_eq!(
            s.lipschitz_linear_extend(&SelfMap::identity(4), &v)
                .unwrap(),
            v
        );
        let c = SelfMap::constant(4, 3);
        assert_eq!(s.lipschitz_linear_extend(&c, &v).unwrap(), FreeVector::ZERO);
        let tear = SelfMap::new(vec![0, 2, 2, 3]).unwrap();
        assert_eq!(
            s.lipschitz_linear_extend(&tear, &v),
            Err(Error::NotLipschitz { x: 0, y: 1 })
        );
    }

    #[test]
    fn extension_does_not_increase_norm() {
        let s = space();
        let limits = Limits::default();
        let theta = enumerate_theta(s.metric(), &limits).unwrap();
        for f in theta.elements() {
            for mask in 0..16 {
                let v = FreeVector::from_mask(mask);
                let image = s.lipschitz_linear_extend(f, &v).unwrap();
                assert!(
                    s.kantorovich_norm(&image, &limits).unwrap().norm
                        <= s.kantorovich_norm(&v, &limits).unwrap().norm
                );
            }
        }
    }

    #[test]
    fn extension_respects_composition() {
        let s = space();
        let theta = enumerate_theta(s.metric(), &Limits::default()).unwrap();
        for f in theta.elements() {
            for g in theta.elements() {
                for mask in 0..16 {
                    let v = FreeVector::from_mask(mask);
                    let lhs = s.lipschitz_linear_extend(&f.compose(g), &v).unwrap();
                    let rhs = s
                        .lipschitz_linear_extend(f, &s.lipschitz_linear_extend(g, &v).unwrap())
                        .unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}
