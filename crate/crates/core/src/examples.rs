//! Finite truncations of the monoid `C ⊔_π N₀` built from the Cantor cube
//! `C = {0,1}^k` under pointwise product and the action
//! `π(c, m) = c_{m+1} · m` on the labels `{0, .., k-1}`.
//!
//! Coordinates of `C` are 1-based. Carrier indices put the tuples first
//! (index = bitmask, bit `i` is coordinate `i + 1`) and the label `m` at
//! index `2^k + m`.

use num_traits::{One, Zero};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::finmon::{validate_monoid, FiniteMonoid, SelfMap, SelfMapMonoid};
use crate::ultra::{
    ball_submonoid_check, check_nonexpansive, Dist, ExpansionWitness, Side, UltraPseudometric,
};

/// Largest supported truncation level.
pub const MAX_K: usize = 16;

/// An element of the truncated monoid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ContrastElement {
    /// A 0/1 tuple; bit `i` is coordinate `i + 1`.
    Tuple(u64),
    /// A label in the `N₀` part.
    Label(usize),
}

/// The truncated monoid and its left-nonexpansive ultrametric.
#[derive(Debug, Clone)]
pub struct ContrastMonoid {
    k: usize,
    monoid: FiniteMonoid,
    metric: UltraPseudometric,
}

impl ContrastMonoid {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn monoid(&self) -> &FiniteMonoid {
        &self.monoid
    }

    pub fn metric(&self) -> &UltraPseudometric {
        &self.metric
    }

    pub fn carrier_size(&self) -> usize {
        (1 << self.k) + self.k
    }

    pub fn index(&self, e: ContrastElement) -> usize {
        match e {
            ContrastElement::Tuple(t) => t as usize,
            ContrastElement::Label(m) => (1 << self.k) + m,
        }
    }

    pub fn element(&self, i: usize) -> ContrastElement {
        let tuples = 1 << self.k;
        if i < tuples {
            ContrastElement::Tuple(i as u64)
        } else {
            ContrastElement::Label(i - tuples)
        }
    }

    /// The all-ones tuple.
    pub fn one(&self) -> ContrastElement {
        ContrastElement::Tuple((1 << self.k) - 1)
    }

    /// Coordinate `j` (1-based) of a tuple.
    pub fn coordinate(t: u64, j: usize) -> bool {
        t >> (j - 1) & 1 == 1
    }

    /// The product, defined casewise.
    pub fn product(k: usize, a: ContrastElement, b: ContrastElement) -> ContrastElement {
        debug_assert!(k >= 1);
        match (a, b) {
            (ContrastElement::Tuple(x), ContrastElement::Tuple(y)) => ContrastElement::Tuple(x & y),
            (ContrastElement::Tuple(x), ContrastElement::Label(m)) => {
                ContrastElement::Label(if Self::coordinate(x, m + 1) { m } else { 0 })
            }
            (ContrastElement::Label(m), _) => ContrastElement::Label(m),
        }
    }

    pub fn mul(&self, a: ContrastElement, b: ContrastElement) -> ContrastElement {
        Self::product(self.k, a, b)
    }

    /// SHA-256 of the multiplication table rows, hex encoded.
    pub fn table_digest(&self) -> String {
        let mut hasher = Sha256::new();
        for row in self.monoid.rows() {
            for v in row {
                hasher.update((v as u64).to_le_bytes());
            }
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// `ρ(s, t) = 1 / min{n : s_n ≠ t_n}` on tuples, 1 between any other
/// distinct points.
fn contrast_distance(k: usize, a: ContrastElement, b: ContrastElement) -> Dist {
    match (a, b) {
        _ if a == b => Dist::zero(),
        (ContrastElement::Tuple(x), ContrastElement::Tuple(y)) => {
            let first = (x ^ y).trailing_zeros() as i64 + 1;
            debug_assert!(first as usize <= k);
            Dist::new(1, first)
        }
        _ => Dist::one(),
    }
}

/// Builds the level-`k` truncation: table (validated) and metric.
pub fn build_contrast(k: usize) -> Result<ContrastMonoid> {
    if k == 0 || k > MAX_K {
        return Err(Error::ResourceLimit {
            requested: k as u128,
            limit: MAX_K as u128,
        });
    }
    let size = (1usize << k) + k;
    let decode = |i: usize| {
        if i < 1 << k {
            ContrastElement::Tuple(i as u64)
        } else {
            ContrastElement::Label(i - (1 << k))
        }
    };
    let encode = |e: ContrastElement| match e {
        ContrastElement::Tuple(t) => t as usize,
        ContrastElement::Label(m) => (1 << k) + m,
    };
    let rows = (0..size)
        .map(|a| {
            (0..size)
                .map(|b| encode(ContrastMonoid::product(k, decode(a), decode(b))))
                .collect()
        })
        .collect();
    let monoid = validate_monoid(rows, (1 << k) - 1)?;
    let metric =
        UltraPseudometric::from_fn(size, |a, b| contrast_distance(k, decode(a), decode(b)))?;
    Ok(ContrastMonoid { k, monoid, metric })
}

/// Outcome of the right-NA certificate for one truncation level.
#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub k: usize,
    pub carrier_size: usize,
    pub triples_checked: usize,
    pub left_nonexpansive: bool,
    pub left_witness: Option<ExpansionWitness>,
    /// Whether `s ↦ (x ↦ s x)` is an injective homomorphism into `Θ(S, d)`.
    pub translation_embedding: bool,
    /// Whether every open ball at the identity is a submonoid.
    pub identity_balls_submonoids: bool,
    pub right_nonexpansive: bool,
    pub right_witness: Option<ExpansionWitness>,
}

/// Checks left nonexpansiveness of `d`, the translation embedding into the
/// 1-Lipschitz maps, identity balls, and searches for a right-side
/// expansion witness.
pub fn rna_certificate(c: &ContrastMonoid) -> Result<CertificateReport> {
    let m = c.monoid();
    let d = c.metric();
    let n = m.size();
    let left_witness = check_nonexpansive(m, d, Side::Left)?;
    let right_witness = check_nonexpansive(m, d, Side::Right)?;

    let translations: Vec<SelfMap> = (0..n).map(|s| m.left_translation(s)).collect();
    let all_lipschitz = translations.iter().all(|t| d.is_lipschitz(t.values()));
    let embedding = all_lipschitz && {
        let image = SelfMapMonoid::generated_by(n, &translations, &Limits::default())?;
        let injective = {
            let mut sorted = translations.clone();
            sorted.sort();
            sorted.dedup();
            sorted.len() == n
        };
        let homomorphic = (0..n).all(|s| {
            (0..n).all(|t| translations[m.mul(s, t)] == translations[s].compose(&translations[t]))
        });
        injective && homomorphic && image.len() == n
    };

    let balls = left_witness.is_none()
        && d.values()
            .into_iter()
            .chain(std::iter::once(d.diameter() + Dist::one()))
            .filter(|r| *r > Dist::zero())
            .map(|r| ball_submonoid_check(m, d, r, Side::Left))
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .all(|ok| ok);

    Ok(CertificateReport {
        k: c.k(),
        carrier_size: n,
        triples_checked: n * n * n,
        left_nonexpansive: left_witness.is_none(),
        left_witness,
        translation_embedding: embedding,
        identity_balls_submonoids: balls,
        right_nonexpansive: right_witness.is_none(),
        right_witness,
    })
}

/// A pair `u ∈ U_j`, `n` a label, with `u ∘ n = 0` because the coordinate
/// of `u` read by `n` is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ObstructionWitness {
    pub j: usize,
    pub u: u64,
    pub n: usize,
}

/// `U_j`: tuples agreeing with the all-ones tuple on coordinates `1..=j`.
pub fn in_neighborhood(u: u64, j: usize) -> bool {
    (1..=j).all(|c| ContrastMonoid::coordinate(u, c))
}

/// Every witness for level `j`, in order of `(u, n)`.
pub fn obstruction_witnesses(c: &ContrastMonoid, j: usize) -> Vec<ObstructionWitness> {
    let k = c.k();
    (0..1u64 << k)
        .filter(|&u| in_neighborhood(u, j))
        .flat_map(|u| {
            (0..k)
                .filter(move |&n| !ContrastMonoid::coordinate(u, n + 1))
                .map(move |n| ObstructionWitness { j, u, n })
        })
        .collect()
}

/// The constructive witness: `u` is the all-ones tuple with coordinate `k`
/// zeroed and `n = k - 1`, verified by multiplying in the table.
pub fn obstruction_witness(c: &ContrastMonoid, j: usize) -> Result<ObstructionWitness> {
    let k = c.k();
    if j >= k {
        return Err(Error::NoWitness(format!(
            "U_{j} fixes all {k} coordinates, so no label is annihilated"
        )));
    }
    let u = ((1u64 << k) - 1) & !(1 << (k - 1));
    let w = ObstructionWitness { j, u, n: k - 1 };
    let product = c.monoid().mul(
        c.index(ContrastElement::Tuple(u)),
        c.index(ContrastElement::Label(w.n)),
    );
    if !in_neighborhood(u, j) || c.element(product) != ContrastElement::Label(0) {
        return Err(Error::NoWitness(format!("recipe failed at j = {j}")));
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn k1_table() {
        let c = build_contrast(1).unwrap();
        assert_eq!(c.carrier_size(), 3);
        // carrier: (0), (1) = identity, label 0
        assert_eq!(
            c.monoid().rows(),
            vec![vec![0, 0, 2], vec![0, 1, 2], vec![2, 2, 2]]
        );
        assert_eq!(c.monoid().identity(), 1);
    }

    #[test]
    fn metric_values() {
        let c = build_contrast(3).unwrap();
        // (1,0,1) has bits 1 and 3 set → mask 0b101; (1,1,1) = 0b111
        let a = c.index(ContrastElement::Tuple(0b101));
        let b = c.index(ContrastElement::Tuple(0b111));
        assert_eq!(c.metric().get(a, b), Ratio::new(1, 2));
        for t in 0..8 {
            for m in 0..3 {
                let x = c.index(ContrastElement::Tuple(t));
                let y = c.index(ContrastElement::Label(m));
                assert_eq!(c.metric().get(x, y), Dist::one());
            }
        }
    }

    #[test]
    fn label_zero_is_a_sink_not_the_identity() {
        let c = build_contrast(2).unwrap();
        let zero = c.index(ContrastElement::Label(0));
        assert_ne!(zero, c.monoid().identity());
        for s in 0..c.carrier_size() {
            assert_eq!(c.monoid().mul(zero, s), zero);
        }
        // tuples send label 0 to label 0; other labels absorb from the left
        for t in 0..4 {
            assert_eq!(c.monoid().mul(t, zero), zero);
        }
        let one = c.index(ContrastElement::Label(1));
        assert_eq!(c.monoid().mul(one, zero), one);
    }

    #[test]
    fn certificates() {
        let k1 = rna_certificate(&build_contrast(1).unwrap()).unwrap();
        assert!(k1.left_nonexpansive && k1.translation_embedding && k1.identity_balls_submonoids);
        assert!(k1.right_nonexpansive);
        let k3 = rna_certificate(&build_contrast(3).unwrap()).unwrap();
        assert_eq!(k3.triples_checked, 1331);
        assert!(k3.left_nonexpansive && k3.translation_embedding);
        let w = k3.right_witness.expect("right side expands");
        let c = build_contrast(3).unwrap();
        let d = c.metric();
        let m = c.monoid();
        assert!(d.get(m.mul(w.x, w.s), m.mul(w.y, w.s)) > d.get(w.x, w.y));
    }

    #[test]
    fn witnesses() {
        let c = build_contrast(2).unwrap();
        let all = obstruction_witnesses(&c, 0);
        // (0,1) with label 0 and (1,0) with label 1 are among them
        assert!(all.contains(&ObstructionWitness {
            j: 0,
            u: 0b10,
            n: 0
        }));
        assert!(all.contains(&ObstructionWitness {
            j: 0,
            u: 0b01,
            n: 1
        }));
        let w = obstruction_witness(&c, 0).unwrap();
        assert_eq!(
            w,
            ObstructionWitness {
                j: 0,
                u: 0b01,
                n: 1
            }
        );

        let c4 = build_contrast(4).unwrap();
        let w = obstruction_witness(&c4, 2).unwrap();
        assert_eq!(w.u, 0b0111);
        assert_eq!(w.n, 3);
        assert!(matches!(
            obstruction_witness(&c4, 4),
            Err(Error::NoWitness(_))
        ));
        assert!(obstruction_witnesses(&c4, 4).is_empty());
    }

    #[test]
    fn rejects_bad_levels() {
        assert!(build_contrast(0).is_err());
        assert!(build_contrast(MAX_K + 1).is_err());
    }
}
