//! Partitions, ultra-pseudometrics and their interaction with monoid
//! structure: nonexpansive metrics, ball submonoids, left congruences and
//! the monoid `Θ(M, d)` of 1-Lipschitz self-maps.

mod metric;
mod partition;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use metric::{
    d_from_chain, dyadic, format_dist, parse_dist, sup_combine, Dist, MonotoneChain,
    UltraPseudometric,
};
pub use partition::Partition;

use crate::config::{saturating_pow, Limits};
use crate::error::{Error, Result};
use crate::finmon::{FiniteMonoid, SelfMap, SelfMapMonoid};

/// Which translations a metric is tested against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `d(s x, s y) ≤ d(x, y)`
    Left,
    /// `d(x s, y s) ≤ d(x, y)`
    Right,
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            other => Err(Error::Parse(format!(
                "side must be left or right, got {other:?}"
            ))),
        }
    }
}

/// A translation `s` that increases `d(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionWitness {
    pub side: Side,
    pub s: usize,
    pub x: usize,
    pub y: usize,
}

fn same_carrier(m: &FiniteMonoid, d: &UltraPseudometric) -> Result<()> {
    if m.size() != d.carrier_size() {
        return Err(Error::CarrierMismatch {
            left: m.size(),
            right: d.carrier_size(),
        });
    }
    Ok(())
}

#[inline]
fn translate(m: &FiniteMonoid, side: Side, s: usize, x: usize) -> usize {
    match side {
        Side::Left => m.mul(s, x),
        Side::Right => m.mul(x, s),
    }
}

/// Searches `(s, x, y)` in lexicographic order for a translation that
/// increases the distance. `None` means the metric is nonexpansive.
pub fn check_nonexpansive(
    m: &FiniteMonoid,
    d: &UltraPseudometric,
    side: Side,
) -> Result<Option<ExpansionWitness>> {
    same_carrier(m, d)?;
    let n = m.size();
    for s in 0..n {
        for x in 0..n {
            let sx = translate(m, side, s, x);
            for y in x + 1..n {
                if d.get(sx, translate(m, side, s, y)) > d.get(x, y) {
                    return Ok(Some(ExpansionWitness { side, s, x, y }));
                }
            }
        }
    }
    Ok(None)
}

/// Whether the open ball `B(e, r)` is a submonoid, after confirming that
/// `d` is nonexpansive on `side`.
pub fn ball_submonoid_check(
    m: &FiniteMonoid,
    d: &UltraPseudometric,
    r: Dist,
    side: Side,
) -> Result<bool> {
    if let Some(w) = check_nonexpansive(m, d, side)? {
        return Err(Error::PreconditionUnverified(format!(
            "metric is not {side:?}-nonexpansive: witness {w:?}"
        )));
    }
    Ok(m.is_submonoid(&d.ball(m.identity(), r)))
}

/// `x ~ y ⇒ s x ~ s y` for every `s`.
pub fn check_left_congruence(m: &FiniteMonoid, p: &Partition) -> bool {
    check_congruence(m, p, Side::Left)
}

/// `x ~ y ⇒ x s ~ y s` for every `s`.
pub fn check_right_congruence(m: &FiniteMonoid, p: &Partition) -> bool {
    check_congruence(m, p, Side::Right)
}

fn check_congruence(m: &FiniteMonoid, p: &Partition, side: Side) -> bool {
    let n = m.size();
    p.carrier_size() == n
        && (0..n).all(|x| {
            (x + 1..n).all(|y| {
                !p.related(x, y)
                    || (0..n).all(|s| p.related(translate(m, side, s, x), translate(m, side, s, y)))
            })
        })
}

/// The least left (or right) congruence containing `p`.
pub fn congruence_closure(m: &FiniteMonoid, p: &Partition, side: Side) -> Result<Partition> {
    let n = m.size();
    if p.carrier_size() != n {
        return Err(Error::CarrierMismatch {
            left: n,
            right: p.carrier_size(),
        });
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for class in p.classes() {
        for w in class.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a] = b;
        }
    }
    loop {
        let mut changed = false;
        for x in 0..n {
            for y in x + 1..n {
                if find(&mut parent, x) != find(&mut parent, y) {
                    continue;
                }
                for s in 0..n {
                    let a = find(&mut parent, translate(m, side, s, x));
                    let b = find(&mut parent, translate(m, side, s, y));
                    if a != b {
                        parent[a] = b;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let roots: Vec<usize> = (0..n).map(|x| find(&mut parent, x)).collect();
    Ok(Partition::from_labels(&roots))
}

/// All 1-Lipschitz self-maps of `(M, d)` in lexicographic order.
pub fn enumerate_theta(d: &UltraPseudometric, limits: &Limits) -> Result<SelfMapMonoid> {
    let n = d.carrier_size();
    limits.check(saturating_pow(n as u128, n as u32))?;
    let mut found = BTreeSet::new();
    let mut values = vec![0usize; n];
    extend_lipschitz(d, &mut values, 0, &mut found);
    Ok(SelfMapMonoid::new(n, found).expect("1-Lipschitz maps form a monoid"))
}

fn extend_lipschitz(
    d: &UltraPseudometric,
    values: &mut [usize],
    next: usize,
    found: &mut BTreeSet<SelfMap>,
) {
    let n = values.len();
    if next == n {
        found.insert(SelfMap::new(values.to_vec()).expect("values in range"));
        return;
    }
    for v in 0..n {
        if (0..next).all(|x| d.get(values[x], v) <= d.get(x, next)) {
            values[next] = v;
            extend_lipschitz(d, values, next + 1, found);
        }
    }
}

/// The relation `ε_A = {(f₁, f₂) : d(f₁ a, f₂ a) < eps for all a ∈ A}` on
/// the elements of `theta`, returned as a partition after checking that it
/// is an equivalence relation.
pub fn epsilon_a_relation(
    theta: &SelfMapMonoid,
    d: &UltraPseudometric,
    a: &[usize],
    eps: Dist,
) -> Result<Partition> {
    if a.is_empty() {
        return Err(Error::EmptyInput("ε_A needs a nonempty point set"));
    }
    if eps <= Dist::from_integer(0) {
        return Err(Error::Config("ε_A needs a positive radius".into()));
    }
    if theta.carrier_size() != d.carrier_size() {
        return Err(Error::CarrierMismatch {
            left: theta.carrier_size(),
            right: d.carrier_size(),
        });
    }
    if let Some(&p) = a.iter().find(|&&p| p >= d.carrier_size()) {
        return Err(Error::OutOfRange {
            index: p,
            size: d.carrier_size(),
        });
    }
    let maps = theta.elements();
    Partition::from_relation(maps.len(), |i, j| {
        a.iter()
            .all(|&p| d.get(maps[i].apply(p), maps[j].apply(p)) < eps)
    })
}
