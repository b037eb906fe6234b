use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::partition::Partition;
use crate::error::{Error, Result};

/// Exact distance value.
pub type Dist = Ratio<i64>;

/// `2^-level`.
pub fn dyadic(level: usize) -> Dist {
    assert!(level < 63, "dyadic level {level} overflows");
    Ratio::new(1, 1i64 << level)
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_dist(s: &str) -> Result<Dist> {
    let s = s.trim();
    let parse = |t: &str| {
        t.trim()
            .parse::<i64>()
            .map_err(|_| Error::Parse(format!("bad rational {s:?}")))
    };
    let value = match s.split_once('/') {
        Some((p, q)) => {
            let q = parse(q)?;
            if q == 0 {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ratio::new(parse(p)?, q)
        }
        None => Ratio::from_integer(parse(s)?),
    };
    Ok(value)
}

pub fn format_dist(d: &Dist) -> String {
    if d.is_integer() {
        d.numer().to_string()
    } else {
        format!("{}/{}", d.numer(), d.denom())
    }
}

/// A finite ultra-pseudometric with exact rational values.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MetricJson", into = "MetricJson")]
pub struct UltraPseudometric {
    n: usize,
    dist: Vec<Dist>,
}

#[derive(Serialize, Deserialize)]
struct MetricJson {
    dist: Vec<Vec<String>>,
}

impl TryFrom<MetricJson> for UltraPseudometric {
    type Error = Error;

    fn try_from(raw: MetricJson) -> Result<Self> {
        let rows = raw
            .dist
            .iter()
            .map(|row| row.iter().map(|s| parse_dist(s)).collect())
            .collect::<Result<Vec<Vec<Dist>>>>()?;
        UltraPseudometric::from_rows(rows)
    }
}

impl From<UltraPseudometric> for MetricJson {
    fn from(d: UltraPseudometric) -> Self {
        MetricJson {
            dist: d
                .dist
                .chunks(d.n)
                .map(|row| row.iter().map(format_dist).collect())
                .collect(),
        }
    }
}

impl UltraPseudometric {
    pub fn from_rows(rows: Vec<Vec<Dist>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyInput("metric on an empty carrier"));
        }
        let mut dist = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            dist.extend(row);
        }
        let d = UltraPseudometric { n, dist };
        d.validate()?;
        Ok(d)
    }

    /// Builds from a distance function, then validates.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Dist) -> Result<Self> {
        UltraPseudometric::from_rows((0..n).map(|x| (0..n).map(|y| f(x, y)).collect()).collect())
    }

    /// The 0/1 metric.
    pub fn discrete(n: usize) -> Self {
        UltraPseudometric {
            n,
            dist: (0..n * n)
                .map(|i| {
                    if i / n == i % n {
                        Dist::zero()
                    } else {
                        Dist::one()
                    }
                })
                .collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        for x in 0..n {
            if !self.get(x, x).is_zero() {
                return Err(Error::InvalidMetric(format!("d({x},{x}) is not zero")));
            }
            for y in 0..n {
                let dxy = self.get(x, y);
                if dxy < Dist::zero() {
                    return Err(Error::InvalidMetric(format!("d({x},{y}) is negative")));
                }
                if dxy != self.get(y, x) {
                    return Err(Error::InvalidMetric(format!("d({x},{y}) ≠ d({y},{x})")));
                }
            }
        }
        if let Some((x, y, z)) = self.strong_triangle_violation() {
            return Err(Error::InvalidMetric(format!(
                "d({x},{z}) > max(d({x},{y}), d({y},{z}))"
            )));
        }
        Ok(())
    }

    /// First triple breaking `d(x,z) ≤ max(d(x,y), d(y,z))`, if any.
    pub fn strong_triangle_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.n;
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if self.get(x, z) > self.get(x, y).max(self.get(y, z)) {
                        return Some((x, y, z));
                    }
                }
            }
        }
        None
    }

    pub fn carrier_size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Dist {
        self.dist[x * self.n + y]
    }

    pub fn rows(&self) -> Vec<Vec<Dist>> {
        self.dist.chunks(self.n).map(<[Dist]>::to_vec).collect()
    }

    pub fn diameter(&self) -> Dist {
        self.dist.iter().copied().max().unwrap_or_else(Dist::zero)
    }

    /// Distinct values, ascending.
    pub fn values(&self) -> Vec<Dist> {
        let mut v = self.dist.clone();
        v.sort();
        v.dedup();
        v
    }

    /// `min(d, cap)`, again an ultra-pseudometric.
    pub fn truncate(&self, cap: Dist) -> UltraPseudometric {
        UltraPseudometric {
            n: self.n,
            dist: self.dist.iter().map(|&d| d.min(cap)).collect(),
        }
    }

    /// Open ball `{x : d(center, x) < r}`.
    pub fn ball(&self, center: usize, r: Dist) -> Vec<usize> {
        (0..self.n).filter(|&x| self.get(center, x) < r).collect()
    }

    /// The partition into open balls of radius `r > 0`.
    pub fn ball_partition(&self, r: Dist) -> Result<Partition> {
        if r <= Dist::zero() {
            return Err(Error::Config("ball radius must be positive".into()));
        }
        Partition::from_relation(self.n, |x, y| self.get(x, y) < r)
    }

    /// Whether `f` does not increase any distance.
    pub fn is_lipschitz(&self, f: &[usize]) -> bool {
        self.lipschitz_violation(f).is_none()
    }

    pub fn lipschitz_violation(&self, f: &[usize]) -> Option<(usize, usize)> {
        (0..self.n)
            .flat_map(|x| (x + 1..self.n).map(move |y| (x, y)))
            .find(|&(x, y)| self.get(f[x], f[y]) > self.get(x, y))
    }
}

impl fmt::Display for UltraPseudometric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.dist.chunks(self.n) {
            let cells: Vec<String> = row.iter().map(format_dist).collect();
            writeln!(f, "{}", cells.join("\t"))?;
        }
        Ok(())
    }
}

/// A finite descending chain `σ₁ ⊇ σ₂ ⊇ …` of equivalence relations. The
/// level `σ₀` is the full relation and is implicit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ChainJson", into = "ChainJson")]
pub struct MonotoneChain {
    carrier_size: usize,
    levels: Vec<Partition>,
}

#[derive(Serialize, Deserialize)]
struct ChainJson {
    carrier_size: usize,
    chain: Vec<Partition>,
}

impl TryFrom<ChainJson> for MonotoneChain {
    type Error = Error;

    fn try_from(raw: ChainJson) -> Result<Self> {
        MonotoneChain::new(raw.carrier_size, raw.chain)
    }
}

impl From<MonotoneChain> for ChainJson {
    fn from(c: MonotoneChain) -> Self {
        ChainJson {
            carrier_size: c.carrier_size,
            chain: c.levels,
        }
    }
}

impl MonotoneChain {
    pub fn new(carrier_size: usize, levels: Vec<Partition>) -> Result<Self> {
        if let Some(bad) = levels.iter().find(|p| p.carrier_size() != carrier_size) {
            return Err(Error::CarrierMismatch {
                left: carrier_size,
                right: bad.carrier_size(),
            });
        }
        if levels.len() > 61 {
            return Err(Error::Config("chains longer than 61 levels".into()));
        }
        // levels are 1-based; σ₀ is the full relation and refines nothing
        for (i, pair) in levels.windows(2).enumerate() {
            if !pair[1].refines(&pair[0]) {
                return Err(Error::ChainNotMonotone { level: i + 2 });
            }
        }
        Ok(MonotoneChain {
            carrier_size,
            levels,
        })
    }

    pub fn carrier_size(&self) -> usize {
        self.carrier_size
    }

    pub fn levels(&self) -> &[Partition] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// `σ_n`, with `σ₀` the full relation and every level past the end the
    /// equality relation.
    pub fn related_at(&self, level: usize, x: usize, y: usize) -> bool {
        match level {
            0 => true,
            l if l <= self.levels.len() => self.levels[l - 1].related(x, y),
            _ => x == y,
        }
    }

    /// Largest `n` with `(x, y) ∈ σ_n`, or `None` when `x = y`.
    fn depth(&self, x: usize, y: usize) -> Option<usize> {
        if x == y {
            return None;
        }
        Some(self.levels.iter().take_while(|p| p.related(x, y)).count())
    }
}

/// The ultra-pseudometric of a chain: `d(x, y) = 2^-n` for the deepest
/// level `n` relating `x` and `y`, and `0` on the diagonal.
pub fn d_from_chain(chain: &MonotoneChain) -> UltraPseudometric {
    let n = chain.carrier_size();
    let dist = (0..n * n)
        .map(|i| match chain.depth(i / n, i % n) {
            None => Dist::zero(),
            Some(level) => dyadic(level),
        })
        .collect();
    UltraPseudometric { n, dist }
}

/// Pointwise `max_i min(d_i, cap)`.
pub fn sup_combine(metrics: &[UltraPseudometric], cap: Dist) -> Result<UltraPseudometric> {
    let first = metrics
        .first()
        .ok_or(Error::EmptyInput("no metrics to combine"))?;
    let n = first.carrier_size();
    if let Some(bad) = metrics.iter().find(|d| d.carrier_size() != n) {
        return Err(Error::CarrierMismatch {
            left: n,
            right: bad.carrier_size(),
        });
    }
    let dist = (0..n * n)
        .map(|i| {
            metrics
                .iter()
                .map(|d| d.dist[i].min(cap))
                .max()
                .expect("nonempty")
        })
        .collect();
    Ok(UltraPseudometric { n, dist })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Dist {
        Ratio::new(p, q)
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_dist("1/2").unwrap(), r(1, 2));
        assert_eq!(parse_dist(" 3 ").unwrap(), r(3, 1));
        assert_eq!(parse_dist("2/4").unwrap(), r(1, 2));
        assert!(parse_dist("1/0").is_err());
        assert!(parse_dist("x").is_err());
        assert_eq!(format_dist(&r(1, 4)), "1/4");
        assert_eq!(format_dist(&r(0, 1)), "0");
    }

    #[test]
    fn rejects_non_ultrametric() {
        // 0-1-2 on a line: d(0,2) = 2 > max(1, 1)
        let rows = vec![
            vec![r(0, 1), r(1, 1), r(2, 1)],
            vec![r(1, 1), r(0, 1), r(1, 1)],
            vec![r(2, 1), r(1, 1), r(0, 1)],
        ];
        assert!(matches!(
            UltraPseudometric::from_rows(rows),
            Err(Error::InvalidMetric(_))
        ));
        assert!(UltraPseudometric::from_rows(vec![vec![r(1, 1)]]).is_err());
    }

    #[test]
    fn empty_chain_is_discrete_metric() {
        let chain = MonotoneChain::new(3, vec![]).unwrap();
        assert_eq!(d_from_chain(&chain), UltraPseudometric::discrete(3));
    }

    #[test]
    fn one_level_chain() {
        let sigma = Partition::from_labels(&[0, 0, 1]);
        let d = d_from_chain(&MonotoneChain::new(3, vec![sigma]).unwrap());
        assert_eq!(d.get(0, 1), r(1, 2));
        assert_eq!(d.get(0, 2), r(1, 1));
        assert_eq!(d.get(1, 2), r(1, 1));
        assert!(d.strong_triangle_violation().is_none());
    }

    #[test]
    fn chain_must_be_monotone() {
        let a = Partition::from_labels(&[0, 0, 1]);
        let b = Partition::from_labels(&[0, 1, 1]);
        assert_eq!(
            MonotoneChain::new(3, vec![a, b]),
            Err(Error::ChainNotMonotone { level: 2 })
        );
    }

    #[test]
    fn sup_combine_examples() {
        let chain = MonotoneChain::new(3, vec![Partition::from_labels(&[0, 0, 1])]).unwrap();
        let d = d_from_chain(&chain);
        assert_eq!(sup_combine(std::slice::from_ref(&d), r(2, 1)).unwrap(), d);

        // two 0/1 metrics: max is the OR of the "distinct" relations
        let a = UltraPseudometric::from_fn(3, |x, y| {
            if (x == 2) != (y == 2) {
                r(1, 1)
            } else {
                r(0, 1)
            }
        })
        .unwrap();
        let b = UltraPseudometric::from_fn(3, |x, y| {
            if (x == 0) != (y == 0) {
                r(1, 1)
            } else {
                r(0, 1)
            }
        })
        .unwrap();
        let c = sup_combine(&[a.clone(), b.clone()], r(1, 1)).unwrap();
        for x in 0..3 {
            for y in 0..3 {
                let either = a.get(x, y) == r(1, 1) || b.get(x, y) == r(1, 1);
                assert_eq!(c.get(x, y) == r(1, 1), either);
            }
        }
        assert!(matches!(
            sup_combine(&[a, UltraPseudometric::discrete(2)], r(1, 1)),
            Err(Error::CarrierMismatch { .. })
        ));
        assert!(sup_combine(&[], r(1, 1)).is_err());
    }

    #[test]
    fn balls_and_lipschitz() {
        let d =
            d_from_chain(&MonotoneChain::new(3, vec![Partition::from_labels(&[0, 0, 1])]).unwrap());
        assert_eq!(d.ball(0, r(1, 1)), vec![0, 1]);
        assert_eq!(d.ball(0, r(1, 2)), vec![0]);
        assert_eq!(
            d.ball_partition(r(3, 4)).unwrap().classes(),
            vec![vec![0, 1], vec![2]]
        );
        assert!(d.is_lipschitz(&[1, 0, 2]));
        assert!(!d.is_lipschitz(&[0, 2, 2]));
    }

    #[test]
    fn json_schema() {
        let d = UltraPseudometric::discrete(2).truncate(r(1, 2));
        let text = serde_json::to_string(&d).unwrap();
        assert_eq!(text, r#"{"dist":[["0","1/2"],["1/2","0"]]}"#);
        assert_eq!(serde_json::from_str::<UltraPseudometric>(&text).unwrap(), d);
        let chain = MonotoneChain::new(2, vec![Partition::indiscrete(2)]).unwrap();
        let text = serde_json::to_string(&chain).unwrap();
        assert_eq!(text, r#"{"carrier_size":2,"chain":[{"classes":[[0,1]]}]}"#);
        assert_eq!(serde_json::from_str::<MonotoneChain>(&text).unwrap(), chain);
    }
}
