//! The full verification suite: every exhaustive check at configurable
//! sizes, reported in a fixed order.

use std::collections::BTreeSet;
use std::time::Instant;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::boolring::{
    enumerate_group_endos, enumerate_ring_endos, pontryagin_dual, ring_homs_to_z2, BoolRing,
    Functional, GroupEndo, RingEndo,
};
use crate::config::Limits;
use crate::duality::{delta_adjoint, delta_eval, entourage_transport, h_embed, phi, EntourageChi};
use crate::error::{Error, Result};
use crate::examples::{
    build_contrast, obstruction_witness, obstruction_witnesses, rna_certificate,
};
use crate::finmon::{
    full_selfmap_monoid, validate_monoid, FiniteMonoid, MonoidAction, SelfMap, SelfMapMonoid,
};
use crate::navector::{FreeVector, NaSpace};
use crate::ultra::{
    ball_submonoid_check, check_left_congruence, check_nonexpansive, congruence_closure,
    d_from_chain, dyadic, enumerate_theta, epsilon_a_relation, sup_combine, Dist, MonotoneChain,
    Partition, Side, UltraPseudometric,
};
use crate::unif::{
    cover_order, cover_star, cover_wedge, preimage_partition, refines, saturate, Cover,
    PartitionFamily,
};

/// Sizes and switches for [`run_suite`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteConfig {
    /// Largest `|Y|` for the duality checks.
    pub bound_points: usize,
    /// Largest atom count for the checks over all of `End(B)`.
    pub bound_atoms: usize,
    /// Largest truncation level of the contrast example.
    pub bound_k: usize,
    pub seed: u64,
    /// Append a deliberately corrupted table as a negative control.
    pub self_test: bool,
    pub limits: Limits,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            bound_points: 3,
            bound_atoms: 3,
            bound_k: 4,
            seed: 0x5eed,
            self_test: false,
            limits: Limits::default(),
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: usize, max: usize| {
            Err(Error::Config(format!(
                "{what} must be in 1..={max}, got {v}"
            )))
        };
        if !(1..=5).contains(&self.bound_points) {
            return bad("bound-points", self.bound_points, 5);
        }
        if !(1..=4).contains(&self.bound_atoms) {
            return bad("bound-atoms", self.bound_atoms, 4);
        }
        if !(1..=8).contains(&self.bound_k) {
            return bad("bound-k", self.bound_k, 8);
        }
        self.limits
            .check((self.bound_points as u128).pow(self.bound_points as u32))?;
        self.limits
            .check(1u128 << (self.bound_atoms * self.bound_atoms))?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail { witness: Value },
}

impl Outcome {
    pub fn passed(&self) -> bool {
        matches!(self, Outcome::Pass)
    }
}

/// One line of the suite report.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub instance_parameters: String,
    pub instances_checked: u64,
    pub outcome: Outcome,
    pub elapsed_ms: u128,
}

impl VerificationReport {
    pub fn tsv_header() -> &'static str {
        "check\tparameters\tinstances\toutcome\telapsed_ms"
    }

    pub fn to_tsv(&self) -> String {
        let outcome = match &self.outcome {
            Outcome::Pass => "pass".to_string(),
            Outcome::Fail { witness } => format!("fail {witness}"),
        };
        format!(
            "{}\t{}\t{}\t{}\t{}",
            self.check_name,
            self.instance_parameters,
            self.instances_checked,
            outcome,
            self.elapsed_ms
        )
    }
}

/// Counts instances and records the first failure.
struct Tally {
    instances: u64,
    failure: Option<Value>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            instances: 0,
            failure: None,
        }
    }

    /// Counts one instance; keeps the first witness.
    fn check(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        self.instances += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(witness());
        }
    }

    fn fail(&mut self, witness: Value) {
        self.failure.get_or_insert(witness);
    }
}

fn timed(
    name: &str,
    params: String,
    body: impl FnOnce(&mut Tally) -> Result<()>,
) -> VerificationReport {
    let start = Instant::now();
    let mut tally = Tally::new();
    if let Err(e) = body(&mut tally) {
        tally.fail(json!({ "error": e.to_string() }));
    }
    VerificationReport {
        check_name: name.to_string(),
        instance_parameters: params,
        instances_checked: tally.instances,
        outcome: match tally.failure {
            None => Outcome::Pass,
            Some(witness) => Outcome::Fail { witness },
        },
        elapsed_ms: start.elapsed().as_millis(),
    }
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Runs every check in a fixed order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    cfg.validate()?;
    let mut reports = vec![
        check_monoid_basics(cfg),
        check_duality_counts(cfg),
        check_phi(cfg),
        check_delta(cfg),
        check_delta_eval(cfg),
        check_entourage_transport(cfg),
        check_metrization(cfg),
        check_theta(cfg),
        check_balls_and_congruences(cfg),
        check_saturation(cfg),
        check_contrast(cfg),
        check_kantorovich(cfg),
        check_covers(cfg),
    ];
    if cfg.self_test {
        reports.push(negative_control());
    }
    Ok(reports)
}

/// The duality part of the suite only, for `|Y| ≤ points`.
pub fn run_duality_suite(points: usize, limits: &Limits) -> Result<Vec<VerificationReport>> {
    let cfg = SuiteConfig {
        bound_points: points,
        bound_atoms: points.min(3),
        limits: *limits,
        ..SuiteConfig::default()
    };
    cfg.validate()?;
    Ok(vec![
        check_duality_counts(&cfg),
        check_phi(&cfg),
        check_delta(&cfg),
        check_delta_eval(&cfg),
        check_entourage_transport(&cfg),
    ])
}

/// A witness for a table that fails validation, replayable through
/// [`replay_witness`].
pub fn monoid_witness(table: &[Vec<usize>], identity: usize, err: &Error) -> Value {
    json!({
        "operation": "validate_monoid",
        "table": table,
        "identity": identity,
        "error": err.to_string(),
        "violation": match err {
            Error::AssociativityViolation { x, y, z } => json!([x, y, z]),
            Error::IdentityViolation { x } => json!([x]),
            _ => Value::Null,
        },
    })
}

/// Re-runs the operation recorded in a failure witness. Returns the error
/// it reproduces, or `None` when the operation now succeeds.
pub fn replay_witness(witness: &Value) -> Result<Option<Error>> {
    let op = witness.get("operation").and_then(Value::as_str);
    match op {
        Some("validate_monoid") => {
            let table: Vec<Vec<usize>> = serde_json::from_value(witness["table"].clone())
                .map_err(|e| Error::Parse(e.to_string()))?;
            let identity: usize = serde_json::from_value(witness["identity"].clone())
                .map_err(|e| Error::Parse(e.to_string()))?;
            Ok(validate_monoid(table, identity).err())
        }
        other => Err(Error::Parse(format!("cannot replay operation {other:?}"))),
    }
}

fn negative_control() -> VerificationReport {
    timed("self_test_corrupted_table", "3 elements".into(), |t| {
        // the cyclic group Z₃ with one product overwritten
        let mut table: Vec<Vec<usize>> = (0..3)
            .map(|x| (0..3).map(|y| (x + y) % 3).collect())
            .collect();
        table[1][1] = 0;
        match validate_monoid(table.clone(), 0) {
            Ok(_) => t.check(true, || Value::Null),
            Err(e) => t.check(false, || monoid_witness(&table, 0, &e)),
        }
        Ok(())
    })
}

/// Small random monoids: submonoids of `Y^Y` generated by random maps.
pub fn random_monoid(rng: &mut impl Rng, max_size: usize) -> FiniteMonoid {
    let limits = Limits::default();
    loop {
        let points = rng.gen_range(2..=3);
        let gens: Vec<SelfMap> = (0..rng.gen_range(1..=2))
            .map(|_| SelfMap::new((0..points).map(|_| rng.gen_range(0..points)).collect()).unwrap())
            .collect();
        let m = SelfMapMonoid::generated_by(points, &gens, &limits).expect("tiny carrier");
        if m.len() <= max_size {
            return m
                .to_finite_monoid(&limits)
                .expect("closed under composition");
        }
    }
}

pub fn random_partition(rng: &mut impl Rng, n: usize) -> Partition {
    let classes = rng.gen_range(1..=n);
    let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..classes)).collect();
    Partition::from_labels(&labels)
}

/// A random descending chain of `levels` partitions.
pub fn random_chain(rng: &mut impl Rng, n: usize, levels: usize) -> MonotoneChain {
    let mut out: Vec<Partition> = Vec::with_capacity(levels);
    for _ in 0..levels {
        let p = random_partition(rng, n);
        let next = match out.last() {
            Some(prev) => prev.meet(&p).expect("same carrier"),
            None => p,
        };
        out.push(next);
    }
    MonotoneChain::new(n, out).expect("meets descend")
}

/// A random ultra-pseudometric: a capped sup of chain metrics, pulled back
/// along a random self-map so that zero distances occur.
pub fn random_ultrametric(rng: &mut impl Rng, n: usize) -> UltraPseudometric {
    let parts: Vec<UltraPseudometric> = (0..rng.gen_range(1..=2))
        .map(|_| {
            let levels = rng.gen_range(0..=3);
            d_from_chain(&random_chain(rng, n, levels))
        })
        .collect();
    let cap = if rng.gen_bool(0.3) {
        dyadic(1)
    } else {
        Dist::one()
    };
    let d = sup_combine(&parts, cap).expect("same carrier");
    if rng.gen_bool(0.3) {
        let f: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        UltraPseudometric::from_fn(n, |x, y| d.get(f[x], f[y])).expect("pullback is ultra")
    } else {
        d
    }
}

/// All partitions of `n` points in canonical order.
pub fn all_partitions(n: usize) -> Vec<Partition> {
    fn grow(labels: &mut Vec<usize>, n: usize, out: &mut Vec<Partition>) {
        if labels.len() == n {
            out.push(Partition::from_labels(labels));
            return;
        }
        let next = labels.iter().max().map_or(0, |&m| m + 1);
        for l in 0..=next {
            labels.push(l);
            grow(labels, n, out);
            labels.pop();
        }
    }
    let mut out = Vec::new();
    grow(&mut Vec::with_capacity(n), n, &mut out);
    out.sort();
    out
}

/// The literal infimum over finite paths of the maximal step cost, where a
/// step between points in `σ_n \ σ_{n+1}` costs `2^-n`. Exhaustive over
/// simple paths.
pub fn minimax_path_distance(chain: &MonotoneChain, x: usize, y: usize) -> Dist {
    let n = chain.carrier_size();
    let cost = |a: usize, b: usize| -> Dist {
        (0..=chain.len())
            .find(|&l| chain.related_at(l, a, b) && !chain.related_at(l + 1, a, b))
            .map_or_else(Dist::zero, dyadic)
    };
    fn walk(
        at: usize,
        target: usize,
        visited: &mut Vec<bool>,
        worst: Dist,
        best: &mut Option<Dist>,
        cost: &dyn Fn(usize, usize) -> Dist,
    ) {
        if at == target {
            if best.is_none_or(|b| worst < b) {
                *best = Some(worst);
            }
            return;
        }
        for next in 0..visited.len() {
            if !visited[next] {
                visited[next] = true;
                walk(next, target, visited, worst.max(cost(at, next)), best, cost);
                visited[next] = false;
            }
        }
    }
    let mut visited = vec![false; n];
    visited[x] = true;
    let mut best = None;
    walk(x, y, &mut visited, Dist::zero(), &mut best, &cost);
    best.expect("a path always exists")
}

/// Minimum over every set of distinct edges on `M ∪ {0̄}` whose odd-degree
/// points in `M` form the support: all representations of `v` as a sum of
/// differences, with no pairing restriction.
pub fn representation_norm_oracle(space: &NaSpace, v: &FreeVector) -> Dist {
    use crate::navector::Endpoint;
    let n = space.points();
    let ends: Vec<Endpoint> = (0..n)
        .map(Endpoint::Point)
        .chain([Endpoint::Zero])
        .collect();
    let edges: Vec<(usize, usize)> = (0..=n)
        .flat_map(|a| (a + 1..=n).map(move |b| (a, b)))
        .collect();
    let costs: Vec<Dist> = edges
        .iter()
        .map(|&(a, b)| space.distance(ends[a], ends[b]))
        .collect();
    let mut best: Option<Dist> = None;
    for subset in 0u64..1 << edges.len() {
        let mut odd = 0u64;
        let mut worst = Dist::zero();
        for (k, &(a, b)) in edges.iter().enumerate() {
            if subset >> k & 1 == 1 {
                odd ^= 1 << a | 1 << b;
                worst = worst.max(costs[k]);
            }
        }
        if odd & ((1 << n) - 1) == v.support() && best.is_none_or(|b| worst < b) {
            best = Some(worst);
        }
    }
    best.expect("the vector has a representation")
}

fn check_monoid_basics(cfg: &SuiteConfig) -> VerificationReport {
    let mut rng = rng(cfg.seed, 1);
    timed(
        "monoid_opposite_and_cayley",
        "40 random monoids of size <= 27".into(),
        |t| {
            for _ in 0..40 {
                let m = random_monoid(&mut rng, 27);
                t.check(
                    m.opposite().opposite() == m,
                    || json!({ "monoid": m, "law": "opposite involution" }),
                );
                let emb = m.cayley_embed();
                let injective = emb.element_map.iter().collect::<BTreeSet<_>>().len() == m.size();
                let hom = (0..m.size()).all(|s| {
                    (0..m.size()).all(|u| {
                        *emb.image.get(emb.element_map[m.mul(s, u)])
                            == emb
                                .image
                                .get(emb.element_map[s])
                                .compose(emb.image.get(emb.element_map[u]))
                    })
                });
                t.check(
                    injective && hom,
                    || json!({ "monoid": m, "law": "cayley embedding" }),
                );
                t.check(
                    emb.image.carrier_size() == m.size(),
                    || json!({ "monoid": m, "law": "cayley image inside S^S" }),
                );
            }
            Ok(())
        },
    )
}

fn check_duality_counts(cfg: &SuiteConfig) -> VerificationReport {
    timed(
        "duality_counts",
        format!("|Y| <= {}", cfg.bound_points),
        |t| {
            for n in 1..=cfg.bound_points {
                let ring = BoolRing::new(n)?;
                let maps = full_selfmap_monoid(n, &cfg.limits)?.len();
                let endos = enumerate_ring_endos(&ring, &cfg.limits)?.len();
                let expected = n.pow(n as u32);
                t.check(maps == expected && endos == expected, || {
                json!({ "points": n, "self_maps": maps, "ring_endos": endos, "expected": expected })
            });
            }
            Ok(())
        },
    )
}

fn check_phi(cfg: &SuiteConfig) -> VerificationReport {
    timed(
        "phi_anti_isomorphism",
        format!("|Y| <= {}", cfg.bound_points),
        |t| {
            for n in 1..=cfg.bound_points {
                let ring = BoolRing::new(n)?;
                let full = full_selfmap_monoid(n, &cfg.limits)?;
                let images: Vec<RingEndo> = full
                    .elements()
                    .iter()
                    .map(|s| phi(s, &ring))
                    .collect::<Result<_>>()?;
                let mut sorted = images.clone();
                sorted.sort();
                sorted.dedup();
                let endos = enumerate_ring_endos(&ring, &cfg.limits)?;
                t.check(
                    sorted == endos,
                    || json!({ "points": n, "law": "phi bijective onto End_R(B)" }),
                );
                for (i, s) in full.elements().iter().enumerate() {
                    for (j, u) in full.elements().iter().enumerate() {
                        let st = s.compose(u).rank();
                        t.check(images[st] == images[j].compose(&images[i]), || {
                        json!({ "points": n, "s": s, "t": u, "law": "phi(s∘t) = phi(t)∘phi(s)" })
                    });
                    }
                }
            }
            Ok(())
        },
    )
}

fn check_delta(cfg: &SuiteConfig) -> VerificationReport {
    timed(
        "delta_anti_isomorphism",
        format!(
            "End(B) n <= {}, phi image |Y| <= {}",
            cfg.bound_atoms, cfg.bound_points
        ),
        |t| {
            for n in 1..=cfg.bound_atoms {
                let ring = BoolRing::new(n)?;
                let all = enumerate_group_endos(&ring, &cfg.limits)?;
                let deltas: Vec<GroupEndo> = all.iter().map(delta_adjoint).collect();
                for (sigma, d) in all.iter().zip(&deltas) {
                    // the adjoint pulls functionals back: (Δσ f)(χ) = f(σχ)
                    let dual_ok = pontryagin_dual(&ring).functionals().all(|f| {
                        ring.elements().all(|chi| {
                            Functional(d.apply(f.0)).eval(chi) == f.eval(sigma.apply(chi))
                        })
                    });
                    let transpose_ok = (0..n).all(|i| {
                        (0..n).all(|j| (d.rows()[i] >> j & 1) == (sigma.rows()[j] >> i & 1))
                    });
                    t.check(dual_ok && transpose_ok, || {
                        json!({ "atoms": n, "sigma": sigma, "law": "delta is the transpose/adjoint" })
                    });
                }
                let mut image = deltas.clone();
                image.sort();
                image.dedup();
                t.check(
                    image == all,
                    || json!({ "atoms": n, "law": "delta bijective" }),
                );
                for (i, s) in all.iter().enumerate() {
                    for (j, u) in all.iter().enumerate() {
                        let k = all.binary_search(&s.compose(u)).expect("closed");
                        t.check(deltas[k] == deltas[j].compose(&deltas[i]), || {
                            json!({ "atoms": n, "s": s, "t": u, "law": "delta(s∘t) = delta(t)∘delta(s)" })
                        });
                    }
                }
            }
            for n in 1..=cfg.bound_points {
                let ring = BoolRing::new(n)?;
                let full = full_selfmap_monoid(n, &cfg.limits)?;
                let ring_images: Vec<GroupEndo> = full
                    .elements()
                    .iter()
                    .map(|s| Ok(phi(s, &ring)?.as_group_endo()))
                    .collect::<Result<_>>()?;
                let deltas: Vec<GroupEndo> = ring_images.iter().map(delta_adjoint).collect();
                let distinct: BTreeSet<&GroupEndo> = deltas.iter().collect();
                t.check(
                    distinct.len() == deltas.len(),
                    || json!({ "points": n, "law": "delta injective on phi image" }),
                );
                for i in 0..full.len() {
                    for j in 0..full.len() {
                        let product = ring_images[i].compose(&ring_images[j]);
                        t.check(delta_adjoint(&product) == deltas[j].compose(&deltas[i]), || {
                            json!({ "points": n, "s": full.get(i), "t": full.get(j), "law": "delta anti-law on phi image" })
                        });
                    }
                }
            }
            Ok(())
        },
    )
}

fn check_delta_eval(cfg: &SuiteConfig) -> VerificationReport {
    timed(
        "delta_evaluation_embedding",
        format!("|Y| <= {}", cfg.bound_points),
        |t| {
            for n in 1..=cfg.bound_points {
                let ring = BoolRing::new(n)?;
                let image: Vec<Functional> = (0..n)
                    .map(|y| delta_eval(&ring, y))
                    .collect::<Result<_>>()?;
                let distinct: BTreeSet<&Functional> = image.iter().collect();
                let mut sorted = image.clone();
                sorted.sort();
                t.check(
                    distinct.len() == n && sorted == ring_homs_to_z2(&ring),
                    || json!({ "points": n, "law": "delta(Y) = Hom_R(B, Z2)" }),
                );
                for s in full_selfmap_monoid(n, &cfg.limits)?.elements() {
                    let h = h_embed(s, &ring)?;
                    for y in 0..n {
                        let lhs = Functional(h.apply(image[y].0));
                        t.check(
                            lhs == image[s.apply(y)],
                            || json!({ "points": n, "s": s, "y": y, "law": "h(s)δ(y) = δ(s y)" }),
                        );
                    }
                }
            }
            Ok(())
        },
    )
}

fn check_entourage_transport(cfg: &SuiteConfig) -> VerificationReport {
    let points = cfg.bound_points.min(3);
    timed("entourage_transport", format!("|Y| <= {points}"), |t| {
        for n in 1..=points {
            let ring = BoolRing::new(n)?;
            let full = full_selfmap_monoid(n, &cfg.limits)?;
            let endos: Vec<RingEndo> = full
                .elements()
                .iter()
                .map(|s| phi(s, &ring))
                .collect::<Result<_>>()?;
            let duals: Vec<GroupEndo> = endos
                .iter()
                .map(|e| delta_adjoint(&e.as_group_endo()))
                .collect();
            for chi in ring.elements() {
                for s1 in full.elements() {
                    for s2 in full.elements() {
                        let (a, b, c) = entourage_transport(&ring, chi, s1, s2)?;
                        // the separation shortcut: compare s₁(χ), s₂(χ) directly
                        let direct = phi(s1, &ring)?.apply(chi) == phi(s2, &ring)?.apply(chi);
                        t.check(a == b && b == c && c == direct, || {
                            json!({ "points": n, "chi": ring.to_bitstring(chi), "s1": s1, "s2": s2,
                                    "flags": [a, b, c] })
                        });
                    }
                }
                let ent = EntourageChi::new(&ring, chi)?;
                let k = full.len();
                let equivalences = [
                    Partition::from_relation(k, |i, j| {
                        ent.relates_self_maps(full.get(i), full.get(j))
                    }),
                    Partition::from_relation(k, |i, j| {
                        ent.relates_ring_endos(&endos[i], &endos[j])
                    }),
                    Partition::from_relation(k, |i, j| {
                        ent.relates_dual_endos(&ring, &duals[i], &duals[j])
                    }),
                ];
                for (rep, p) in equivalences.iter().enumerate() {
                    t.check(p.is_ok(), || {
                        json!({ "points": n, "chi": ring.to_bitstring(chi), "representation": rep + 1,
                                "law": "induced relation is an equivalence" })
                    });
                }
            }
        }
        Ok(())
    })
}

fn check_metrization(cfg: &SuiteConfig) -> VerificationReport {
    let mut rng = rng(cfg.seed, 6);
    timed(
        "metrization_d_from_chain",
        "200 random chains, <= 6 points".into(),
        |t| {
            for _ in 0..200 {
                let n = rng.gen_range(1..=6);
                let levels = rng.gen_range(0..=4);
                let chain = random_chain(&mut rng, n, levels);
                let d = d_from_chain(&chain);
                let minimax_ok = (0..n)
                    .all(|x| (0..n).all(|y| d.get(x, y) == minimax_path_distance(&chain, x, y)));
                t.check(
                    minimax_ok,
                    || json!({ "chain": chain, "law": "closed form = minimax path" }),
                );
                for level in 0..=chain.len() {
                    // σ_{n+1} ⊆ {d < 2^-n} ⊆ σ_n
                    let bound = dyadic(level);
                    let ok = (0..n).all(|x| {
                        (0..n).all(|y| {
                            let close = d.get(x, y) < bound;
                            (!chain.related_at(level + 1, x, y) || close)
                                && (!close || chain.related_at(level, x, y))
                        })
                    });
                    t.check(
                        ok,
                        || json!({ "chain": chain, "level": level, "law": "sandwich" }),
                    );
                }
                t.check(
                    d.strong_triangle_violation().is_none(),
                    || json!({ "chain": chain, "law": "strong triangle" }),
                );
            }
            Ok(())
        },
    )
}

fn check_theta(cfg: &SuiteConfig) -> VerificationReport {
    let mut rng = rng(cfg.seed, 7);
    timed(
        "theta_monoid",
        "discrete |D| <= 3; 50 random metrics <= 4 points; saturation on 3 points".into(),
        |t| {
            for n in 1..=3 {
                let theta = enumerate_theta(&UltraPseudometric::discrete(n), &cfg.limits)?;
                let full = full_selfmap_monoid(n, &cfg.limits)?;
                t.check(
                    theta == full,
                    || json!({ "points": n, "law": "Θ(D, d_Δ) = D^D" }),
                );
            }
            for _ in 0..50 {
                let n = rng.gen_range(1..=4);
                let d = random_ultrametric(&mut rng, n);
                let theta = enumerate_theta(&d, &cfg.limits)?;
                let closed = theta.contains(&SelfMap::identity(n))
                    && theta.elements().iter().all(|f| {
                        theta
                            .elements()
                            .iter()
                            .all(|g| theta.contains(&f.compose(g)))
                    });
                let brute = full_selfmap_monoid(n, &cfg.limits)?
                    .elements()
                    .iter()
                    .filter(|f| d.is_lipschitz(f.values()))
                    .count();
                t.check(
                    closed && brute == theta.len(),
                    || json!({ "metric": d, "law": "Θ is the Lipschitz monoid" }),
                );
                let mut radii = d.values();
                radii.push(d.diameter() + Dist::one());
                for a in 1u32..1 << n {
                    let pts: Vec<usize> = (0..n).filter(|&p| a >> p & 1 == 1).collect();
                    for &eps in radii.iter().filter(|r| **r > Dist::zero()) {
                        let rel = epsilon_a_relation(&theta, &d, &pts, eps);
                        t.check(rel.is_ok(), || {
                            json!({ "metric": d, "A": pts, "eps": eps.to_string(),
                                                        "law": "ε_A is an equivalence" })
                        });
                    }
                }
            }
            // saturation law on every chain metric over 3 points
            for chain in all_short_chains(3) {
                let d = d_from_chain(&chain);
                let theta = enumerate_theta(&d, &cfg.limits)?;
                let mut radii = d.values();
                radii.push(d.diameter() + Dist::one());
                radii.retain(|r| *r > Dist::zero());
                for s0 in theta.elements() {
                    for a in 1u32..8 {
                        let pts: Vec<usize> = (0..3).filter(|&p| a >> p & 1 == 1).collect();
                        let moved: Vec<usize> = pts
                            .iter()
                            .map(|&p| s0.apply(p))
                            .collect::<BTreeSet<_>>()
                            .into_iter()
                            .collect();
                        for &eps in &radii {
                            let near = epsilon_a_relation(&theta, &d, &moved, eps)?;
                            let far = epsilon_a_relation(&theta, &d, &pts, eps)?;
                            for i in 0..theta.len() {
                                for j in 0..theta.len() {
                                    if !near.related(i, j) {
                                        continue;
                                    }
                                    let fi =
                                        theta.index_of(&theta.get(i).compose(s0)).expect("closed");
                                    let fj =
                                        theta.index_of(&theta.get(j).compose(s0)).expect("closed");
                                    t.check(far.related(fi, fj), || {
                                        json!({ "metric": d, "s0": s0, "A": pts, "eps": eps.to_string(),
                                                "pair": [i, j], "law": "ε_{s0 A} ⇒ ε_A after s0" })
                                    });
                                }
                            }
                        }
                    }
                }
            }
            Ok(())
        },
    )
}

/// Every chain of length at most 2 on `n` points.
pub fn all_short_chains(n: usize) -> Vec<MonotoneChain> {
    let parts = all_partitions(n);
    let mut out = vec![MonotoneChain::new(n, vec![]).expect("empty chain")];
    for a in &parts {
        out.push(MonotoneChain::new(n, vec![a.clone()]).expect("single level"));
        for b in parts.iter().filter(|b| b.refines(a)) {
            out.push(MonotoneChain::new(n, vec![a.clone(), b.clone()]).expect("refines"));
        }
    }
    out
}

/// A random `side`-nonexpansive ultra-pseudometric: the chain metric of a
/// random chain closed under `side` congruence.
fn random_nonexpansive_metric(
    rng: &mut impl Rng,
    m: &FiniteMonoid,
    side: Side,
) -> UltraPseudometric {
    let n = m.size();
    let levels = rng.gen_range(0..=3);
    let raw = random_chain(rng, n, levels);
    let closed: Vec<Partition> = raw
        .levels()
        .iter()
        .map(|p| congruence_closure(m, p, side).expect("same carrier"))
        .collect();
    let mut levels_out: Vec<Partition> = Vec::new();
    for p in closed {
        let next = match levels_out.last() {
            Some(prev) => prev.meet(&p).expect("same carrier"),
            None => p,
        };
        levels_out.push(next);
    }
    d_from_chain(&MonotoneChain::new(n, levels_out).expect("descending"))
}

fn check_balls_and_congruences(cfg: &SuiteConfig) -> VerificationReport {
    let mut rng = rng(cfg.seed, 8);
    timed(
        "ball_submonoids_and_left_congruences",
        "100 random monoids of size <= 6".into(),
        |t| {
            for _ in 0..100 {
                let m = random_monoid(&mut rng, 6);
                let right = random_nonexpansive_metric(&mut rng, &m, Side::Right);
                let verified = check_nonexpansive(&m, &right, Side::Right)?.is_none();
                t.check(verified, || json!({ "monoid": m, "metric": right, "law": "generated metric is right nonexpansive" }));
                if verified {
                    let mut radii = right.values();
                    radii.push(right.diameter() + Dist::one());
                    for r in radii.into_iter().filter(|r| *r > Dist::zero()) {
                        let ok = ball_submonoid_check(&m, &right, r, Side::Right)?;
                        t.check(ok, || {
                            json!({ "monoid": m, "metric": right, "radius": r.to_string(),
                                           "law": "B(e, r) is a submonoid" })
                        });
                    }
                }
                let left = random_nonexpansive_metric(&mut rng, &m, Side::Left);
                let verified = check_nonexpansive(&m, &left, Side::Left)?.is_none();
                t.check(verified, || json!({ "monoid": m, "metric": left, "law": "generated metric is left nonexpansive" }));
                if verified {
                    let mut radii = left.values();
                    radii.push(left.diameter() + Dist::one());
                    for r in radii.into_iter().filter(|r| *r > Dist::zero()) {
                        let p = left.ball_partition(r)?;
                        t.check(check_left_congruence(&m, &p), || {
                            json!({ "monoid": m, "metric": left, "radius": r.to_string(),
                                "law": "ball partition is a left congruence" })
                        });
                    }
                }
            }
            Ok(())
        },
    )
}

/// Every monoid on `{0, 1, 2}` with identity 0.
pub fn all_three_element_monoids() -> Vec<FiniteMonoid> {
    let mut out = Vec::new();
    for code in 0..81usize {
        let cell = |i: usize| code / 3usize.pow(i as u32) % 3;
        let table = vec![
            vec![0, 1, 2],
            vec![1, cell(0), cell(1)],
            vec![2, cell(2), cell(3)],
        ];
        if let Ok(m) = validate_monoid(table, 0) {
            out.push(m);
        }
    }
    out
}

/// Every action of `m` on `points` points.
pub fn all_actions(m: &FiniteMonoid, points: usize, limits: &Limits) -> Result<Vec<MonoidAction>> {
    let maps = full_selfmap_monoid(points, limits)?;
    let mut out = Vec::new();
    let others: Vec<usize> = (0..m.size()).filter(|&s| s != m.identity()).collect();
    let total = maps.len().pow(others.len() as u32);
    for code in 0..total {
        let mut act = vec![SelfMap::identity(points).values().to_vec(); m.size()];
        for (k, &s) in others.iter().enumerate() {
            act[s] = maps
                .get(code / maps.len().pow(k as u32) % maps.len())
                .values()
                .to_vec();
        }
        if let Ok(a) = MonoidAction::new(m.clone(), points, act) {
            out.push(a);
        }
    }
    Ok(out)
}

fn check_saturation(cfg: &SuiteConfig) -> VerificationReport {
    timed(
        "saturation_u_s",
        "all 3-element monoids acting on 3 points".into(),
        |t| {
            let parts = all_partitions(3);
            for m in all_three_element_monoids() {
                for action in all_actions(&m, 3, &cfg.limits)? {
                    for p in &parts {
                        for s in 0..3 {
                            let sp = preimage_partition(action.translation(s), p)?;
                            for u in 0..3 {
                                // t⁻¹(s⁻¹ε) = (st)⁻¹ε
                                let lhs = preimage_partition(action.translation(u), &sp)?;
                                let rhs = preimage_partition(action.translation(m.mul(s, u)), p)?;
                                t.check(lhs == rhs, || {
                                    json!({ "action": action, "partition": p, "s": s, "t": u,
                                                           "law": "t⁻¹s⁻¹ε = (st)⁻¹ε" })
                                });
                            }
                        }
                    }
                    for a in 0..parts.len() {
                        for b in a..parts.len() {
                            let gamma =
                                PartitionFamily::new(3, [parts[a].clone(), parts[b].clone()])?;
                            let sat = saturate(&action, &gamma)?;
                            let ok = gamma.is_subset(&sat)
                                && sat.is_saturated_under(&action)
                                && sat.is_meet_closed()
                                && saturate(&action, &sat)? == sat;
                            t.check(ok, || json!({ "action": action, "gamma": gamma, "law": "U_S closure" }));
                        }
                    }
                }
            }
            // preimages of arbitrary partitions under arbitrary maps on 4 points
            let full = full_selfmap_monoid(4, &cfg.limits)?;
            for p in all_partitions(4) {
                for s in full.elements() {
                    let q = preimage_partition(s, &p)?;
                    let relation_ok = (0..4).all(|x| {
                        (0..4).all(|y| q.related(x, y) == p.related(s.apply(x), s.apply(y)))
                    });
                    t.check(
                        relation_ok,
                        || json!({ "s": s, "partition": p, "law": "preimage is a partition" }),
                    );
                }
            }
            Ok(())
        },
    )
}

fn check_contrast(cfg: &SuiteConfig) -> VerificationReport {
    timed("contrast_example", format!("k <= {}", cfg.bound_k), |t| {
        let mut right_witnesses = Vec::new();
        for k in 1..=cfg.bound_k {
            let c = build_contrast(k)?;
            let cert = rna_certificate(&c)?;
            t.check(
                cert.left_nonexpansive
                    && cert.translation_embedding
                    && cert.identity_balls_submonoids,
                || json!({ "k": k, "certificate": cert }),
            );
            for j in 0..k {
                let w = obstruction_witness(&c, j);
                t.check(
                    w.is_ok() && !obstruction_witnesses(&c, j).is_empty(),
                    || json!({ "k": k, "j": j, "law": "0 ∈ U_j N" }),
                );
            }
            t.check(
                obstruction_witness(&c, k).is_err(),
                || json!({ "k": k, "law": "no witness at j = k" }),
            );
            if let Some(w) = cert.right_witness {
                right_witnesses.push((k, w));
            }
        }
        if cfg.bound_k >= 2 {
            t.check(
                !right_witnesses.is_empty(),
                || json!({ "law": "right expansion witness exists" }),
            );
        }
        Ok(())
    })
}

fn check_kantorovich(cfg: &SuiteConfig) -> VerificationReport {
    timed(
        "kantorovich_ultra_norm",
        "all short chain metrics, |M| <= 4".into(),
        |t| {
            let limits = cfg.limits;
            for n in 1..=4 {
                for chain in all_short_chains(n) {
                    let space = NaSpace::new(d_from_chain(&chain))?;
                    let vectors = 1u64 << n;
                    let norms: Vec<Dist> = (0..vectors)
                        .map(|v| {
                            Ok(space
                                .kantorovich_norm(&FreeVector::from_mask(v), &limits)?
                                .norm)
                        })
                        .collect::<Result<_>>()?;
                    for x in 0..n {
                        for y in x + 1..n {
                            let v = (1u64 << x | 1 << y) as usize;
                            t.check(norms[v] == space.metric().get(x, y), || {
                            json!({ "chain": chain, "pair": [x, y], "law": "‖x − y‖ = d(x, y)" })
                        });
                        }
                    }
                    for u in 0..vectors as usize {
                        for v in 0..vectors as usize {
                            t.check(norms[u ^ v] <= norms[u].max(norms[v]), || {
                            json!({ "chain": chain, "u": u, "v": v, "law": "‖u + v‖ ≤ max" })
                        });
                        }
                        let oracle =
                            representation_norm_oracle(&space, &FreeVector::from_mask(u as u64));
                        t.check(
                            oracle == norms[u],
                            || json!({ "chain": chain, "v": u, "law": "pairing optimal" }),
                        );
                    }
                    if n == 3 {
                        let theta = enumerate_theta(space.metric(), &limits)?;
                        for f in theta.elements() {
                            for v in 0..vectors {
                                let image =
                                    space.lipschitz_linear_extend(f, &FreeVector::from_mask(v))?;
                                t.check(norms[image.support() as usize] <= norms[v as usize], || {
                                json!({ "chain": chain, "f": f, "v": v, "law": "‖f̄(v)‖ ≤ ‖v‖" })
                            });
                            }
                        }
                    }
                }
            }
            Ok(())
        },
    )
}

pub fn random_cover(rng: &mut impl Rng, n: usize) -> Cover {
    let full = (1u64 << n) - 1;
    loop {
        let blocks: Vec<u64> = (0..rng.gen_range(1..=4))
            .map(|_| rng.gen_range(1..=full))
            .collect();
        let union = blocks.iter().fold(0, |a, b| a | b);
        // patch uncovered points into a block of their own
        let mut all = blocks;
        if union != full {
            all.push(full & !union);
        }
        if let Ok(c) = Cover::new(n, all) {
            return c;
        }
    }
}

fn check_covers(cfg: &SuiteConfig) -> VerificationReport {
    let mut rng = rng(cfg.seed, 12);
    timed(
        "covering_combinators",
        "500 random cover pairs, <= 6 points".into(),
        |t| {
            for _ in 0..500 {
                let n = rng.gen_range(1..=6);
                let p = random_cover(&mut rng, n);
                let q = random_cover(&mut rng, n);
                t.check(
                    refines(&p, &cover_star(&p))?,
                    || json!({ "P": p, "law": "P ≻ P*" }),
                );
                let w = cover_wedge(&p, &q)?;
                t.check(
                    cover_order(&w) <= cover_order(&p) * cover_order(&q),
                    || json!({ "P": p, "Q": q, "law": "ord(P∧Q) ≤ ord(P)·ord(Q)" }),
                );
                t.check(
                    refines(&w, &p)? && refines(&w, &q)?,
                    || json!({ "P": p, "Q": q, "law": "P∧Q refines both" }),
                );
                let part = Cover::from_partition(&random_partition(&mut rng, n))?;
                t.check(
                    cover_order(&part) == 1,
                    || json!({ "P": part, "law": "ord(partition) = 1" }),
                );
            }
            Ok(())
        },
    )
}
