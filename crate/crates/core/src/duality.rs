//! The Stone and Pontryagin anti-isomorphisms between self-maps of a finite
//! discrete space `Y`, ring endomorphisms of its Boolean ring `B`, and
//! endomorphisms of the dual group `B*`.
//!
//! Points of `Y` are the atoms of `B`: a clopen set `A ⊆ Y` is the bitmask
//! of its points.

use crate::boolring::{pontryagin_dual, BoolRing, Functional, GroupEndo, RingEndo};
use crate::error::{Error, Result};
use crate::finmon::SelfMap;

/// `Φ(s) = s*`, `s*(χ) = χ ∘ s`: sends the clopen `A` to `s⁻¹(A)`.
pub fn phi(s: &SelfMap, ring: &BoolRing) -> Result<RingEndo> {
    if s.carrier_size() != ring.atoms() {
        return Err(Error::DimensionMismatch {
            expected: ring.atoms(),
            got: s.carrier_size(),
        });
    }
    let images = (0..ring.atoms())
        .map(|a| s.preimage_mask(ring.atom(a)))
        .collect();
    RingEndo::new(ring, images)
}

/// Inverse of [`phi`]: `y` goes to the unique atom whose image contains it.
pub fn phi_inverse(endo: &RingEndo) -> SelfMap {
    let n = endo.atoms();
    let values = (0..n)
        .map(|y| {
            endo.atom_images()
                .iter()
                .position(|&img| img >> y & 1 == 1)
                .expect("atom images partition the points")
        })
        .collect();
    SelfMap::new(values).expect("values are atom indices")
}

/// `Δ(σ) = σ*`, `σ*(f) = f ∘ σ`, written in the coordinates of `B*`.
/// In matrix terms this is the transpose.
pub fn delta_adjoint(sigma: &GroupEndo) -> GroupEndo {
    sigma.transpose()
}

/// The composite embedding `h = Δ ∘ Φ` of `C(Y, Y)` into `End(B*)`.
pub fn h_embed(s: &SelfMap, ring: &BoolRing) -> Result<GroupEndo> {
    Ok(delta_adjoint(&phi(s, ring)?.as_group_endo()))
}

/// The evaluation functional `δ_y(χ) = χ(y)`.
pub fn delta_eval(ring: &BoolRing, y: usize) -> Result<Functional> {
    if y >= ring.atoms() {
        return Err(Error::OutOfRange {
            index: y,
            size: ring.atoms(),
        });
    }
    Ok(Functional(ring.atom(y)))
}

/// A subbasic entourage indexed by a clopen set `χ = χ_A`, read on each of
/// the three monoids it lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EntourageChi {
    pub chi: u64,
}

impl EntourageChi {
    pub fn new(ring: &BoolRing, chi: u64) -> Result<Self> {
        if !ring.contains(chi) {
            return Err(Error::OutOfRange {
                index: chi as usize,
                size: ring.cardinality() as usize,
            });
        }
        Ok(EntourageChi { chi })
    }

    /// `[χ]₁` on `C(Y, Y)`: `s₁⁻¹(A) = s₂⁻¹(A)`.
    pub fn relates_self_maps(&self, s1: &SelfMap, s2: &SelfMap) -> bool {
        s1.preimage_mask(self.chi) == s2.preimage_mask(self.chi)
    }

    /// `[χ]₂` on `End_R(B)`: `s₁*(χ) = s₂*(χ)`.
    pub fn relates_ring_endos(&self, e1: &RingEndo, e2: &RingEndo) -> bool {
        e1.apply(self.chi) == e2.apply(self.chi)
    }

    /// `[χ]₃` on `End(B*)`: `(τ₁ψ)(χ) = (τ₂ψ)(χ)` for every `ψ ∈ B*`,
    /// quantifying over the whole dual group.
    pub fn relates_dual_endos(&self, ring: &BoolRing, t1: &GroupEndo, t2: &GroupEndo) -> bool {
        pontryagin_dual(ring).functionals().all(|psi| {
            Functional(t1.apply(psi.0)).eval(self.chi) == Functional(t2.apply(psi.0)).eval(self.chi)
        })
    }
}

/// Membership of `(s₁, s₂)` in `[χ]₁`, of `(Φs₁, Φs₂)` in `[χ]₂` and of
/// `(ΔΦs₁, ΔΦs₂)` in `[χ]₃`. The three flags always agree.
pub fn entourage_transport(
    ring: &BoolRing,
    chi: u64,
    s1: &SelfMap,
    s2: &SelfMap,
) -> Result<(bool, bool, bool)> {
    let ent = EntourageChi::new(ring, chi)?;
    let (e1, e2) = (phi(s1, ring)?, phi(s2, ring)?);
    let (d1, d2) = (
        delta_adjoint(&e1.as_group_endo()),
        delta_adjoint(&e2.as_group_endo()),
    );
    Ok((
        ent.relates_self_maps(s1, s2),
        ent.relates_ring_endos(&e1, &e2),
        ent.relates_dual_endos(ring, &d1, &d2),
    ))
}
