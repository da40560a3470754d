//! Fixed inputs shared by the benchmarks.

use solvable_growth::families::{borel, random_borel_subset, random_subgroup_set, torus_tts, unitriangular};
use solvable_growth::{ElementSet, FieldCtx, GroupElement, SplitMix64};

pub fn field(p: u32) -> FieldCtx {
    FieldCtx::prime(p).unwrap()
}

/// A seeded Borel subset of `GL_r(F_p)` containing the identity.
pub fn borel_subset(p: u32, r: usize, size: usize, seed: u64) -> ElementSet {
    let k = field(p);
    let mut a = random_borel_subset(&k, r, size, &mut SplitMix64::new(seed));
    a.insert(GroupElement::identity(&k, r));
    a
}

/// The elements of a seeded random subgroup of order at most `max_order`.
pub fn subgroup_set(p: u32, r: usize, max_order: usize, seed: u64) -> ElementSet {
    random_subgroup_set(&field(p), r, 2, max_order, &mut SplitMix64::new(seed))
}

/// Generators of the Borel of `GL_r(F_p)`.
pub fn borel_generators(p: u32, r: usize) -> ElementSet {
    let b = borel(&field(p), r);
    ElementSet::from_vec(b.gens().to_vec()).unwrap()
}

/// `U_3(F_p)` together with the generators of `{diag(t, t, s)}`.
pub fn tts_set(p: u32) -> ElementSet {
    let k = field(p);
    let mut a = unitriangular(&k, 3).elements().clone();
    for g in torus_tts(&k).gens() {
        a.insert(g.clone());
    }
    a
}
