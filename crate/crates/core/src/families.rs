//! Standard subgroups of the upper-triangular Borel, built from small generating sets.

use crate::field::FieldCtx;
use crate::group::Group;
use crate::matrix::{GroupElement, Matrix};
use crate::rng::SplitMix64;
use crate::set::{ElementSet, DEFAULT_CAP};

/// Generators `I + E_{i,i+1}` (and their scalar multiples by a field
/// generator when `a > 1`) of the unitriangular group.
pub fn unitriangular_gens(ctx: &FieldCtx, r: usize) -> Vec<GroupElement> {
    let mut gens = Vec::new();
    for i in 0..r.saturating_sub(1) {
        let mut c = 1u32;
        for _ in 0..ctx.a() {
            gens.push(GroupElement::transvection(ctx, r, i, i + 1, c));
            c = ctx.mul(c, ctx.generator());
        }
    }
    gens
}

pub fn unitriangular(ctx: &FieldCtx, r: usize) -> Group {
    Group::generate(ctx, r, unitriangular_gens(ctx, r), DEFAULT_CAP).expect("fits the default cap")
}

/// `diag(1,..,g,..,1)` for a primitive `g` in each slot.
pub fn diagonal_torus_gens(ctx: &FieldCtx, r: usize) -> Vec<GroupElement> {
    (0..r)
        .map(|i| {
            let mut d = vec![1u32; r];
            d[i] = ctx.generator();
            GroupElement::diagonal(ctx, &d).unwrap()
        })
        .collect()
}

pub fn diagonal_torus(ctx: &FieldCtx, r: usize) -> Group {
    Group::generate(ctx, r, diagonal_torus_gens(ctx, r), DEFAULT_CAP).expect("fits the default cap")
}

/// Upper-triangular invertible matrices.
pub fn borel(ctx: &FieldCtx, r: usize) -> Group {
    let mut gens = diagonal_torus_gens(ctx, r);
    gens.extend(unitriangular_gens(ctx, r));
    Group::generate(ctx, r, gens, DEFAULT_CAP).expect("fits the default cap")
}

/// The rank-two torus `{diag(t, t, s)}` in `GL_3`.
pub fn torus_tts(ctx: &FieldCtx) -> Group {
    let g = ctx.generator();
    let gens = vec![
        GroupElement::diagonal(ctx, &[g, g, 1]).unwrap(),
        GroupElement::diagonal(ctx, &[1, 1, g]).unwrap(),
    ];
    Group::generate(ctx, 3, gens, DEFAULT_CAP).unwrap()
}

/// Scalar matrices.
pub fn scalars(ctx: &FieldCtx, r: usize) -> Group {
    let g = ctx.generator();
    Group::generate(ctx, r, vec![GroupElement::diagonal(ctx, &vec![g; r]).unwrap()], DEFAULT_CAP).unwrap()
}

fn random_unitriangular(ctx: &FieldCtx, r: usize, rng: &mut SplitMix64) -> GroupElement {
    let mut m = Matrix::identity(ctx, r);
    for i in 0..r {
        for j in i + 1..r {
            if rng.below(2) == 0 {
                m.set(i, j, rng.below(ctx.order() as u64) as u32);
            }
        }
    }
    GroupElement::new(m).unwrap()
}

/// A seeded random subset of a conjugate of `U·<t>` for one random diagonal `t`,
/// of the requested size unless that group is too small.
///
/// Elements are `u·t^e` with sparse random unitriangular `u`. The whole set is
/// conjugated by a random unitriangular matrix, so `<A>` is usually not split
/// by the diagonal.
pub fn random_borel_subset(ctx: &FieldCtx, r: usize, size: usize, rng: &mut SplitMix64) -> ElementSet {
    let q = ctx.order() as u64;
    let diag: Vec<u32> = (0..r).map(|_| 1 + rng.below(q - 1) as u32).collect();
    let t = GroupElement::diagonal(ctx, &diag).unwrap();
    let ord = t.order() as i64;
    let g = random_unitriangular(ctx, r, rng);
    let mut a = ElementSet::new(ctx, r);
    for _ in 0..size * 64 {
        if a.len() >= size {
            break;
        }
        let u = random_unitriangular(ctx, r, rng);
        let e = rng.below(ord as u64) as i64;
        a.insert(g.conj(&u.mul_unchecked(&t.pow(e))));
        if a.len() == 1 && size > 1 && rng.below(4) == 0 {
            a.insert(GroupElement::identity(ctx, r));
        }
    }
    a
}

/// The elements of the subgroup generated by a seeded `random_borel_subset`
/// of `gens` elements; the draw is repeated with fewer generators until the
/// subgroup has order at most `max_order`, ending at the trivial group.
pub fn random_subgroup_set(
    ctx: &FieldCtx,
    r: usize,
    gens: usize,
    max_order: usize,
    rng: &mut SplitMix64,
) -> ElementSet {
    for n in (1..=gens.max(1)).rev() {
        for _ in 0..4 {
            let a = random_borel_subset(ctx, r, n, rng);
            if let Ok(g) = Group::generate(ctx, r, a.to_vec(), max_order) {
                return g.elements().clone();
            }
        }
    }
    ElementSet::identity(ctx, r)
}

/// The union of `cosets` distinct left cosets `t_i H` of `h`, with `t_0 = 1`
/// and the other `t_i` random diagonal matrices. Stops early if fewer
/// distinct cosets turn up within a bounded number of draws.
pub fn coset_union(h: &Group, cosets: usize, rng: &mut SplitMix64) -> ElementSet {
    let (ctx, r) = (h.ctx(), h.dim());
    let q = ctx.order() as u64;
    let mut reps = vec![GroupElement::identity(ctx, r)];
    for _ in 0..cosets * 64 {
        if reps.len() >= cosets {
            break;
        }
        let diag: Vec<u32> = (0..r).map(|_| 1 + rng.below(q - 1) as u32).collect();
        let t = GroupElement::diagonal(ctx, &diag).unwrap();
        if reps.iter().all(|s| !h.contains(&s.inv().mul_unchecked(&t))) {
            reps.push(t);
        }
    }
    let mut a = ElementSet::new(ctx, r);
    for t in &reps {
        for x in h.elements().iter() {
            a.insert(t.mul_unchecked(x));
        }
    }
    a
}
