//! Pivoting for an abelian set of automorphisms acting on a finite group:
//! either `(X_2(W))_6` is large or `(X(W))_8` is the whole invariant
//! subgroup generated by `W`.
//!
//! Automorphisms are stored as permutation tables on the element list of the
//! group. `X_k` is the `k`-fold product set of `X ∪ X^-1 ∪ {id}`, `X(W)` is
//! `{x(w)}` and `(S)_k` is the usual product set in the group.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::AlgebraError;
use crate::group::Group;
use crate::matrix::GroupElement;
use crate::set::ElementSet;
use crate::setcalc::{avoiding_subset_by, product_set, Ratio, SetCalcError};

type Table = Vec<u32>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PivotError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    SetCalc(#[from] SetCalcError),
    #[error("automorphism {0} is not an automorphism of the group")]
    NotAutomorphism(usize),
    #[error("automorphisms {0} and {1} do not commute")]
    NotAbelian(usize, usize),
    #[error("{0} is empty")]
    Empty(&'static str),
    #[error("W is not contained in the group")]
    NotInGroup,
    #[error("no automorphism with index {0}")]
    BadIndex(usize),
    #[error("neither branch could be certified: {0}")]
    Unresolved(String),
}

/// An automorphism given by conjugation `g -> c g c^-1` or by an explicit
/// table on the group's element indices.
#[derive(Clone, Debug)]
pub enum Automorphism {
    Conjugation(GroupElement),
    Table(Vec<usize>),
}

/// A finite group together with a commuting family of automorphisms.
#[derive(Clone, Debug)]
pub struct ActionCtx {
    group: Group,
    tables: Vec<Table>,
    identity: u32,
}

impl ActionCtx {
    pub fn new(group: Group, autos: Vec<Automorphism>) -> Result<Self, PivotError> {
        let elems = group.elements();
        let n = elems.len();
        let mut tables = Vec::with_capacity(autos.len());
        for (k, a) in autos.into_iter().enumerate() {
            let t: Table = match a {
                Automorphism::Conjugation(c) => {
                    let mut t = Vec::with_capacity(n);
                    for g in elems.iter() {
                        let i = elems.index_of(&c.conj(g)).ok_or(PivotError::NotAutomorphism(k))?;
                        t.push(i as u32);
                    }
                    t
                }
                Automorphism::Table(t) => {
                    if t.len() != n || t.iter().any(|&i| i >= n) {
                        return Err(PivotError::NotAutomorphism(k));
                    }
                    t.into_iter().map(|i| i as u32).collect()
                }
            };
            let mut seen = vec![false; n];
            for &i in &t {
                if std::mem::replace(&mut seen[i as usize], true) {
                    return Err(PivotError::NotAutomorphism(k));
                }
            }
            for s in group.gens() {
                let si = elems.index_of(s).unwrap();
                let ts = elems.get(t[si] as usize).unwrap();
                for (gi, g) in elems.iter().enumerate() {
                    let prod = elems.index_of(&g.mul_unchecked(s)).unwrap();
                    let img = elems.get(t[gi] as usize).unwrap().mul_unchecked(ts);
                    if elems.get(t[prod] as usize).unwrap() != &img {
                        return Err(PivotError::NotAutomorphism(k));
                    }
                }
            }
            tables.push(t);
        }
        for i in 0..tables.len() {
            for j in i + 1..tables.len() {
                if compose(&tables[i], &tables[j]) != compose(&tables[j], &tables[i]) {
                    return Err(PivotError::NotAbelian(i, j));
                }
            }
        }
        let identity = elems.index_of(&elems.identity_element()).unwrap() as u32;
        Ok(ActionCtx { group, tables, identity })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }
    pub fn len(&self) -> usize {
        self.tables.len()
    }
    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    fn elem(&self, i: u32) -> &GroupElement {
        self.group.elements().get(i as usize).unwrap()
    }
    fn index(&self, g: &GroupElement) -> u32 {
        self.group.elements().index_of(g).expect("element of the group") as u32
    }
    fn mul(&self, a: u32, b: u32) -> u32 {
        self.index(&self.elem(a).mul_unchecked(self.elem(b)))
    }
    fn inv(&self, a: u32) -> u32 {
        self.index(&self.elem(a).inv())
    }

    fn has_nontrivial_fixed_point(&self, t: &Table) -> bool {
        t.iter().enumerate().any(|(i, &j)| i as u32 == j && j != self.identity)
    }

    fn tables_of(&self, x: &[usize]) -> Result<Vec<Table>, PivotError> {
        let mut out: Vec<Table> = Vec::new();
        for &i in x {
            let t = self.tables.get(i).ok_or(PivotError::BadIndex(i))?;
            if !out.contains(t) {
                out.push(t.clone());
            }
        }
        Ok(out)
    }

    fn image(&self, tables: &[Table], w: &[u32]) -> ElementSet {
        let mut out = ElementSet::new(self.group.ctx(), self.group.dim());
        for t in tables {
            for &g in w {
                out.insert(self.elem(t[g as usize]).clone());
            }
        }
        out
    }
}

/// `a ∘ b`.
fn compose(a: &Table, b: &Table) -> Table {
    b.iter().map(|&i| a[i as usize]).collect()
}

fn invert(a: &Table) -> Table {
    let mut out = vec![0; a.len()];
    for (i, &j) in a.iter().enumerate() {
        out[j as usize] = i as u32;
    }
    out
}

fn identity_table(n: usize) -> Table {
    (0..n as u32).collect()
}

/// `X_2`: products of two elements of `X ∪ X^-1 ∪ {id}`.
fn x_two(x: &[Table], n: usize) -> Vec<Table> {
    let mut step: Vec<Table> = vec![identity_table(n)];
    for t in x {
        for c in [t.clone(), invert(t)] {
            if !step.contains(&c) {
                step.push(c);
            }
        }
    }
    let mut out: Vec<Table> = Vec::new();
    let mut seen = HashSet::new();
    for a in &step {
        for b in &step {
            let c = compose(a, b);
            if seen.insert(c.clone()) {
                out.push(c);
            }
        }
    }
    out
}

/// Number of `y` in `X^-1 X` fixing some non-identity element.
pub fn fixed_point_count(ctx: &ActionCtx, x: &[usize]) -> Result<usize, PivotError> {
    let xs = ctx.tables_of(x)?;
    let mut ratios = HashSet::new();
    for a in &xs {
        let ai = invert(a);
        for b in &xs {
            ratios.insert(compose(&ai, b));
        }
    }
    Ok(ratios.iter().filter(|t| ctx.has_nontrivial_fixed_point(t)).count())
}

/// Whether `g -> a(g) b(g)^-1` is injective on the group.
pub fn twisted_map_injective(ctx: &ActionCtx, a: usize, b: usize) -> Result<bool, PivotError> {
    let ta = ctx.tables.get(a).ok_or(PivotError::BadIndex(a))?;
    let tb = ctx.tables.get(b).ok_or(PivotError::BadIndex(b))?;
    let n = ta.len();
    let mut seen = HashSet::with_capacity(n);
    for g in 0..n {
        let v = ctx.mul(ta[g], ctx.inv(tb[g]));
        if !seen.insert(v) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// `|(X_2(W))_6| >= (|X|/x)|W|`.
    Growth,
    /// `(X(W))_8 = <<X>(<W>)>`.
    FullGroup,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PivotCase {
    /// A pivot in `W`.
    Case0,
    /// `ξ` not a pivot, `aξ` a pivot for some `a` in `W`.
    Case1a,
    /// `ξ` not a pivot, `y(ξ)` a pivot for some `y` in `X`.
    Case1b,
    /// No pivot in the invariant subgroup.
    Case2,
    /// The constructive route did not certify; both sets were measured directly.
    BruteForce,
}

/// A collision `g_1 γ_1(ξ) = g_2 γ_2(ξ)` with `γ_1^-1 γ_2` fixed-point-free.
#[derive(Clone, Copy, Debug)]
struct Collision {
    g1: u32,
    g2: u32,
    gamma1: usize,
    gamma2: usize,
}

#[derive(Clone, Debug)]
pub struct PivotOutcome {
    pub branch: Branch,
    pub case: PivotCase,
    pub x_size: usize,
    /// Fixed-point count `x`.
    pub x: usize,
    pub y_size: usize,
    pub w_size: usize,
    /// `|<<X>(<W>)>|`.
    pub group_order: usize,
    pub pivot: Option<GroupElement>,
    /// Set built from the pivot (or `ξ_0` in Case 2), of size `|Y||W|`, or
    /// more than half the group in Case 2.
    pub witness: ElementSet,
    /// `(X_2(W))_6` for growth, `(X(W))_8` for the full-group branch.
    pub measured: ElementSet,
    /// `|Y||W| >= |<<X>(<W>)>|`, recorded whenever Case 2 is entered.
    pub counting_bound: Option<bool>,
    /// Set when the pivot frontier search was cut off before exhausting the group.
    pub frontier_capped: bool,
}

impl PivotOutcome {
    /// `(|X|/x)|W|`, or `None` when `x = 0`.
    pub fn growth_bound(&self) -> Option<Ratio> {
        (self.x > 0).then(|| Ratio::new((self.x_size * self.w_size) as u64, self.x as u64))
    }

    /// Rechecks the cardinality claim of the branch from the stored sets.
    pub fn verify(&self, ctx: &ActionCtx, x: &[usize], w: &ElementSet) -> Result<bool, PivotError> {
        let wi = w_indices(ctx, w)?;
        let xs = ctx.tables_of(x)?;
        let n = ctx.group.order();
        Ok(match self.branch {
            Branch::Growth => {
                let s = ctx.image(&x_two(&xs, n), &wi);
                let m = product_set(&s, 6, n.max(1))?;
                m == self.measured
                    && self.witness.is_subset(&m)
                    && m.len() * self.x >= self.x_size * self.w_size
            }
            Branch::FullGroup => {
                let h = invariant_closure(ctx, &xs, &wi)?;
                let s = ctx.image(&xs, &wi);
                let m = product_set(&s, 8, n.max(1))?;
                m == self.measured && m == *h.elements()
            }
        })
    }
}

fn w_indices(ctx: &ActionCtx, w: &ElementSet) -> Result<Vec<u32>, PivotError> {
    let mut out: Vec<u32> = w
        .iter()
        .map(|g| ctx.group.elements().index_of(g).map(|i| i as u32).ok_or(PivotError::NotInGroup))
        .collect::<Result<_, _>>()?;
    out.sort_by(|a, b| ctx.elem(*a).cmp(ctx.elem(*b)));
    out.dedup();
    Ok(out)
}

/// The smallest `X`-invariant subgroup containing `W`.
fn invariant_closure(ctx: &ActionCtx, xs: &[Table], w: &[u32]) -> Result<Group, PivotError> {
    let (k, r) = (ctx.group.ctx(), ctx.group.dim());
    let cap = ctx.group.order().max(1);
    let mut h = Group::generate(k, r, w.iter().map(|&i| ctx.elem(i).clone()).collect(), cap)?;
    loop {
        let mut grew = false;
        let gens = h.gens().to_vec();
        for t in xs {
            for g in &gens {
                let img = ctx.elem(t[ctx.index(g) as usize]).clone();
                if !h.contains(&img) {
                    h.adjoin(img, cap)?;
                    grew = true;
                }
            }
        }
        if !grew {
            return Ok(h);
        }
    }
}

struct Pivoter<'a> {
    ctx: &'a ActionCtx,
    xs: Vec<Table>,
    w: Vec<u32>,
    y: Vec<usize>,
    /// `fpf[i][j]`: `γ_i^-1 γ_j` has no fixed point besides the identity.
    fpf: Vec<Vec<bool>>,
}

impl<'a> Pivoter<'a> {
    fn apply(&self, gamma: usize, g: u32) -> u32 {
        self.xs[gamma][g as usize]
    }

    /// `None` if `ξ` is a pivot, otherwise a witnessing collision.
    fn collision(&self, xi: u32) -> Option<Collision> {
        let mut buckets: HashMap<u32, Vec<(u32, usize)>> = HashMap::new();
        for gamma in 0..self.xs.len() {
            let img = self.apply(gamma, xi);
            for &g in &self.w {
                buckets.entry(self.ctx.mul(g, img)).or_default().push((g, gamma));
            }
        }
        let mut keys: Vec<&u32> = buckets.keys().collect();
        keys.sort();
        for k in keys {
            let b = &buckets[k];
            for &(g1, gamma1) in b {
                for &(g2, gamma2) in b {
                    if self.fpf[gamma1][gamma2] {
                        return Some(Collision { g1, g2, gamma1, gamma2 });
                    }
                }
            }
        }
        None
    }

    /// `φ_ξ(W, Y)`; its size is `|Y||W|` exactly when `φ_ξ` is injective there.
    fn phi(&self, xi: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.y.len() * self.w.len());
        for &gamma in &self.y {
            let img = self.apply(gamma, xi);
            for &g in &self.w {
                out.push(self.ctx.mul(g, img));
            }
        }
        out
    }

    /// `x -> γ_1(x) γ_2(x)^-1`.
    fn twist(&self, c: &Collision, x: u32) -> u32 {
        self.ctx.mul(self.apply(c.gamma1, x), self.ctx.inv(self.apply(c.gamma2, x)))
    }

    /// Applies the twist of `c` to `φ_ξ(W, Y)` and checks each image against
    /// the closed form built by `closed(g, γ)`.
    fn twisted_witness(
        &self,
        c: &Collision,
        xi: u32,
        closed: impl Fn(u32, usize) -> u32,
    ) -> Result<ElementSet, PivotError> {
        let ctx = self.ctx;
        let mut out = ElementSet::new(ctx.group.ctx(), ctx.group.dim());
        for &gamma in &self.y {
            let img = self.apply(gamma, xi);
            for &g in &self.w {
                let direct = self.twist(c, ctx.mul(g, img));
                if direct != closed(g, gamma) {
                    return Err(PivotError::Unresolved("twisted image differs from its closed form".into()));
                }
                out.insert(ctx.elem(direct).clone());
            }
        }
        Ok(out)
    }
}

/// Runs the case analysis for `X` (indices into the action's automorphisms)
/// and `W ⊆ G`. Every returned witness has been recomputed directly.
pub fn run_pivot(ctx: &ActionCtx, x: &[usize], w: &ElementSet) -> Result<PivotOutcome, PivotError> {
    if x.is_empty() {
        return Err(PivotError::Empty("X"));
    }
    if w.is_empty() {
        return Err(PivotError::Empty("W"));
    }
    let wi = w_indices(ctx, w)?;
    let xs = ctx.tables_of(x)?;
    let n = ctx.group.order();
    let fpf: Vec<Vec<bool>> = xs
        .iter()
        .map(|a| {
            let ai = invert(a);
            xs.iter().map(|b| !ctx.has_nontrivial_fixed_point(&compose(&ai, b))).collect()
        })
        .collect();
    let y = avoiding_subset_by(&xs, |a, b| ctx.has_nontrivial_fixed_point(&compose(&invert(a), b)));
    let x_count = fixed_point_count(ctx, x)?;
    let h = invariant_closure(ctx, &xs, &wi)?;
    let pv = Pivoter { ctx, xs, w: wi, y, fpf };
    let x2 = x_two(&pv.xs, n);

    let growth_set =
        || -> Result<ElementSet, PivotError> { Ok(product_set(&ctx.image(&x2, &pv.w), 6, n.max(1))?) };
    let full_set =
        || -> Result<ElementSet, PivotError> { Ok(product_set(&ctx.image(&pv.xs, &pv.w), 8, n.max(1))?) };
    let base = |branch, case, pivot: Option<u32>, witness, measured| PivotOutcome {
        branch,
        case,
        x_size: pv.xs.len(),
        x: x_count,
        y_size: pv.y.len(),
        w_size: pv.w.len(),
        group_order: h.order(),
        pivot: pivot.map(|i| ctx.elem(i).clone()),
        witness,
        measured,
        counting_bound: None,
        frontier_capped: false,
    };
    let target = pv.y.len() * pv.w.len();
    let finish_growth = |case, pivot, witness: ElementSet| -> Result<PivotOutcome, PivotError> {
        let measured = growth_set()?;
        if witness.len() != target || !witness.is_subset(&measured) {
            return Err(PivotError::Unresolved(format!(
                "{case:?} witness has {} elements, expected {target} inside (X_2(W))_6",
                witness.len()
            )));
        }
        Ok(base(Branch::Growth, case, Some(pivot), witness, measured))
    };

    let mut cache: HashMap<u32, Option<Collision>> = HashMap::new();
    let mut collision = |xi: u32| *cache.entry(xi).or_insert_with(|| pv.collision(xi));

    // Case 0.
    for &xi in &pv.w {
        if collision(xi).is_none() {
            let mut witness = ElementSet::new(ctx.group.ctx(), ctx.group.dim());
            for v in pv.phi(xi) {
                witness.insert(ctx.elem(v).clone());
            }
            return finish_growth(PivotCase::Case0, xi, witness);
        }
    }

    // Cases 1a and 1b: breadth-first from W along ξ -> aξ and ξ -> y(ξ).
    // Every vertex reached is a non-pivot, and the search reaches all of
    // <<X>(<W>)>, so it finds a pivot whenever one exists there.
    let mut seen: HashSet<u32> = pv.w.iter().copied().collect();
    let mut queue: VecDeque<u32> = pv.w.iter().copied().collect();
    while let Some(xi) = queue.pop_front() {
        let c = collision(xi).expect("queued vertices are non-pivots");
        let d = ctx.mul(ctx.inv(c.g1), c.g2);
        for &a in &pv.w {
            let next = ctx.mul(a, xi);
            if collision(next).is_none() {
                let ga1 = pv.apply(c.gamma1, a);
                let ga2_inv = ctx.inv(pv.apply(c.gamma2, a));
                let witness = pv.twisted_witness(&c, next, |g, gamma| {
                    let parts = [
                        pv.apply(c.gamma1, g),
                        pv.apply(gamma, ga1),
                        pv.apply(gamma, d),
                        pv.apply(gamma, ga2_inv),
                        ctx.inv(pv.apply(c.gamma2, g)),
                    ];
                    parts.into_iter().reduce(|u, v| ctx.mul(u, v)).unwrap()
                })?;
                return finish_growth(PivotCase::Case1a, next, witness);
            }
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
        for yi in 0..pv.xs.len() {
            let next = pv.apply(yi, xi);
            if collision(next).is_none() {
                let yd = pv.apply(yi, d);
                let witness = pv.twisted_witness(&c, next, |g, gamma| {
                    let parts = [pv.apply(c.gamma1, g), pv.apply(gamma, yd), ctx.inv(pv.apply(c.gamma2, g))];
                    parts.into_iter().reduce(|u, v| ctx.mul(u, v)).unwrap()
                })?;
                return finish_growth(PivotCase::Case1b, next, witness);
            }
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    if seen.len() != h.order() {
        return Err(PivotError::Unresolved(format!(
            "frontier reached {} of {} elements",
            seen.len(),
            h.order()
        )));
    }

    // Case 2: ξ_0 with the fewest nontrivial collisions over W×W×Y×Y.
    let r_size = |xi: u32| -> usize {
        let mut counts: HashMap<u32, Vec<usize>> = HashMap::new();
        for &gamma in &pv.y {
            let img = pv.apply(gamma, xi);
            for &g in &pv.w {
                counts.entry(ctx.mul(g, img)).or_default().push(gamma);
            }
        }
        counts.values().map(|v| v.iter().map(|a| v.iter().filter(|b| *b != a).count()).sum::<usize>()).sum()
    };
    let mut elems: Vec<u32> = h.elements().iter().map(|g| ctx.index(g)).collect();
    elems.sort_by(|a, b| ctx.elem(*a).cmp(ctx.elem(*b)));
    let xi0 = elems.into_iter().min_by_key(|&xi| r_size(xi)).unwrap();
    let c = collision(xi0).expect("no pivots in Case 2");
    let d = ctx.mul(ctx.inv(c.g1), c.g2);
    let witness = pv.twisted_witness(&c, xi0, |g, gamma| {
        let parts = [pv.apply(c.gamma1, g), pv.apply(gamma, d), ctx.inv(pv.apply(c.gamma2, g))];
        parts.into_iter().reduce(|u, v| ctx.mul(u, v)).unwrap()
    })?;
    let counting = target >= h.order();
    let measured = full_set()?;
    let phi_size = pv.phi(xi0).into_iter().collect::<HashSet<_>>().len();
    let certified = witness.len() == phi_size
        && 2 * witness.len() > h.order()
        && witness.is_subset(h.elements())
        && measured == *h.elements();
    if certified {
        let mut out = base(Branch::FullGroup, PivotCase::Case2, Some(xi0), witness, measured);
        out.counting_bound = Some(counting);
        return Ok(out);
    }
    if measured == *h.elements() {
        let mut out = base(Branch::FullGroup, PivotCase::BruteForce, None, witness, measured);
        out.counting_bound = Some(counting);
        return Ok(out);
    }
    let grown = growth_set()?;
    if grown.len() * x_count >= pv.xs.len() * pv.w.len() {
        let mut out = base(Branch::Growth, PivotCase::BruteForce, None, witness, grown);
        out.counting_bound = Some(counting);
        return Ok(out);
    }
    Err(PivotError::Unresolved(format!(
        "|(X_2(W))_6| = {}, |(X(W))_8| = {}, |<<X>(<W>)>| = {}",
        grown.len(),
        measured.len(),
        h.order()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldCtx;
    use crate::set::DEFAULT_CAP;

    /// `(F_p, +)` as `{[[1,a],[0,1]]}`, with multiplication by `c` realised
    /// as conjugation by `diag(c, 1)`.
    fn additive(p: u32) -> (FieldCtx, ActionCtx) {
        let k = FieldCtx::prime(p).unwrap();
        let g =
            Group::generate(&k, 2, vec![GroupElement::transvection(&k, 2, 0, 1, 1)], DEFAULT_CAP).unwrap();
        let autos =
            (1..p).map(|c| Automorphism::Conjugation(GroupElement::diagonal(&k, &[c, 1]).unwrap())).collect();
        (k.clone(), ActionCtx::new(g, autos).unwrap())
    }

    fn point(k: &FieldCtx, a: u32) -> GroupElement {
        GroupElement::transvection(k, 2, 0, 1, a)
    }

    #[test]
    fn fixed_points_on_f5() {
        let (_, ctx) = additive(5);
        // Index c-1 is multiplication by c.
        assert_eq!(fixed_point_count(&ctx, &[0]).unwrap(), 1);
        assert_eq!(fixed_point_count(&ctx, &[1, 2]).unwrap(), 1);
        assert!(twisted_map_injective(&ctx, 1, 2).unwrap());
        assert!(!twisted_map_injective(&ctx, 1, 1).unwrap());
    }

    #[test]
    fn f5_units_cover_the_line() {
        let (k, ctx) = additive(5);
        let w = ElementSet::from_vec(vec![point(&k, 1)]).unwrap();
        let out = run_pivot(&ctx, &[1, 2], &w).unwrap();
        // 1 is already a pivot, so Case 0 fires; the full-group identity holds as well.
        assert_eq!((out.branch, out.case), (Branch::Growth, PivotCase::Case0));
        assert_eq!((out.x, out.y_size, out.measured.len()), (1, 2, 5));
        assert!(out.verify(&ctx, &[1, 2], &w).unwrap());
        let full =
            product_set(&ctx.image(&ctx.tables_of(&[1, 2]).unwrap(), &[ctx.index(&point(&k, 1))]), 8, 5)
                .unwrap();
        assert_eq!(full.len(), 5);
        assert_eq!(out.group_order, 5);
    }

    #[test]
    fn trivial_group_gives_full_branch() {
        let k = FieldCtx::prime(5).unwrap();
        let ctx = ActionCtx::new(Group::trivial(&k, 2), vec![Automorphism::Table(vec![0])]).unwrap();
        let w = ElementSet::identity(&k, 2);
        let out = run_pivot(&ctx, &[0], &w).unwrap();
        assert_eq!(out.branch, Branch::FullGroup);
        assert_eq!(out.measured.len(), 1);
        assert!(out.verify(&ctx, &[0], &w).unwrap());
    }

    #[test]
    fn growth_branch_on_f7_squared() {
        // (F_7)^2 as {I + aE13 + bE23} in GL_3, scalars acting by conjugation
        // with diag(c, c, 1).
        let k = FieldCtx::prime(7).unwrap();
        let g = Group::generate(
            &k,
            3,
            vec![GroupElement::transvection(&k, 3, 0, 2, 1), GroupElement::transvection(&k, 3, 1, 2, 1)],
            DEFAULT_CAP,
        )
        .unwrap();
        let autos = (1..7)
            .map(|c| Automorphism::Conjugation(GroupElement::diagonal(&k, &[c, c, 1]).unwrap()))
            .collect();
        let ctx = ActionCtx::new(g, autos).unwrap();
        let w = ElementSet::from_vec(vec![
            GroupElement::transvection(&k, 3, 0, 2, 1),
            GroupElement::transvection(&k, 3, 1, 2, 1),
        ])
        .unwrap();
        let x = [0, 1, 2];
        let out = run_pivot(&ctx, &x, &w).unwrap();
        assert_eq!(out.branch, Branch::Growth);
        assert!(out.measured.len() * out.x >= out.x_size * out.w_size);
        assert!(out.verify(&ctx, &x, &w).unwrap());
    }

    /// `(F_p)^2` as `{I + aE13 + bE23}` with every `diag(c, d)` acting; index
    /// `(c-1)(p-1) + (d-1)`.
    fn plane(p: u32) -> (FieldCtx, ActionCtx) {
        let k = FieldCtx::prime(p).unwrap();
        let g = Group::generate(
            &k,
            3,
            vec![GroupElement::transvection(&k, 3, 0, 2, 1), GroupElement::transvection(&k, 3, 1, 2, 1)],
            DEFAULT_CAP,
        )
        .unwrap();
        let mut autos = Vec::new();
        for c in 1..p {
            for d in 1..p {
                autos.push(Automorphism::Conjugation(GroupElement::diagonal(&k, &[c, d, 1]).unwrap()));
            }
        }
        (k.clone(), ActionCtx::new(g, autos).unwrap())
    }

    fn plane_point(k: &FieldCtx, a: u32, b: u32) -> GroupElement {
        GroupElement::transvection(k, 3, 0, 2, a).mul_unchecked(&GroupElement::transvection(k, 3, 1, 2, b))
    }

    #[test]
    fn case_one_a_on_f7_squared() {
        // Scalars 1, 2, 3 acting on F_7^2; W = {0, (0,1)}. Neither point of W
        // is a pivot but a translate is.
        let (k, ctx) = plane(7);
        let x = [0, 7, 14];
        let w = ElementSet::from_vec(vec![plane_point(&k, 0, 0), plane_point(&k, 0, 1)]).unwrap();
        let out = run_pivot(&ctx, &x, &w).unwrap();
        assert_eq!((out.branch, out.case), (Branch::Growth, PivotCase::Case1a));
        assert_eq!(out.witness.len(), out.y_size * out.w_size);
        assert!(out.measured.len() * out.x >= out.x_size * out.w_size);
        assert!(out.verify(&ctx, &x, &w).unwrap());
    }

    #[test]
    fn case_two_without_the_counting_bound() {
        // No element of F_5^2 is a pivot, yet |Y||W| = 16 < 25. The half-size
        // witness still exists here, so the full-group branch is certified.
        let (k, ctx) = plane(5);
        let x = [10, 1, 12, 7];
        let w = ElementSet::from_vec(
            [(4, 4), (1, 4), (0, 0), (0, 1)].iter().map(|&(a, b)| plane_point(&k, a, b)).collect(),
        )
        .unwrap();
        let out = run_pivot(&ctx, &x, &w).unwrap();
        assert_eq!((out.branch, out.case), (Branch::FullGroup, PivotCase::Case2));
        assert_eq!((out.x, out.y_size, out.w_size, out.group_order), (1, 4, 4, 25));
        assert_eq!(out.counting_bound, Some(false));
        assert!(out.verify(&ctx, &x, &w).unwrap());
    }

    #[test]
    fn rejects_non_commuting_and_empty() {
        let (k, ctx) = additive(5);
        assert_eq!(run_pivot(&ctx, &[], &ElementSet::identity(&k, 2)).unwrap_err(), PivotError::Empty("X"));
        assert_eq!(run_pivot(&ctx, &[0], &ElementSet::new(&k, 2)).unwrap_err(), PivotError::Empty("W"));
        let u = crate::families::unitriangular(&k, 3);
        let a = Automorphism::Conjugation(GroupElement::diagonal(&k, &[2, 1, 1]).unwrap());
        let b = Automorphism::Conjugation(GroupElement::transvection(&k, 3, 0, 1, 1));
        assert!(matches!(ActionCtx::new(u, vec![a, b]), Err(PivotError::NotAbelian(0, 1))));
    }
}
