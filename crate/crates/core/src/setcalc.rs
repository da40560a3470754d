//! Product sets `A_k` and exact checks of the elementary growth inequalities.
//!
//! Every checker returns the cardinalities it measured alongside the verdict,
//! so a failing inequality can be read off the report directly.

use std::collections::HashSet;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::AlgebraError;
use crate::group::Group;
use crate::matrix::GroupElement;
use crate::set::{ElementSet, DEFAULT_CAP};

/// Default bound on `|G:H|` accepted by [`bounded_index_transfer`].
pub const DEFAULT_INDEX_BOUND: usize = 64;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SetCalcError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("k must be at least {min}, got {k}")]
    BadLength { k: usize, min: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("index {index} exceeds the bound {bound}")]
    IndexTooLarge { index: usize, bound: usize },
}

/// An exact nonnegative rational, reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        let g = gcd(num, den).max(1);
        Ratio { num: num / g, den: den / g }
    }
    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn big(n: usize) -> BigUint {
    BigUint::from(n)
}

/// `A_k = {g_1 ... g_k : g_i in A ∪ A^-1 ∪ {1}}` by frontier expansion.
pub fn product_set(a: &ElementSet, k: usize, cap: usize) -> Result<ElementSet, SetCalcError> {
    Ok(product_set_levels(a, k, cap)?.pop().unwrap())
}

/// `[A_1, A_2, ..., A_k]`, sharing the frontier work.
pub fn product_set_levels(a: &ElementSet, k: usize, cap: usize) -> Result<Vec<ElementSet>, SetCalcError> {
    if k == 0 {
        return Err(SetCalcError::BadLength { k, min: 1 });
    }
    let step = a.symmetrized();
    let mut cur = step.clone();
    let mut frontier: Vec<GroupElement> = cur.to_vec();
    let mut levels = vec![cur.clone()];
    for _ in 1..k {
        let mut next_frontier = Vec::new();
        for x in &frontier {
            for s in step.iter() {
                let y = x.mul_unchecked(s);
                if !cur.contains(&y) {
                    cur.insert(y.clone());
                    next_frontier.push(y);
                    if cur.len() > cap {
                        return Err(AlgebraError::Capacity { cap, partial: cur.len() }.into());
                    }
                }
            }
        }
        frontier = next_frontier;
        levels.push(cur.clone());
    }
    Ok(levels)
}

/// Plain triple product `A·A·A`.
pub fn triple_product(a: &ElementSet, cap: usize) -> Result<ElementSet, SetCalcError> {
    Ok(a.product(a, cap)?.product(a, cap)?)
}

/// Number of left cosets `xH` meeting `A`, with one representative per coset.
pub fn left_coset_reps(a: &ElementSet, h: &Group) -> Vec<GroupElement> {
    let mut seen: HashSet<GroupElement> = HashSet::new();
    let mut reps = Vec::new();
    for x in a.iter() {
        if seen.contains(x) {
            continue;
        }
        reps.push(x.clone());
        for y in h.elements().iter() {
            let z = x.mul_unchecked(y);
            if a.contains(&z) {
                seen.insert(z);
            }
        }
    }
    reps
}

pub fn left_coset_count(a: &ElementSet, h: &Group) -> usize {
    left_coset_reps(a, h).len()
}

/// Membership of `x` in the product set `S·N`.
pub fn in_product_with(x: &GroupElement, s: &ElementSet, n: &Group) -> bool {
    n.elements().iter().any(|y| s.contains(&x.mul_unchecked(&y.inv())))
}

/// `A^-1 A`.
pub fn quotient_set(a: &ElementSet, cap: usize) -> Result<ElementSet, SetCalcError> {
    Ok(a.inverses().product(a, cap)?)
}

/// `A A^-1`.
pub fn difference_set(a: &ElementSet, cap: usize) -> Result<ElementSet, SetCalcError> {
    Ok(a.product(&a.inverses(), cap)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriplingVerdict {
    pub k: usize,
    pub a: usize,
    pub aaa: usize,
    pub a3: usize,
    pub ak: usize,
    /// `|A_3|/|A| <= (3|AAA|/|A|)^3`.
    pub part1: bool,
    /// `|A_k|/|A| <= (|A_3|/|A|)^(k-2)`.
    pub part2: bool,
}

impl TriplingVerdict {
    pub fn holds(&self) -> bool {
        self.part1 && self.part2
    }
}

pub fn check_tripling(a: &ElementSet, k: usize, cap: usize) -> Result<TriplingVerdict, SetCalcError> {
    if k <= 2 {
        return Err(SetCalcError::BadLength { k, min: 3 });
    }
    if a.is_empty() {
        return Err(SetCalcError::Precondition("A is empty".into()));
    }
    let levels = product_set_levels(a, k, cap)?;
    let (n, a3, ak) = (a.len(), levels[2].len(), levels[k - 1].len());
    let aaa = triple_product(a, cap)?.len();
    // |A_3| |A|^2 <= 27 |AAA|^3
    let part1 = big(a3) * big(n).pow(2) <= big(27) * big(aaa).pow(3);
    // |A_k| |A|^(k-3) <= |A_3|^(k-2)
    let part2 = big(ak) * big(n).pow((k - 3) as u32) <= big(a3).pow((k - 2) as u32);
    Ok(TriplingVerdict { k, a: n, aaa, a3, ak, part1, part2 })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OlsonVerdict {
    pub a: usize,
    pub b: usize,
    pub ab: usize,
    pub group: usize,
    /// `|AB| >= min(|B| + |A|/2, |G|)`.
    pub holds: bool,
}

/// Checks `|AB| >= min(|B| + |A|/2, |G|)` for `1 ∈ A` generating `G`.
pub fn check_olson(
    a: &ElementSet,
    b: &ElementSet,
    g: &Group,
    cap: usize,
) -> Result<OlsonVerdict, SetCalcError> {
    if !a.contains_identity() {
        return Err(SetCalcError::Precondition("A must contain the identity".into()));
    }
    if b.is_empty() {
        return Err(SetCalcError::Precondition("B must be nonempty".into()));
    }
    let generated = Group::generate(a.ctx(), a.dim(), a.to_vec(), cap)?;
    if generated.order() != g.order() || !a.iter().all(|x| g.contains(x)) {
        return Err(SetCalcError::Precondition("A must generate G".into()));
    }
    let ab = a.product(b, cap)?.len();
    // 2|AB| >= min(2|B| + |A|, 2|G|)
    let holds = 2 * ab >= (2 * b.len() + a.len()).min(2 * g.order());
    Ok(OlsonVerdict { a: a.len(), b: b.len(), ab, group: g.order(), holds })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetReport {
    /// Number of left cosets of `H` meeting `A`.
    pub l: usize,
    pub a: usize,
    pub b: usize,
    pub ab: usize,
    pub b_cap_h: usize,
    /// `|AB| >= l |B ∩ H|`.
    pub left_coset_bound: bool,
    pub a_inv_a_cap_h: usize,
    /// `|A^-1 A ∩ H| >= |A| / l`.
    pub pigeonhole_bound: bool,
    pub k: usize,
    pub ak_cap_h: usize,
    pub ak1: usize,
    /// `|A_{k+1}| >= |A_k ∩ H| |A| / |A^-1 A ∩ H|`.
    pub subgroup_growth_bound: bool,
    /// For normal `H`: whether `A ⊆ B' a_1 ∪ ... ∪ B' a_l` with `B' = AA^-1 ∩ H`
    /// and one `a_i ∈ A` per coset.
    pub normal_cover: Option<bool>,
    /// Same with left translates `a_i B'`. Not implied by normality, since
    /// `a^-1 B' a` need not equal `B'`; kept for comparison.
    pub normal_cover_left: Option<bool>,
}

impl CosetReport {
    pub fn holds(&self) -> bool {
        self.left_coset_bound
            && self.pigeonhole_bound
            && self.subgroup_growth_bound
            && self.normal_cover.unwrap_or(true)
    }
}

/// The `l` elements `a_i` whose right translates `(AA^-1 ∩ H) a_i` cover `A`,
/// one per coset of normal `H`.
pub fn normal_cover(a: &ElementSet, h: &Group, cap: usize) -> Result<Vec<GroupElement>, SetCalcError> {
    if !h.is_normalized_by(&Group::generate(a.ctx(), a.dim(), a.to_vec(), cap)?) {
        return Err(AlgebraError::NotNormal.into());
    }
    Ok(left_coset_reps(a, h))
}

/// Evaluates the left-coset, pigeonhole and subgroup-growth bounds for `A`
/// against `H`, with `B` as the right factor and `k >= 2` for the growth bound.
pub fn coset_bounds(
    a: &ElementSet,
    b: &ElementSet,
    h: &Group,
    k: usize,
    cap: usize,
) -> Result<CosetReport, SetCalcError> {
    if a.is_empty() || b.is_empty() {
        return Err(SetCalcError::Precondition("A and B must be nonempty".into()));
    }
    if k < 2 {
        return Err(SetCalcError::BadLength { k, min: 2 });
    }
    let reps = left_coset_reps(a, h);
    let l = reps.len();
    let ab = a.product(b, cap)?.len();
    let b_cap_h = b.iter().filter(|x| h.contains(x)).count();
    let qa = quotient_set(a, cap)?;
    let a_inv_a_cap_h = qa.iter().filter(|x| h.contains(x)).count();
    let levels = product_set_levels(a, k + 1, cap)?;
    let ak_cap_h = levels[k - 1].iter().filter(|x| h.contains(x)).count();
    let ak1 = levels[k].len();
    let normal = a.iter().all(|x| h.gens().iter().all(|y| h.contains(&x.conj(y))));
    let (cover, cover_left) = if normal {
        let bb = difference_set(a, cap)?.filter(|x| h.contains(x));
        let right = a.iter().all(|x| reps.iter().any(|r| bb.contains(&x.mul_unchecked(&r.inv()))));
        let left = a.iter().all(|x| reps.iter().any(|r| bb.contains(&r.inv().mul_unchecked(x))));
        (Some(right), Some(left))
    } else {
        (None, None)
    };
    Ok(CosetReport {
        l,
        a: a.len(),
        b: b.len(),
        ab,
        b_cap_h,
        left_coset_bound: ab >= l * b_cap_h,
        a_inv_a_cap_h,
        pigeonhole_bound: a_inv_a_cap_h * l >= a.len(),
        k,
        ak_cap_h,
        ak1,
        subgroup_growth_bound: ak1 * a_inv_a_cap_h >= ak_cap_h * a.len(),
        normal_cover: cover,
        normal_cover_left: cover_left,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientGrowthVerdict {
    pub a1: usize,
    pub pi_a1: usize,
    pub pi_a1a2: usize,
    pub union4: usize,
    /// `|(A_1 ∪ A_2)_4| >= |π(A_1 A_2)| |A_1| / |π(A_1)|`.
    pub holds: bool,
}

fn check_normalized(sets: &[&ElementSet], n: &Group) -> Result<(), SetCalcError> {
    for s in sets {
        for x in s.iter() {
            if !n.gens().iter().all(|y| n.contains(&x.conj(y))) {
                return Err(AlgebraError::NotNormal.into());
            }
        }
    }
    Ok(())
}

pub fn quotient_growth(
    a1: &ElementSet,
    a2: &ElementSet,
    n: &Group,
    cap: usize,
) -> Result<QuotientGrowthVerdict, SetCalcError> {
    check_normalized(&[a1, a2], n)?;
    let pi_a1 = left_coset_count(a1, n);
    let prod = a1.product(a2, cap)?;
    let pi_a1a2 = left_coset_count(&prod, n);
    let union4 = product_set(&a1.union(a2), 4, cap)?.len();
    Ok(QuotientGrowthVerdict {
        a1: a1.len(),
        pi_a1,
        pi_a1a2,
        union4,
        holds: union4 * pi_a1 >= pi_a1a2 * a1.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuotientTransferVerdict {
    pub a: usize,
    /// `|AN/N|`.
    pub cosets_a: usize,
    /// `|AN/N ∩ RN/N|`.
    pub cosets_shared: usize,
    /// `|A_3 ∩ RN|`.
    pub a3_in_rn: usize,
    pub c: f64,
    pub premise: bool,
    pub conclusion: bool,
}

impl QuotientTransferVerdict {
    pub fn holds(&self) -> bool {
        !self.premise || self.conclusion
    }
}

/// If `|AN/N ∩ RN/N| >= |AN/N|/C` then `|A_3 ∩ RN| >= |A|/C`, for symmetric `R`.
pub fn quotient_transfer(
    a: &ElementSet,
    r: &ElementSet,
    n: &Group,
    c: f64,
    cap: usize,
) -> Result<QuotientTransferVerdict, SetCalcError> {
    if !r.iter().all(|x| r.contains(&x.inv())) {
        return Err(SetCalcError::Precondition("R must be symmetric".into()));
    }
    check_normalized(&[a, r], n)?;
    let reps = left_coset_reps(a, n);
    let shared = reps.iter().filter(|x| in_product_with(x, r, n)).count();
    let a3 = product_set(a, 3, cap)?;
    let a3_in_rn = a3.iter().filter(|x| in_product_with(x, r, n)).count();
    Ok(QuotientTransferVerdict {
        a: a.len(),
        cosets_a: reps.len(),
        cosets_shared: shared,
        a3_in_rn,
        c,
        premise: shared as f64 * c >= reps.len() as f64,
        conclusion: a3_in_rn as f64 * c >= a.len() as f64,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfCoverVerdict {
    pub a: usize,
    pub group: usize,
    pub applies: bool,
    pub aa_is_group: bool,
}

/// When `|A| > |G|/2`, checks `AA = G`.
pub fn half_size_cover(a: &ElementSet, g: &Group, cap: usize) -> Result<HalfCoverVerdict, SetCalcError> {
    let applies = 2 * a.len() > g.order();
    let aa = a.product(a, cap)?;
    Ok(HalfCoverVerdict {
        a: a.len(),
        group: g.order(),
        applies,
        aa_is_group: aa.len() == g.order() && g.elements().is_subset(&aa),
    })
}

/// Greedy selection behind the avoiding-subset bound: returns indices of a
/// subset `Y` such that `bad(y, y')` fails for distinct picks. `bad(x, y)`
/// must say whether `x^-1 y` lies in the forbidden set, which is assumed
/// symmetric; the identity is always treated as forbidden.
pub fn avoiding_subset_by<T>(items: &[T], bad: impl Fn(&T, &T) -> bool) -> Vec<usize> {
    let mut alive = vec![true; items.len()];
    let mut picked = Vec::new();
    for i in 0..items.len() {
        if !alive[i] {
            continue;
        }
        picked.push(i);
        alive[i] = false;
        for j in i + 1..items.len() {
            if alive[j] && bad(&items[i], &items[j]) {
                alive[j] = false;
            }
        }
    }
    picked
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvoidingVerdict {
    pub a: usize,
    pub y: usize,
    /// `|A^-1 A ∩ (R ∪ {1})|`.
    pub a_inv_a_cap_r: usize,
    pub size_bound: bool,
    pub avoids: bool,
}

/// Builds `Y ⊆ A` with `|Y| >= |A| / |A^-1 A ∩ (R ∪ {1})|` and
/// `Y^-1 Y \ {1}` disjoint from `R`. `R` must be symmetric.
pub fn avoiding_subset(
    a: &ElementSet,
    r: &ElementSet,
    cap: usize,
) -> Result<(ElementSet, AvoidingVerdict), SetCalcError> {
    if !r.iter().all(|x| r.contains(&x.inv())) {
        return Err(SetCalcError::Precondition("R must be symmetric".into()));
    }
    let items = a.to_vec();
    let picked = avoiding_subset_by(&items, |x, y| r.contains(&x.inv().mul_unchecked(y)));
    let y = ElementSet::from_elements(a.ctx(), a.dim(), picked.into_iter().map(|i| items[i].clone()))?;
    let one = a.identity_element();
    let denom = quotient_set(a, cap)?.iter().filter(|x| **x == one || r.contains(x)).count();
    let avoids = y.iter().all(|u| {
        y.iter().all(|v| {
            let w = u.inv().mul_unchecked(v);
            w == one || !r.contains(&w)
        })
    });
    let verdict = AvoidingVerdict {
        a: a.len(),
        y: y.len(),
        a_inv_a_cap_r: denom,
        size_bound: y.len() * denom >= a.len(),
        avoids,
    };
    Ok((y, verdict))
}

#[derive(Clone, Debug)]
pub struct SchreierResult {
    /// `A_3 ∩ H`.
    pub a3_cap_h: ElementSet,
    pub generated: Group,
    /// Whether `<A> = A·<A_3 ∩ H>` held on recomputation.
    pub certified: bool,
}

/// Given `AH/H = G/H`, returns `A_3 ∩ H` and certifies `<A> = A·<A_3 ∩ H>`.
pub fn schreier_generators(
    a: &ElementSet,
    h: &Group,
    g: &Group,
    cap: usize,
) -> Result<SchreierResult, SetCalcError> {
    if !a.iter().all(|x| g.contains(x)) || !h.is_subgroup_of(g) {
        return Err(SetCalcError::Precondition("A and H must lie in G".into()));
    }
    let cosets_of_a = left_coset_count(a, h);
    if cosets_of_a * h.order() != g.order() {
        return Err(SetCalcError::Precondition("A must meet every left coset of H".into()));
    }
    let a3 = product_set(a, 3, cap)?;
    let a3_cap_h = a3.filter(|x| h.contains(x));
    let generated = Group::generate(a.ctx(), a.dim(), a3_cap_h.to_vec(), cap)?;
    let full = Group::generate(a.ctx(), a.dim(), a.to_vec(), cap)?;
    let prod = a.product(generated.elements(), cap)?;
    let certified = prod == *full.elements();
    Ok(SchreierResult { a3_cap_h, generated, certified })
}

#[derive(Clone, Debug)]
pub struct TransferResult {
    /// Coset-reaching depth `k`, equal to `|<A>:H|`.
    pub k: usize,
    pub index: usize,
    /// Symmetric set of coset representatives, containing the identity.
    pub j: ElementSet,
    pub a_h: ElementSet,
    pub checks: TransferChecks,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferChecks {
    /// `A_H ⊆ A_{5k+1} ∩ H`.
    pub inside_product: bool,
    /// `A ⊆ ∪_{g∈J} g A_H`.
    pub covers_a: bool,
    /// `<A> = ∪_{g∈J} g<A_H>`.
    pub covers_group: bool,
    /// `g A_H g^-1 ⊆ (A_H)_3` for all `g ∈ J`.
    pub conjugates_bounded: bool,
    /// `<A_H>` normal in `<A>`.
    pub normal: bool,
}

impl TransferChecks {
    pub fn all(&self) -> bool {
        self.inside_product && self.covers_a && self.covers_group && self.conjugates_bounded && self.normal
    }
}

/// Moves from `A` to a set `A_H` inside a normal subgroup `H` of bounded
/// index in `<A>`, with coset representatives `J ⊆ A_k`, `k = |<A>:H|`.
///
/// `J` always contains the identity and is closed under inversion. When a
/// coset of order two has no involution among the reachable elements, both
/// a representative and its inverse are kept, so `J` can be slightly larger
/// than a transversal; `bar(g)` always picks the first representative found.
pub fn bounded_index_transfer(
    a: &ElementSet,
    h: &Group,
    index_bound: usize,
    cap: usize,
) -> Result<TransferResult, SetCalcError> {
    if a.is_empty() {
        return Err(SetCalcError::Precondition("A is empty".into()));
    }
    let g = Group::generate(a.ctx(), a.dim(), a.to_vec(), cap)?;
    let h = g.intersection(h);
    if !h.is_normal_in(&g) {
        return Err(AlgebraError::NotNormal.into());
    }
    let index = g.order() / h.order();
    if index > index_bound {
        return Err(SetCalcError::IndexTooLarge { index, bound: index_bound });
    }
    let q = crate::group::QuotientGroup::new(&g, &h)?;
    let k = index.max(1);
    let levels = product_set_levels(a, 5 * k + 1, cap)?;
    let ak = &levels[k - 1];
    // first representative of each coset, scanning A_k level by level
    let mut bar: Vec<Option<GroupElement>> = vec![None; index];
    let one = a.identity_element();
    bar[q.coset_of(&one).unwrap()] = Some(one.clone());
    let mut j = ElementSet::identity(a.ctx(), a.dim());
    for level in levels.iter().take(k) {
        for x in level.iter() {
            let c = q.coset_of(x).unwrap();
            if bar[c].is_some() {
                continue;
            }
            let xi = x.inv();
            let ci = q.coset_of(&xi).unwrap();
            if ci == c && *x != xi {
                // wait for an involution if one exists in A_k
                continue;
            }
            bar[c] = Some(x.clone());
            bar[ci] = Some(xi.clone());
            j.insert(x.clone());
            j.insert(xi);
        }
    }
    for x in ak.iter() {
        let c = q.coset_of(x).unwrap();
        if bar[c].is_none() {
            bar[c] = Some(x.clone());
            j.insert(x.clone());
            j.insert(x.inv());
        }
    }
    let bar: Vec<GroupElement> = bar
        .into_iter()
        .collect::<Option<_>>()
        .ok_or_else(|| SetCalcError::Precondition("A_k misses a coset".into()))?;
    let bar_of = |x: &GroupElement| bar[q.coset_of(x).unwrap()].clone();

    // C_g = g^-1 (A ∩ gH) for transversal elements g
    let mut c_parts: Vec<ElementSet> = vec![a.empty_like(); index];
    for x in a.iter() {
        let c = q.coset_of(x).unwrap();
        c_parts[c].insert(bar[c].inv().mul_unchecked(x));
    }
    let mut c_sym = a.empty_like();
    for part in &c_parts {
        for x in part.iter() {
            c_sym.insert(x.clone());
            c_sym.insert(x.inv());
        }
    }
    let j2 = j.product(&j, cap)?;
    let mut a_h = a.empty_like();
    for g2 in j2.iter() {
        let gi = g2.inv();
        for c in c_sym.iter() {
            a_h.insert(g2.mul_unchecked(c).mul_unchecked(&gi));
        }
        let b = bar_of(&gi);
        a_h.insert(b.mul_unchecked(g2));
        a_h.insert(g2.mul_unchecked(&b));
    }

    let big = &levels[5 * k];
    let inside_product = a_h.iter().all(|x| h.contains(x) && big.contains(x));
    let covers_a = a.iter().all(|x| j.iter().any(|g2| a_h.contains(&g2.inv().mul_unchecked(x))));
    let gen_h = Group::generate(a.ctx(), a.dim(), a_h.to_vec(), cap)?;
    let mut union = a.empty_like();
    for g2 in j.iter() {
        for y in gen_h.elements().iter() {
            union.insert(g2.mul_unchecked(y));
        }
    }
    let covers_group = union == *g.elements();
    let a_h3 = product_set(&a_h, 3, cap)?;
    let conjugates_bounded = j.iter().all(|g2| a_h.conjugate(g2).is_subset(&a_h3));
    let normal = gen_h.is_normal_in(&g);
    Ok(TransferResult {
        k,
        index,
        j,
        a_h,
        checks: TransferChecks { inside_product, covers_a, covers_group, conjugates_bounded, normal },
    })
}

/// Coset counts of `A` for several normal subgroups and for their intersection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetCountVerdict {
    pub counts: Vec<usize>,
    pub intersection_count: usize,
    /// `count(∩ N_j) <= Π count(N_j)`.
    pub holds: bool,
}

pub fn coset_count_product(a: &ElementSet, normals: &[Group]) -> Result<CosetCountVerdict, SetCalcError> {
    let first = normals.first().ok_or_else(|| SetCalcError::Precondition("no subgroups".into()))?;
    let mut inter = first.clone();
    for n in &normals[1..] {
        inter = inter.intersection(n);
    }
    let counts: Vec<usize> = normals.iter().map(|n| left_coset_count(a, n)).collect();
    let intersection_count = left_coset_count(a, &inter);
    let bound: BigUint = counts.iter().map(|&c| big(c)).product();
    Ok(CosetCountVerdict { holds: big(intersection_count) <= bound, counts, intersection_count })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjugateBoundsVerdict {
    pub a_cap_r: usize,
    pub b_cap_r2: usize,
    pub ab: usize,
    pub aa_inv_cap_rr2: usize,
    /// `|AB| >= |A∩R| |B∩R'| / |AA^-1 ∩ R ∩ R'|`.
    pub two_subgroup: bool,
    pub a4: usize,
    pub aa_inv_cap_r_conj: usize,
    /// `|A_4| >= |A∩R|^2 / |AA^-1 ∩ R ∩ aRa^-1|`.
    pub conjugate: bool,
    /// Whether either bound is attained with equality.
    pub equality: bool,
}

impl ConjugateBoundsVerdict {
    pub fn holds(&self) -> bool {
        self.two_subgroup && self.conjugate
    }
}

/// Checks the two-subgroup bound for `(A, B, R, R')` and the conjugate bound
/// for `(A, R, a)`.
pub fn conjugate_intersection_bounds(
    a: &ElementSet,
    b: &ElementSet,
    r: &Group,
    r2: &Group,
    x: &GroupElement,
    cap: usize,
) -> Result<ConjugateBoundsVerdict, SetCalcError> {
    if !a.contains(x) {
        return Err(SetCalcError::Precondition("a must lie in A".into()));
    }
    let a_cap_r = a.iter().filter(|y| r.contains(y)).count();
    let b_cap_r2 = b.iter().filter(|y| r2.contains(y)).count();
    let ab = a.product(b, cap)?.len();
    let d = difference_set(a, cap)?;
    let aa_inv_cap_rr2 = d.iter().filter(|y| r.contains(y) && r2.contains(y)).count();
    let two_subgroup = ab * aa_inv_cap_rr2 >= a_cap_r * b_cap_r2;
    let a4 = product_set(a, 4, cap)?.len();
    let xi = x.inv();
    let aa_inv_cap_r_conj =
        d.iter().filter(|y| r.contains(y) && r.contains(&xi.mul_unchecked(y).mul_unchecked(x))).count();
    let conjugate = a4 * aa_inv_cap_r_conj >= a_cap_r * a_cap_r;
    let equality = ab * aa_inv_cap_rr2 == a_cap_r * b_cap_r2 || a4 * aa_inv_cap_r_conj == a_cap_r * a_cap_r;
    Ok(ConjugateBoundsVerdict {
        a_cap_r,
        b_cap_r2,
        ab,
        aa_inv_cap_rr2,
        two_subgroup,
        a4,
        aa_inv_cap_r_conj,
        conjugate,
        equality,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KSize {
    pub k: usize,
    pub size: usize,
    pub ratio: Ratio,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub set_size: usize,
    pub triple_product: usize,
    pub sizes: Vec<KSize>,
    pub tripling: Option<TriplingVerdict>,
    pub olson: Option<OlsonVerdict>,
}

/// Measures `|A|`, `|AAA|` and `|A_j|` for `j = 1..=k`; evaluates the
/// tripling bounds when `k > 2` and the Olson bound (with `B = A`) when
/// `1 ∈ A` and `<A>` fits under the cap.
pub fn growth_report(a: &ElementSet, k: usize, cap: usize) -> Result<GrowthReport, SetCalcError> {
    let levels = product_set_levels(a, k, cap)?;
    let sizes = levels
        .iter()
        .enumerate()
        .map(|(i, s)| KSize { k: i + 1, size: s.len(), ratio: Ratio::new(s.len() as u64, a.len() as u64) })
        .collect();
    let tripling = if k > 2 { Some(check_tripling(a, k, cap)?) } else { None };
    let olson = if a.contains_identity() {
        match Group::generate(a.ctx(), a.dim(), a.to_vec(), cap) {
            Ok(g) => Some(check_olson(a, a, &g, cap)?),
            Err(_) => None,
        }
    } else {
        None
    };
    Ok(GrowthReport {
        set_size: a.len(),
        triple_product: triple_product(a, cap)?.len(),
        sizes,
        tripling,
        olson,
    })
}

/// Convenience wrapper with the default cap.
pub fn product_set_default(a: &ElementSet, k: usize) -> Result<ElementSet, SetCalcError> {
    product_set(a, k, DEFAULT_CAP)
}

/// Word lengths over `A ∪ A^-1` on all of `<A>`: `x ∈ A_k` iff `len(x) <= k`.
#[derive(Clone, Debug)]
pub struct WordLengths {
    elems: ElementSet,
    len: Vec<usize>,
}

impl WordLengths {
    /// Breadth-first search of the Cayley graph of `<A>` from the identity,
    /// stopping once all of `<A>` (closed first) has been reached.
    pub fn new(a: &ElementSet, cap: usize) -> Result<Self, SetCalcError> {
        let order = Group::generate(a.ctx(), a.dim(), a.to_vec(), cap)?.order();
        let step = a.symmetrized().to_vec();
        let mut elems = ElementSet::identity(a.ctx(), a.dim());
        let mut len = vec![0];
        let mut idx = 0;
        while idx < elems.len() && elems.len() < order {
            let x = elems.get(idx).unwrap().clone();
            let d = len[idx] + 1;
            for s in &step {
                if elems.insert(x.mul_unchecked(s)) {
                    len.push(d);
                    if elems.len() > cap {
                        return Err(AlgebraError::Capacity { cap, partial: elems.len() }.into());
                    }
                }
            }
            idx += 1;
        }
        Ok(WordLengths { elems, len })
    }

    /// The elements of `<A>` in nondecreasing word length.
    pub fn elements(&self) -> &ElementSet {
        &self.elems
    }

    pub fn len_of(&self, x: &GroupElement) -> Option<usize> {
        self.elems.index_of(x).map(|i| self.len[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroupElement, usize)> + '_ {
        self.elems.iter().zip(self.len.iter().copied())
    }

    pub fn diameter(&self) -> usize {
        self.len.last().copied().unwrap_or(0)
    }

    /// `A_k`.
    pub fn ball(&self, k: usize) -> ElementSet {
        let mut out = self.elems.empty_like();
        for (x, d) in self.iter() {
            if d > k {
                break;
            }
            out.insert(x.clone());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::*;
    use crate::field::FieldCtx;

    fn k(p: u32) -> FieldCtx {
        FieldCtx::prime(p).unwrap()
    }

    #[test]
    fn word_lengths_match_product_sets() {
        let f = k(5);
        let u = unitriangular(&f, 3);
        let a = ElementSet::from_vec(u.gens().to_vec()).unwrap();
        let w = WordLengths::new(&a, DEFAULT_CAP).unwrap();
        assert_eq!(w.elements().len(), 125);
        for k in 1..=w.diameter() {
            assert_eq!(w.ball(k), product_set(&a, k, DEFAULT_CAP).unwrap());
        }
        assert_eq!(w.ball(w.diameter()).len(), 125);
        assert_eq!(w.len_of(&GroupElement::identity(&f, 3)), Some(0));
        let b = borel(&f, 2);
        let wb = WordLengths::new(b.elements(), DEFAULT_CAP).unwrap();
        assert_eq!(wb.diameter(), 1);
    }

    #[test]
    fn product_set_examples() {
        let f = k(7);
        let id = ElementSet::identity(&f, 2);
        assert_eq!(product_set(&id, 5, DEFAULT_CAP).unwrap().len(), 1);
        let u = GroupElement::transvection(&f, 2, 0, 1, 1);
        let a = ElementSet::from_vec(vec![u.clone()]).unwrap();
        let a3 = product_set(&a, 3, DEFAULT_CAP).unwrap();
        assert_eq!(a3.len(), 7);
        assert!((-3..=3).all(|e| a3.contains(&u.pow(e))));
        let f5 = k(5);
        let a = ElementSet::from_vec(vec![GroupElement::transvection(&f5, 2, 0, 1, 1)]).unwrap();
        assert_eq!(product_set(&a, 3, DEFAULT_CAP).unwrap().len(), 5);
        assert!(matches!(product_set(&a, 0, DEFAULT_CAP), Err(SetCalcError::BadLength { .. })));
    }

    #[test]
    fn tripling_on_subgroup_and_borel_generators() {
        let f = k(5);
        let u = unitriangular(&f, 2);
        let v = check_tripling(u.elements(), 4, DEFAULT_CAP).unwrap();
        assert!(v.holds());
        assert_eq!((v.a, v.a3, v.ak), (5, 5, 5));
        let t = GroupElement::diagonal(&f, &[2, 1]).unwrap();
        let a = ElementSet::from_vec(vec![GroupElement::transvection(&f, 2, 0, 1, 1), t]).unwrap();
        let v = check_tripling(&a, 4, DEFAULT_CAP).unwrap();
        assert!(v.holds());
        assert_eq!(v.a, 2);
        assert!(check_tripling(&a, 2, DEFAULT_CAP).is_err());
    }

    #[test]
    fn olson_examples() {
        let f = k(5);
        let u = GroupElement::transvection(&f, 2, 0, 1, 1);
        let one = GroupElement::identity(&f, 2);
        let a = ElementSet::from_vec(vec![one.clone(), u.clone()]).unwrap();
        let g = Group::generate_default(vec![u.clone()]).unwrap();
        let v = check_olson(&a, &a, &g, DEFAULT_CAP).unwrap();
        assert_eq!(v.ab, 3);
        assert!(v.holds);
        let t = GroupElement::diagonal(&f, &[2, 1]).unwrap();
        let a = ElementSet::from_vec(vec![one.clone(), u.clone(), t]).unwrap();
        let b = ElementSet::identity(&f, 2);
        // diag(2,1) and I+E12 generate the order-20 subgroup {diag(x,1)}U of the Borel
        let g20 = Group::generate_default(a.to_vec()).unwrap();
        let v = check_olson(&a, &b, &g20, DEFAULT_CAP).unwrap();
        assert_eq!((v.ab, v.group), (3, 20));
        assert!(check_olson(&a, &b, &borel(&f, 2), DEFAULT_CAP).is_err());
        assert!(v.holds);
        let no_one = ElementSet::from_vec(vec![u]).unwrap();
        assert!(matches!(check_olson(&no_one, &b, &g, DEFAULT_CAP), Err(SetCalcError::Precondition(_))));
    }

    #[test]
    fn coset_bounds_examples() {
        let f = k(5);
        let b = borel(&f, 2);
        let u = unitriangular(&f, 2);
        let rep = coset_bounds(b.elements(), b.elements(), &u, 2, DEFAULT_CAP).unwrap();
        assert_eq!(rep.l, 16);
        assert!(rep.holds());
        assert_eq!(rep.normal_cover, Some(true));
        let rep = coset_bounds(u.elements(), u.elements(), &u, 3, DEFAULT_CAP).unwrap();
        assert_eq!(rep.l, 1);
        assert!(rep.a_inv_a_cap_h >= rep.a);
    }

    #[test]
    fn half_cover_on_borel() {
        let f = k(5);
        let b = borel(&f, 2);
        let a = ElementSet::from_elements(&f, 2, b.elements().iter().take(41).cloned()).unwrap();
        let v = half_size_cover(&a, &b, DEFAULT_CAP).unwrap();
        assert!(v.applies && v.aa_is_group);
    }

    #[test]
    fn schreier_examples() {
        let f = k(5);
        let b = borel(&f, 2);
        let u = unitriangular(&f, 2);
        let mut a = diagonal_torus(&f, 2).elements().clone();
        a.insert(GroupElement::transvection(&f, 2, 0, 1, 1));
        let res = schreier_generators(&a, &u, &b, DEFAULT_CAP).unwrap();
        assert!(res.certified);
        assert_eq!(res.generated, u);
        let u3 = unitriangular(&f, 3);
        let center = crate::group::lower_central_series(&u3, DEFAULT_CAP).unwrap()[1].clone();
        let a = ElementSet::from_vec(vec![
            GroupElement::transvection(&f, 3, 0, 1, 1),
            GroupElement::transvection(&f, 3, 1, 2, 1),
        ])
        .unwrap();
        // A meets only two cosets of the center here, so the coverage check fails.
        assert!(schreier_generators(&a, &center, &u3, DEFAULT_CAP).is_err());
        let a4 = product_set(&a, 4, DEFAULT_CAP).unwrap();
        let res = schreier_generators(&a4, &center, &u3, DEFAULT_CAP).unwrap();
        assert!(res.certified);
        assert_eq!(res.generated, center);
        let res = schreier_generators(b.elements(), &b, &b, DEFAULT_CAP).unwrap();
        assert!(res.certified);
        assert_eq!(res.a3_cap_h.len(), 80);
    }

    #[test]
    fn transfer_on_borel_generators() {
        let f = k(5);
        let t = GroupElement::diagonal(&f, &[2, 1]).unwrap();
        let u = GroupElement::transvection(&f, 2, 0, 1, 1);
        let a = ElementSet::from_vec(vec![t, u]).unwrap();
        let h = unitriangular(&f, 2);
        let res = bounded_index_transfer(&a, &h, DEFAULT_INDEX_BOUND, DEFAULT_CAP).unwrap();
        assert_eq!(res.index, 4);
        assert!(res.checks.all(), "{:?}", res.checks);
        let inside = h.elements().clone();
        let res = bounded_index_transfer(&inside, &h, DEFAULT_INDEX_BOUND, DEFAULT_CAP).unwrap();
        assert_eq!(res.j.len(), 1);
        assert!(inside.is_subset(&res.a_h));
        let big = borel(&f, 2);
        assert!(matches!(
            bounded_index_transfer(big.elements(), &Group::trivial(&f, 2), 64, DEFAULT_CAP),
            Err(SetCalcError::IndexTooLarge { index: 80, bound: 64 })
        ));
    }

    #[test]
    fn avoiding_subset_against_torus() {
        let f = k(7);
        let b = borel(&f, 2);
        let a = ElementSet::from_elements(&f, 2, b.elements().iter().step_by(7).cloned()).unwrap();
        let (_, v) = avoiding_subset(&a, diagonal_torus(&f, 2).elements(), DEFAULT_CAP).unwrap();
        assert!(v.size_bound && v.avoids);
    }
}
