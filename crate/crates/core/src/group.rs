//! Finite matrix groups held as explicit element sets plus generators.

use crate::error::AlgebraError;
use crate::field::FieldCtx;
use crate::matrix::GroupElement;
use crate::set::{ElementSet, DEFAULT_CAP};

/// A subgroup of `GL_r(F_{p^a})`, stored both as a generating list and as
/// its full element set.
#[derive(Clone, Debug)]
pub struct Group {
    gens: Vec<GroupElement>,
    elems: ElementSet,
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        self.elems == other.elems
    }
}
impl Eq for Group {}

/// Breadth-first closure of `generators` under right multiplication by the
/// generators and their inverses.
pub fn group_closure(generators: &ElementSet, cap: usize) -> Result<ElementSet, AlgebraError> {
    Ok(Group::generate(generators.ctx(), generators.dim(), generators.to_vec(), cap)?.elems)
}

impl Group {
    pub fn trivial(ctx: &FieldCtx, r: usize) -> Self {
        Group { gens: Vec::new(), elems: ElementSet::identity(ctx, r) }
    }

    /// `<gens>` by breadth-first search, failing past `cap` elements.
    pub fn generate(
        ctx: &FieldCtx,
        r: usize,
        gens: Vec<GroupElement>,
        cap: usize,
    ) -> Result<Self, AlgebraError> {
        let mut g = Group::trivial(ctx, r);
        for x in gens {
            if x.ctx() != ctx || x.dim() != r {
                return Err(AlgebraError::ContextMismatch);
            }
            g.adjoin(x, cap)?;
        }
        Ok(g)
    }

    pub fn generate_default(gens: Vec<GroupElement>) -> Result<Self, AlgebraError> {
        let first = gens.first().ok_or_else(|| AlgebraError::Empty("generators".into()))?;
        let (ctx, r) = (first.ctx().clone(), first.dim());
        Self::generate(&ctx, r, gens, DEFAULT_CAP)
    }

    /// Views a set as a group, checking closure. Generators are picked
    /// greedily in the set's order.
    pub fn from_set(set: &ElementSet) -> Result<Self, AlgebraError> {
        if set.is_empty() {
            return Err(AlgebraError::Empty("group".into()));
        }
        let mut g = Group::trivial(set.ctx(), set.dim());
        for x in set.iter() {
            if !g.contains(x) {
                g.adjoin(x.clone(), set.len()).map_err(|_| AlgebraError::NotAGroup)?;
            }
        }
        if g.order() != set.len() {
            return Err(AlgebraError::NotAGroup);
        }
        Ok(g)
    }

    /// Adds a generator and extends the element set incrementally.
    /// Returns whether the group grew.
    pub fn adjoin(&mut self, x: GroupElement, cap: usize) -> Result<bool, AlgebraError> {
        if self.elems.contains(&x) {
            return Ok(false);
        }
        self.gens.push(x);
        let steps: Vec<GroupElement> = {
            let mut s = ElementSet::new(self.elems.ctx(), self.elems.dim());
            for g in &self.gens {
                s.insert(g.clone());
                s.insert(g.inv());
            }
            s.to_vec()
        };
        let new = self.gens.last().unwrap().clone();
        let new_steps = [new.clone(), new.inv()];
        let old_len = self.elems.len();
        for i in 0..old_len {
            let h = self.elems.get(i).unwrap().clone();
            for s in &new_steps {
                self.elems.insert(h.mul_unchecked(s));
            }
            if self.elems.len() > cap {
                return Err(AlgebraError::Capacity { cap, partial: self.elems.len() });
            }
        }
        let mut idx = old_len;
        while idx < self.elems.len() {
            let h = self.elems.get(idx).unwrap().clone();
            for s in &steps {
                self.elems.insert(h.mul_unchecked(s));
            }
            if self.elems.len() > cap {
                return Err(AlgebraError::Capacity { cap, partial: self.elems.len() });
            }
            idx += 1;
        }
        Ok(true)
    }

    pub fn ctx(&self) -> &FieldCtx {
        self.elems.ctx()
    }
    pub fn dim(&self) -> usize {
        self.elems.dim()
    }
    pub fn gens(&self) -> &[GroupElement] {
        &self.gens
    }
    pub fn elements(&self) -> &ElementSet {
        &self.elems
    }
    pub fn order(&self) -> usize {
        self.elems.len()
    }
    pub fn contains(&self, g: &GroupElement) -> bool {
        self.elems.contains(g)
    }
    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn is_subgroup_of(&self, other: &Group) -> bool {
        self.gens.iter().all(|g| other.contains(g))
    }

    /// Normalized by every generator of `ambient`.
    pub fn is_normalized_by(&self, ambient: &Group) -> bool {
        ambient.gens.iter().all(|g| self.gens.iter().all(|h| self.contains(&g.conj(h))))
    }

    pub fn is_normal_in(&self, ambient: &Group) -> bool {
        self.is_subgroup_of(ambient) && self.is_normalized_by(ambient)
    }

    pub fn is_abelian(&self) -> bool {
        self.gens
            .iter()
            .enumerate()
            .all(|(i, a)| self.gens[i + 1..].iter().all(|b| a.mul_unchecked(b) == b.mul_unchecked(a)))
    }

    /// Smallest subgroup containing both.
    pub fn join(&self, other: &Group, cap: usize) -> Result<Group, AlgebraError> {
        let mut g = self.clone();
        for x in &other.gens {
            g.adjoin(x.clone(), cap)?;
        }
        Ok(g)
    }

    pub fn intersection(&self, other: &Group) -> Group {
        let set = self.elems.intersection(&other.elems);
        Group::from_set(&set).expect("intersection of subgroups is a subgroup")
    }

    /// Conjugate subgroup `g H g^-1`.
    pub fn conjugate(&self, g: &GroupElement) -> Group {
        Group { gens: self.gens.iter().map(|h| g.conj(h)).collect(), elems: self.elems.conjugate(g) }
    }

    /// Product set `HK`, which is a group when either factor normalizes the other.
    pub fn product_set(&self, other: &Group, cap: usize) -> Result<ElementSet, AlgebraError> {
        self.elems.product(&other.elems, cap)
    }
}

/// Normal closure of `seeds` under conjugation by the generators of `ambient`.
pub fn normal_closure(seeds: &[GroupElement], ambient: &Group, cap: usize) -> Result<Group, AlgebraError> {
    let mut h = Group::trivial(ambient.ctx(), ambient.dim());
    for s in seeds {
        h.adjoin(s.clone(), cap)?;
    }
    let mut i = 0;
    while i < h.gens.len() {
        let x = h.gens[i].clone();
        for g in ambient.gens() {
            for y in [g.conj(&x), g.inv().conj(&x)] {
                h.adjoin(y, cap)?;
            }
        }
        i += 1;
    }
    Ok(h)
}

/// `[H, K]`, the subgroup generated by commutators `[h, k]`; computed as the
/// normal closure of generator commutators inside `<H, K>`.
pub fn commutator_subgroup(h: &Group, k: &Group, cap: usize) -> Result<Group, AlgebraError> {
    let ambient = h.join(k, cap)?;
    let seeds: Vec<GroupElement> =
        h.gens().iter().flat_map(|a| k.gens().iter().map(move |b| a.commutator(b))).collect();
    normal_closure(&seeds, &ambient, cap)
}

/// `G = G^0 ⊇ G^1 ⊇ ...` with `G^{i+1} = [G, G^i]`, stopping before the first repeat.
pub fn lower_central_series(g: &Group, cap: usize) -> Result<Vec<Group>, AlgebraError> {
    let mut series = vec![g.clone()];
    loop {
        let last = series.last().unwrap();
        let next = commutator_subgroup(g, last, cap)?;
        if next.order() == last.order() {
            return Ok(series);
        }
        series.push(next);
    }
}

/// `G^(0) = G`, `G^(i+1) = [G^(i), G^(i)]`, stopping before the first repeat.
pub fn derived_series(g: &Group, cap: usize) -> Result<Vec<Group>, AlgebraError> {
    let mut series = vec![g.clone()];
    loop {
        let last = series.last().unwrap();
        let next = commutator_subgroup(last, last, cap)?;
        if next.order() == last.order() {
            return Ok(series);
        }
        series.push(next);
    }
}

pub fn is_nilpotent(g: &Group, cap: usize) -> Result<bool, AlgebraError> {
    Ok(lower_central_series(g, cap)?.last().unwrap().is_trivial())
}

pub fn is_solvable(g: &Group, cap: usize) -> Result<bool, AlgebraError> {
    Ok(derived_series(g, cap)?.last().unwrap().is_trivial())
}

/// `{g in G : gs = sg for all s in S}`.
pub fn centralizer(g: &Group, s: &ElementSet) -> Group {
    let set = g.elements().filter(|x| s.iter().all(|y| x.mul_unchecked(y) == y.mul_unchecked(x)));
    Group::from_set(&set).expect("centralizers are subgroups")
}

/// Coset table of `G/N` for normal `N`.
#[derive(Clone, Debug)]
pub struct QuotientGroup {
    g: Group,
    n: Group,
    /// Coset index of each element of `G`, aligned with `G`'s element order.
    coset: Vec<usize>,
    reps: Vec<GroupElement>,
}

pub fn quotient_group(g: &Group, n: &Group) -> Result<QuotientGroup, AlgebraError> {
    QuotientGroup::new(g, n)
}

impl QuotientGroup {
    pub fn new(g: &Group, n: &Group) -> Result<Self, AlgebraError> {
        if !n.is_normal_in(g) {
            return Err(AlgebraError::NotNormal);
        }
        let mut coset = vec![usize::MAX; g.order()];
        let mut reps = Vec::new();
        for i in 0..g.order() {
            if coset[i] != usize::MAX {
                continue;
            }
            let x = g.elements().get(i).unwrap().clone();
            for y in n.elements().iter() {
                let j = g.elements().index_of(&x.mul_unchecked(y)).expect("N is inside G");
                coset[j] = reps.len();
            }
            reps.push(x);
        }
        Ok(QuotientGroup { g: g.clone(), n: n.clone(), coset, reps })
    }

    pub fn order(&self) -> usize {
        self.reps.len()
    }
    pub fn group(&self) -> &Group {
        &self.g
    }
    pub fn kernel(&self) -> &Group {
        &self.n
    }
    pub fn reps(&self) -> &[GroupElement] {
        &self.reps
    }

    /// Index of the coset `xN`, or `None` if `x` lies outside `G`.
    pub fn coset_of(&self, x: &GroupElement) -> Option<usize> {
        self.g.elements().index_of(x).map(|i| self.coset[i])
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.coset_of(&self.reps[i].mul_unchecked(&self.reps[j])).unwrap()
    }

    /// Image `π(A) = AN/N` as sorted coset indices; elements outside `G` are ignored.
    pub fn image(&self, a: &ElementSet) -> Vec<usize> {
        let mut v: Vec<usize> = a.iter().filter_map(|x| self.coset_of(x)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Full preimage `AN` of a set of coset indices.
    pub fn preimage(&self, cosets: &[usize]) -> ElementSet {
        let wanted: std::collections::HashSet<usize> = cosets.iter().copied().collect();
        let mut out = self.g.elements().empty_like();
        for (i, x) in self.g.elements().iter().enumerate() {
            if wanted.contains(&self.coset[i]) {
                out.insert(x.clone());
            }
        }
        out
    }

    pub fn is_abelian(&self) -> bool {
        let gens = self.g.gens();
        gens.iter().all(|a| gens.iter().all(|b| self.n.contains(&a.commutator(b))))
    }

    /// Orders of `(G/N)^i = G^i N / N` until stabilization.
    pub fn lower_central_orders(&self, cap: usize) -> Result<Vec<usize>, AlgebraError> {
        let mut out = Vec::new();
        for term in lower_central_series(&self.g, cap)? {
            let joined = term.join(&self.n, cap)?;
            let o = joined.order() / self.n.order();
            if out.last() == Some(&o) {
                break;
            }
            out.push(o);
        }
        Ok(out)
    }

    pub fn is_nilpotent(&self, cap: usize) -> Result<bool, AlgebraError> {
        Ok(self.lower_central_orders(cap)?.last() == Some(&1))
    }
}
